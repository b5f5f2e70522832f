//! Per-frame plumbing: where masks come from and how frames fan out
//! across worker threads.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use adasharp_core::partition::partition_frame;
use adasharp_core::pgm::read_mask_pgm_file;
use adasharp_core::{Frame, PartitionMask, RdoParams};

use crate::fail::Fail;
use crate::pattern::FramePattern;

/// Where each frame's partition mask comes from: pre-computed PGM files
/// or an in-process partition of the frame itself.
pub enum MaskSource {
    Files(FramePattern),
    Internal(RdoParams),
}

impl MaskSource {
    pub fn mask_for(&self, frame: &Frame, index: usize) -> Result<PartitionMask, Fail> {
        match self {
            MaskSource::Files(pattern) => {
                let path = pattern.path(index);
                if !path.is_file() {
                    return Err(Fail::io(format!(
                        "mask for frame {index} not found at {}",
                        path.display()
                    )));
                }
                Ok(read_mask_pgm_file(&path)?)
            }
            MaskSource::Internal(params) => Ok(partition_frame(frame, params)?),
        }
    }
}

/// Maps `f` over the frames on up to `jobs` threads, preserving frame
/// order in the result. Frames are independent, so any interleaving
/// computes the same values; on multiple failures the lowest frame index
/// wins, keeping errors deterministic.
pub fn par_map_frames<T: Send>(
    frames: &[Frame],
    jobs: usize,
    f: impl Fn(usize, &Frame) -> Result<T, Fail> + Sync,
) -> Result<Vec<T>, Fail> {
    let n = frames.len();
    let workers = jobs.clamp(1, n.max(1));
    if workers <= 1 {
        return frames
            .iter()
            .enumerate()
            .map(|(i, frame)| f(i, frame))
            .collect();
    }

    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<T, Fail>>>> = Mutex::new((0..n).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= n {
                    break;
                }
                let result = f(i, &frames[i]);
                slots.lock().expect("frame slot lock")[i] = Some(result);
            });
        }
    });

    let mut out = Vec::with_capacity(n);
    for slot in slots.into_inner().expect("frame slot lock") {
        out.push(slot.expect("all frames visited")?);
    }
    Ok(out)
}

/// Default worker count for `--jobs`.
pub fn default_jobs() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}
