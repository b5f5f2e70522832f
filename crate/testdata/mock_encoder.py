#!/usr/bin/env python3
"""Deterministic stand-in codec for harness tests.

encode: parses a Y4M stream, quantizes every pixel with a CRF-dependent
step, and deflate-compresses the result — so bitstream size falls and
distortion rises as CRF grows, like a real encoder, but bit-reproducibly
and with no external dependencies.

decode: exact inverse of the container, emitting the quantized Y4M.

Usage:
    mock_encoder.py encode <in.y4m> <out.bin> <crf> <preset>
    mock_encoder.py decode <in.bin> <out.y4m>
"""

import sys
import zlib

MAGIC = b"MOCKCDC1"


def fail(message, code=3):
    print(message, file=sys.stderr)
    sys.exit(code)


def parse_y4m(data):
    if not data.startswith(b"YUV4MPEG2"):
        fail("input is not a YUV4MPEG2 stream")
    nl = data.find(b"\n")
    if nl < 0:
        fail("unterminated Y4M header")
    header = data[: nl + 1]
    width = height = None
    mono = False
    for token in header[:-1].decode("ascii", "replace").split(" ")[1:]:
        if token.startswith("W"):
            width = int(token[1:])
        elif token.startswith("H"):
            height = int(token[1:])
        elif token.startswith("C"):
            mono = token[1:] == "mono"
    if not width or not height:
        fail("Y4M header missing dimensions")
    payload = width * height if mono else width * height * 3 // 2

    frames = []
    pos = nl + 1
    while pos < len(data):
        if data[pos : pos + 5] != b"FRAME":
            fail("malformed FRAME marker at byte %d" % pos)
        line_end = data.find(b"\n", pos)
        if line_end < 0 or len(data) < line_end + 1 + payload:
            fail("truncated frame")
        frames.append(data[line_end + 1 : line_end + 1 + payload])
        pos = line_end + 1 + payload
    if not frames:
        fail("stream contains no frames")
    return header, frames


def encode(src, dst, crf, preset):
    if not 0 <= crf <= 51:
        fail("crf %d out of range [0, 51]" % crf)
    del preset  # recorded by the caller; irrelevant to this codec
    with open(src, "rb") as f:
        header, frames = parse_y4m(f.read())
    step = 1 + crf // 3
    table = bytes(min(255, (v // step) * step + step // 2) for v in range(256))
    quantized = b"".join(frame.translate(table) for frame in frames)
    body = zlib.compress(quantized, 9)
    with open(dst, "wb") as f:
        f.write(MAGIC)
        f.write(len(header).to_bytes(4, "big"))
        f.write(len(frames).to_bytes(4, "big"))
        f.write(header)
        f.write(body)


def decode(src, dst):
    with open(src, "rb") as f:
        data = f.read()
    if not data.startswith(MAGIC):
        fail("input is not a mock bitstream")
    header_len = int.from_bytes(data[8:12], "big")
    frame_count = int.from_bytes(data[12:16], "big")
    header = data[16 : 16 + header_len]
    pixels = zlib.decompress(data[16 + header_len :])
    if frame_count == 0 or len(pixels) % frame_count != 0:
        fail("corrupt mock bitstream")
    payload = len(pixels) // frame_count
    with open(dst, "wb") as f:
        f.write(header)
        for i in range(frame_count):
            f.write(b"FRAME\n")
            f.write(pixels[i * payload : (i + 1) * payload])


def main(argv):
    if len(argv) >= 2 and argv[1] == "encode":
        if len(argv) != 6:
            fail("usage: mock_encoder.py encode <in.y4m> <out.bin> <crf> <preset>", 2)
        encode(argv[2], argv[3], int(argv[4]), argv[5])
    elif len(argv) >= 2 and argv[1] == "decode":
        if len(argv) != 4:
            fail("usage: mock_encoder.py decode <in.bin> <out.y4m>", 2)
        decode(argv[2], argv[3])
    else:
        fail("first argument must be encode or decode", 2)


if __name__ == "__main__":
    main(sys.argv)
