#!/usr/bin/env python3
"""Rebuild the bundled MNIST IDX files from the `mnist` npm package.

The npm package (MIT licensed) ships 10,000 MNIST training digits as
per-class JSON arrays of 28x28 intensities in [0, 1] with three decimals.
Intensities are mapped back to bytes with round(v * 255), the examples
are interleaved with a fixed-seed shuffle so any prefix is class-balanced
in expectation, and the result is written as gzip-compressed IDX files.

usage: npm pack mnist && tar xzf mnist-*.tgz
       python3 scripts/mnist_from_npm.py package/src/digits data/mnist
"""
import gzip
import json
import os
import random
import struct
import sys

SIDE = 28


def main(src, dst):
    samples = []
    for digit in range(10):
        with open(os.path.join(src, f"{digit}.json")) as fh:
            raw = json.load(fh)["data"]
        count = len(raw) // (SIDE * SIDE)
        for k in range(count):
            chunk = raw[k * SIDE * SIDE:(k + 1) * SIDE * SIDE]
            pixels = bytes(min(255, max(0, round(v * 255))) for v in chunk)
            samples.append((digit, pixels))
    random.Random(20170419).shuffle(samples)

    os.makedirs(dst, exist_ok=True)
    with gzip.GzipFile(os.path.join(dst, "train-images-idx3-ubyte.gz"), "wb", mtime=0) as fh:
        fh.write(struct.pack(">IIII", 0x803, len(samples), SIDE, SIDE))
        for _, pixels in samples:
            fh.write(pixels)
    with gzip.GzipFile(os.path.join(dst, "train-labels-idx1-ubyte.gz"), "wb", mtime=0) as fh:
        fh.write(struct.pack(">II", 0x801, len(samples)))
        fh.write(bytes(d for d, _ in samples))
    print(f"wrote {len(samples)} examples to {dst}")


if __name__ == "__main__":
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    main(sys.argv[1], sys.argv[2])
