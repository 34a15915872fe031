#!/usr/bin/env python3
"""Build a small MNIST subset in IDX format from the `mnist` npm package.

The npm package ships 10,000 MNIST digits as per-class JSON files with pixel
intensities already divided by 255 (three decimals). This script restores the
byte values, shuffles the digits with a fixed seed and writes disjoint
train/test splits in the standard IDX layout.

Usage:
    npm pack mnist && tar xzf mnist-*.tgz
    python3 tools/make_mnist_subset.py package/src/digits data/mnist-subset
"""
import argparse
import json
import pathlib
import random
import struct


def write_images(path, images):
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(images), 28, 28))
        for img in images:
            f.write(bytes(img))


def write_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(bytes(labels))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("digits_dir")
    ap.add_argument("out_dir")
    ap.add_argument("--train", type=int, default=5000)
    ap.add_argument("--test", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=20171)
    args = ap.parse_args()

    samples = []
    for digit in range(10):
        data = json.loads((pathlib.Path(args.digits_dir) / f"{digit}.json").read_text())["data"]
        assert len(data) % 784 == 0
        for k in range(len(data) // 784):
            px = data[k * 784:(k + 1) * 784]
            samples.append(([min(255, max(0, round(v * 255))) for v in px], digit))

    random.Random(args.seed).shuffle(samples)
    if args.train + args.test > len(samples):
        raise SystemExit("not enough samples")
    train = samples[:args.train]
    test = samples[args.train:args.train + args.test]

    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_images(out / "train-images-idx3-ubyte", [s[0] for s in train])
    write_labels(out / "train-labels-idx1-ubyte", [s[1] for s in train])
    write_images(out / "t10k-images-idx3-ubyte", [s[0] for s in test])
    write_labels(out / "t10k-labels-idx1-ubyte", [s[1] for s in test])


if __name__ == "__main__":
    main()
