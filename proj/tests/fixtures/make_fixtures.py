#!/usr/bin/env python3
# Regenerates the checked-in IDX fixtures. Written separately from the C++
# serializer so the two can check each other.
import gzip
import os
import random
import struct

HERE = os.path.dirname(os.path.abspath(__file__))


def images_bytes(imgs, rows, cols, magic=0x00000803):
    out = struct.pack(">IIII", magic, len(imgs), rows, cols)
    for im in imgs:
        out += bytes(im)
    return out


def labels_bytes(labels, magic=0x00000801):
    return struct.pack(">II", magic, len(labels)) + bytes(labels)


def digit(rng, c):
    # A 7x7 bright block whose position encodes the class, plus faint noise.
    im = [0] * 784
    r0 = 3 + (c // 4) * 8
    c0 = 2 + (c % 4) * 6
    for r in range(r0, r0 + 7):
        for k in range(c0, c0 + 7):
            im[r * 28 + k] = rng.randint(170, 255)
    for _ in range(30):
        im[rng.randrange(784)] = rng.randint(0, 90)
    return im


def split(rng, per_class):
    pairs = [(c, digit(rng, c)) for c in range(10) for _ in range(per_class)]
    rng.shuffle(pairs)
    return [p[1] for p in pairs], [p[0] for p in pairs]


def write(path, data):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "wb") as f:
        f.write(data)


def write_gz(path, data):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "wb") as f:
        f.write(gzip.compress(data, mtime=0))


def main():
    rng = random.Random(20240611)
    tiny = os.path.join(HERE, "data", "mnist")
    imgs, labels = split(rng, 12)
    write(os.path.join(tiny, "train-images-idx3-ubyte"), images_bytes(imgs, 28, 28))
    write(os.path.join(tiny, "train-labels-idx1-ubyte"), labels_bytes(labels))
    imgs, labels = split(rng, 5)
    write_gz(os.path.join(tiny, "t10k-images-idx3-ubyte.gz"), images_bytes(imgs, 28, 28))
    write_gz(os.path.join(tiny, "t10k-labels-idx1-ubyte.gz"), labels_bytes(labels))

    idx = os.path.join(HERE, "idx")
    write(os.path.join(idx, "one_pixel.idx3"), images_bytes([[0x7F]], 1, 1))
    write(os.path.join(idx, "labels_314.idx1"), labels_bytes([3, 1, 4]))
    write(os.path.join(idx, "labels_empty.idx1"), labels_bytes([]))
    small = [[rng.randrange(256) for _ in range(15)] for _ in range(4)]
    write(os.path.join(idx, "small_4x3x5.idx3"), images_bytes(small, 3, 5))
    write_gz(os.path.join(idx, "small_4x3x5.idx3.gz"), images_bytes(small, 3, 5))

    bad = os.path.join(HERE, "corrupt")
    write(os.path.join(bad, "images_bad_magic.idx3"), images_bytes(small, 3, 5, magic=0x00000801))
    write(os.path.join(bad, "images_truncated.idx3"), images_bytes(small, 3, 5)[:-1])
    write(os.path.join(bad, "images_trailing.idx3"), images_bytes(small, 3, 5) + b"\x00")
    write(os.path.join(bad, "images_short_header.idx3"), struct.pack(">III", 0x803, 1, 1))
    write(os.path.join(bad, "images_overflow.idx3"), struct.pack(">IIII", 0x803, 1, 100000001, 1) + b"\x00")
    write(os.path.join(bad, "labels_bad_magic.idx1"), labels_bytes([1, 2], magic=0x00000803))
    write(os.path.join(bad, "labels_truncated.idx1"), labels_bytes([1, 2, 3])[:-1])
    write(os.path.join(bad, "labels_out_of_range.idx1"), labels_bytes([1, 10, 2]))
    gz = gzip.compress(images_bytes(small, 3, 5), mtime=0)
    write(os.path.join(bad, "images_cut.idx3.gz"), gz[: len(gz) // 2])
    write(os.path.join(bad, "empty.bin"), b"")

    # Download source for the fetch test: every archive gzipped.
    mirror = os.path.join(HERE, "mirror")
    for name in ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"):
        with open(os.path.join(tiny, name), "rb") as f:
            write_gz(os.path.join(mirror, name + ".gz"), f.read())
    for name in ("t10k-images-idx3-ubyte.gz", "t10k-labels-idx1-ubyte.gz"):
        with open(os.path.join(tiny, name), "rb") as f:
            write(os.path.join(mirror, name), f.read())


if __name__ == "__main__":
    main()
