"""Writes the IDX fixtures under tests/data and prints the PCA oracle.

Run from the repository root. Uses only the standard library and numpy.
"""
import gzip
import struct

import numpy as np

IMAGES = [
    [0, 255, 0, 51, 102, 153],
    [255, 0, 0, 0, 0, 0],
    [10, 20, 30, 40, 50, 60],
    [1, 2, 3, 4, 5, 6],
    [200, 100, 0, 0, 100, 200],
]
LABELS = [3, 0, 1, 2, 1]


def idx_images(rows, cols, images):
    header = struct.pack(">BBBBIII", 0, 0, 0x08, 3, len(images), rows, cols)
    return header + bytes(b for img in images for b in img)


def idx_labels(labels):
    return struct.pack(">BBBBI", 0, 0, 0x08, 1, len(labels)) + bytes(labels)


def main():
    img = idx_images(2, 3, IMAGES)
    lab = idx_labels(LABELS)
    with open("tests/data/tiny-images-idx3-ubyte", "wb") as f:
        f.write(img)
    with open("tests/data/tiny-labels-idx1-ubyte", "wb") as f:
        f.write(lab)
    with gzip.open("tests/data/tiny-images-idx3-ubyte.gz", "wb") as f:
        f.write(img)
    with open("tests/data/bad-magic-idx3-ubyte", "wb") as f:
        f.write(b"\x01\x02" + img[2:])

    x = np.array([[2.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 1.0, 1.0],
                  [3.0, 2.0, 0.0], [0.5, 0.0, 2.0], [1.0, 3.0, 1.0]])
    mean = x.mean(axis=0)
    c = x - mean
    cov = c.T @ c / (len(x) - 1)
    w, v = np.linalg.eigh(cov)
    proj = v[:, ::-1][:, :2]
    for k in range(2):
        i = np.argmax(np.abs(proj[:, k]))
        if proj[i, k] < 0:
            proj[:, k] = -proj[:, k]
    p = c @ proj
    p = p / np.linalg.norm(p, axis=1).max()
    np.set_printoptions(precision=17)
    print("projection", repr(proj))
    print("projected", repr(p))


if __name__ == "__main__":
    main()
