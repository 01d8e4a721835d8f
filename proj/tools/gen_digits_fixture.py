#!/usr/bin/env python3
"""Writes the 2-D four-digit fixture used by the ellipse acceptance check.

Digits 0, 1, 2 and 4 from scikit-learn's bundled 8x8 digits set, projected
onto their first two principal components. Output: CSV with columns
pc1,pc2,label.
"""
import argparse
import csv

import numpy as np
from sklearn.datasets import load_digits


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("output", help="CSV path to write")
    args = ap.parse_args()

    digits = load_digits()
    keep = np.isin(digits.target, [0, 1, 2, 4])
    X = digits.data[keep].astype(float)
    y = digits.target[keep]

    centered = X - X.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    comps = vt[:2]
    for r in range(2):
        if comps[r, np.argmax(np.abs(comps[r]))] < 0:
            comps[r] = -comps[r]
    Z = centered @ comps.T

    with open(args.output, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["pc1", "pc2", "label"])
        for z, label in zip(Z, y):
            w.writerow([repr(float(z[0])), repr(float(z[1])), int(label)])


if __name__ == "__main__":
    main()
