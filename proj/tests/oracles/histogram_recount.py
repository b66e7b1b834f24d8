#!/usr/bin/env python3
"""Brute-force recount of histogram features, independent of the C++ code.

Usage: histogram_recount.py --emit FIXTURE_DIR
         writes noise_96x64.png (seeded noise, blue-leaning) and its report
       histogram_recount.py --emit-random DIR [COUNT]
         writes COUNT (default 20) random images random_NN.png with reports
"""
import json
import os
import sys

import numpy as np
from PIL import Image


def recount(pixels):
    """pixels: list of (r, g, b) tuples."""
    n = len(pixels)
    names = ["red", "green", "blue"]
    out = {"pixel_count": n, "channels": {}}
    means = []
    pooled_mid = 0
    for c, name in enumerate(names):
        values = sorted(p[c] for p in pixels)
        bins = [0] * 256
        for v in values:
            bins[v] += 1
        # percentile: value at sorted position ceil(n*q) - 1 (1-based rank ceil(n*q))
        def pct(num, den):
            rank = -(-n * num // den)  # ceil
            return values[max(rank, 1) - 1]
        pooled_mid += sum(1 for v in values if 64 <= v <= 191)
        mean = sum(values) / (n * 255.0)
        means.append(mean)
        out["channels"][name] = {
            "bins": bins,
            "shadow_clip_fraction": values.count(0) / n,
            "highlight_clip_fraction": values.count(255) / n,
            "black_point": pct(1, 1000),
            "white_point": pct(999, 1000),
            "mean": mean,
        }
    out["midtone_fraction"] = pooled_mid / (3.0 * n)
    out["pooled_mean"] = sum(means) / 3.0
    out["warm_cool_bias"] = means[0] - means[2]
    out["dominant_channel"] = "none" if means[0] == means[1] == means[2] else names[means.index(max(means))]
    return out


def emit(fixture_dir):
    rng = np.random.default_rng(1234)
    img = rng.integers(0, 256, size=(64, 96, 3), dtype=np.uint8)
    img[..., 2] = np.clip(img[..., 2].astype(int) + 40, 0, 255).astype(np.uint8)
    png = os.path.join(fixture_dir, "noise_96x64.png")
    Image.fromarray(img, "RGB").save(png)
    pixels = [tuple(int(v) for v in p) for p in img.reshape(-1, 3)]
    with open(os.path.join(fixture_dir, "noise_96x64.report.json"), "w") as f:
        json.dump(recount(pixels), f, indent=1)
        f.write("\n")


def emit_random(out_dir, count=20, seed=777):
    """Mixed shapes and tonal regimes so clipping and percentiles get exercised."""
    rng = np.random.default_rng(seed)
    os.makedirs(out_dir, exist_ok=True)
    for i in range(count):
        h, w = int(rng.integers(4, 72)), int(rng.integers(4, 96))
        kind = i % 5
        if kind == 0:
            img = rng.integers(0, 256, size=(h, w, 3))
        elif kind == 1:  # dark, shadow clipping
            img = np.clip(rng.normal(20, 25, size=(h, w, 3)), 0, 255)
        elif kind == 2:  # bright, highlight clipping
            img = np.clip(rng.normal(235, 30, size=(h, w, 3)), 0, 255)
        elif kind == 3:  # narrow midtone band with a cast
            img = np.clip(rng.normal(128, 10, size=(h, w, 3)) + rng.integers(-30, 31, size=3), 0, 255)
        else:  # gradient plus noise
            ramp = np.linspace(0, 255, w)[None, :, None] * np.ones((h, 1, 3))
            img = np.clip(ramp + rng.normal(0, 12, size=(h, w, 3)), 0, 255)
        img = img.astype(np.uint8)
        stem = os.path.join(out_dir, "random_%02d" % i)
        Image.fromarray(img, "RGB").save(stem + ".png")
        pixels = [tuple(int(v) for v in p) for p in img.reshape(-1, 3)]
        with open(stem + ".report.json", "w") as f:
            json.dump(recount(pixels), f, indent=1)
            f.write("\n")


if __name__ == "__main__":
    if len(sys.argv) == 3 and sys.argv[1] == "--emit":
        emit(sys.argv[2])
    elif len(sys.argv) in (3, 4) and sys.argv[1] == "--emit-random":
        emit_random(sys.argv[2], *(int(a) for a in sys.argv[3:]))
    else:
        print(__doc__)
