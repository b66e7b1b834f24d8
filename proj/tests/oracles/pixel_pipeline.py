#!/usr/bin/env python3
"""Per-pixel reference for the render pipeline, written independently of the
C++ engine and evaluated in double precision.

Pipeline: sRGB decode -> white balance -> exposure (linear) -> gamma encode ->
tone block -> vibrance/saturation (HSL) -> HSL mixer -> clamp, 8-bit encode
(round half to even).
"""
import math
from wb_gains import gains

CENTERS = [0.0, 30.0, 60.0, 120.0, 180.0, 240.0, 280.0, 320.0]
NAMES = ["red", "orange", "yellow", "green", "cyan", "blue", "purple", "magenta"]
HALF_WIDTH = 45.0


def decode(v8):
    c = v8 / 255.0
    return c / 12.92 if c <= 0.04045 else ((c + 0.055) / 1.055) ** 2.4


def oetf(x):
    return 12.92 * x if x <= 0.0031308 else 1.055 * x ** (1 / 2.4) - 0.055


def eotf(c):
    return c / 12.92 if c <= 0.04045 else ((c + 0.055) / 1.055) ** 2.4


def smoothstep(e0, e1, x):
    t = min(1.0, max(0.0, (x - e0) / (e1 - e0)))
    return t * t * (3 - 2 * t)


def tone_curve(x, blacks=0, whites=0, shadows=0, highlights=0, contrast=0):
    bp = -0.25 * blacks / 100.0
    wp = 1.0 - 0.25 * whites / 100.0
    x = max(0.0, (x - bp) / (wp - bp))
    ks = 0.5 * shadows / 100.0
    x = x + ks * x * (1.0 - smoothstep(0.0, 0.5, x))
    kh = 0.5 * highlights / 100.0
    if x <= 1.0:
        x = x + kh * (1.0 - x) * smoothstep(0.5, 1.0, x)
    else:
        x = 1.0 + (x - 1.0) * (1.0 + kh)
    x = 0.5 + (x - 0.5) * (1.0 + contrast / 100.0)
    return max(0.0, x)


def rgb_to_hsl(r, g, b):
    mx, mn = max(r, g, b), min(r, g, b)
    l = (mx + mn) / 2
    if mx == mn:
        return 0.0, 0.0, l
    d = mx - mn
    s = d / (1 - abs(2 * l - 1))
    if mx == r:
        h = ((g - b) / d) % 6
    elif mx == g:
        h = (b - r) / d + 2
    else:
        h = (r - g) / d + 4
    return h * 60.0, s, l


def hsl_to_rgb(h, s, l):
    c = (1 - abs(2 * l - 1)) * s
    hp = (h % 360.0) / 60.0
    x = c * (1 - abs(hp % 2 - 1))
    if hp < 1: r, g, b = c, x, 0
    elif hp < 2: r, g, b = x, c, 0
    elif hp < 3: r, g, b = 0, c, x
    elif hp < 4: r, g, b = 0, x, c
    elif hp < 5: r, g, b = x, 0, c
    else: r, g, b = c, 0, x
    m = l - c / 2
    return r + m, g + m, b + m


def memberships(h):
    n = len(CENTERS)
    w = []
    for i, c in enumerate(CENTERS):
        prev_gap = (c - CENTERS[(i - 1) % n]) % 360.0
        next_gap = (CENTERS[(i + 1) % n] - c) % 360.0
        d = (h - c + 540.0) % 360.0 - 180.0
        hw = min(HALF_WIDTH, next_gap) if d >= 0 else min(HALF_WIDTH, prev_gap)
        w.append(max(0.0, 1.0 - abs(d) / hw))
    s = sum(w)
    return [x / s for x in w]


def render_pixel(rgb8, p):
    """p: dict with basic keys and optional 'mixer' {name: (h, s, l)}."""
    gr, gg, gb = gains(p.get("temp", 6500), p.get("tint", 0))
    lin = [decode(rgb8[0]) * gr, decode(rgb8[1]) * gg, decode(rgb8[2]) * gb]
    k = 2.0 ** p.get("exposure", 0.0)
    lin = [v * k for v in lin]
    tone = {key: p.get(key, 0) for key in ("blacks", "whites", "shadows", "highlights", "contrast")}
    if any(tone.values()):
        y = 0.2126 * lin[0] + 0.7152 * lin[1] + 0.0722 * lin[2]
        y2 = eotf(tone_curve(oetf(y), **tone))
        lin = [v * y2 / y for v in lin] if y > 0 else [y2] * 3
    c = [oetf(max(0.0, v)) for v in lin]
    vib, sat = p.get("vibrance", 0), p.get("saturation", 0)
    if vib or sat:
        h, s, l = rgb_to_hsl(*[min(1.0, v) for v in c])
        s = s * (1 + vib / 100.0 * (1 - s))
        s = min(1.0, max(0.0, s * (1 + sat / 100.0)))
        c = list(hsl_to_rgb(h, s, l))
    mixer = p.get("mixer", {})
    if any(any(v) for v in mixer.values()):
        h, s, l = rgb_to_hsl(*[min(1.0, v) for v in c])
        w = memberships(h)
        dh = ds = dl = 0.0
        for i, name in enumerate(NAMES):
            mh, ms, ml = mixer.get(name, (0, 0, 0))
            dh += w[i] * mh / 100.0 * 30.0
            ds += w[i] * ms / 100.0
            dl += w[i] * ml / 100.0
        h = (h + dh) % 360.0
        s2 = min(1.0, max(0.0, s * (1 + ds)))
        l2 = min(1.0, max(0.0, l * (1 + s * dl)))
        c = list(hsl_to_rgb(h, s2, l2))
    return tuple(int(round(min(1.0, max(0.0, v)) * 255.0)) for v in c)


EXAMPLE1_ITER1 = dict(exposure=0.5, contrast=20, highlights=-20, shadows=20, whites=10, blacks=-10,
                      temp=5800, tint=5, vibrance=25, saturation=15,
                      mixer={"orange": (0, 10, 10), "yellow": (0, 10, 15),
                             "cyan": (0, -10, 5), "blue": (0, -10, -10)})

def print_spot_values():
    print("tone shadows+50 @0.1:", repr(tone_curve(0.1, shadows=50)))
    print("tone highlights-50 @0.9:", repr(tone_curve(0.9, highlights=-50)))
    print("tone blacks+40 @0.0:", repr(tone_curve(0.0, blacks=40)))
    print("tone whites+40 @0.5:", repr(tone_curve(0.5, whites=40)))
    print("tone contrast+100 @0.5:", repr(tone_curve(0.5, contrast=100)))
    print("tone contrast+50 @0.7:", repr(tone_curve(0.7, contrast=50)))
    print("memberships(240):", memberships(240.0))
    print("memberships(90):", memberships(90.0))
    print("memberships(15):", memberships(15.0))
    print("blue pixel, blue(0,-10,-10):",
          render_pixel((0, 0, 255), {"mixer": {"blue": (0, -10, -10)}}))
    print("gray128 exposure+1:", render_pixel((128, 128, 128), {"exposure": 1.0}))
    for px in [(200, 40, 40), (30, 160, 90), (90, 120, 230), (250, 250, 10)]:
        print("sat-100", px, "->", render_pixel(px, {"saturation": -100}))
    for px in [(128, 128, 128), (200, 150, 100), (60, 90, 160), (20, 20, 20), (240, 235, 220)]:
        print("example1 iter1", px, "->", render_pixel(px, EXAMPLE1_ITER1))


def emit_cases(path, seed=20240611, count=400):
    """Freeze random (pixel, params) -> output triples for the C++ tests."""
    import json
    import random
    rng = random.Random(seed)
    cases = []
    for _ in range(count):
        p = dict(exposure=round(rng.uniform(-2, 2), 2),
                 contrast=rng.randint(-60, 60), highlights=rng.randint(-100, 100),
                 shadows=rng.randint(-100, 100), whites=rng.randint(-60, 60),
                 blacks=rng.randint(-60, 60), temp=rng.randint(3000, 12000),
                 tint=rng.randint(-50, 50), vibrance=rng.randint(-100, 100),
                 saturation=rng.randint(-100, 100))
        mixer = {}
        for name in NAMES:
            if rng.random() < 0.4:
                mixer[name] = (rng.randint(-100, 100), rng.randint(-100, 100), rng.randint(-100, 100))
        p["mixer"] = mixer
        px = tuple(rng.randint(0, 255) for _ in range(3))
        cases.append({"pixel": px, "params": p, "expected": render_pixel(px, p)})
    with open(path, "w") as f:
        json.dump(cases, f, indent=None, separators=(",", ":"))
        f.write("\n")


if __name__ == "__main__":
    import sys
    if len(sys.argv) == 3 and sys.argv[1] == "--emit":
        emit_cases(sys.argv[2])
    else:
        print_spot_values()
