#!/usr/bin/env python3
"""Independent evaluation of the Kelvin->RGB white-balance gain rule.

Blackbody approximation (piecewise polynomial/log fit over T/100), gains are
neutral(6500)/target(T) normalized so the green gain is 1, then the green gain
is multiplied by (1 - tint/300).
"""
import math


def kelvin_rgb(kelvin):
    t = kelvin / 100.0
    if t <= 66.0:
        r = 255.0
        g = 99.4708025861 * math.log(t) - 161.1195681661
    else:
        r = 329.698727446 * math.pow(t - 60.0, -0.1332047592)
        g = 288.1221695283 * math.pow(t - 60.0, -0.0755148492)
    if t >= 66.0:
        b = 255.0
    elif t <= 19.0:
        b = 0.0
    else:
        b = 138.5177312231 * math.log(t - 10.0) - 305.0447927307
    clamp = lambda v: min(255.0, max(0.0, v)) / 255.0
    return clamp(r), clamp(g), clamp(b)


def gains(temp, tint):
    n = kelvin_rgb(6500.0)
    t = kelvin_rgb(temp)
    raw = [n[i] / t[i] for i in range(3)]
    g = raw[1]
    out = [raw[0] / g, 1.0, raw[2] / g]
    out[1] *= 1.0 - tint / 300.0
    return out


if __name__ == "__main__":
    for temp, tint in [(6500, 0), (5800, 5), (7000, 0), (6500, 150), (6500, -150),
                       (2000, 0), (50000, 0), (5500, 0), (5000, 0)]:
        r, g, b = gains(temp, tint)
        print(f"({temp}, {tint}) -> {r:.12f} {g:.12f} {b:.12f}")
