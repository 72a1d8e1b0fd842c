#!/usr/bin/env python3
"""Regenerates classical/*.knot, *.gauss and *.pd.

Usage: scripts/gen_classical.py [outdir]   (default: classical/ next to this script)

Gauss and PD codes come from the projection to the (x, y)-plane, base point
at vertex 0.
"""
import math
import pathlib
import sys

DIGITS = 6


def jitter(i, n):
    # uneven spacing keeps projected crossings away from vertices
    return 2 * math.pi * (i + 0.37 * math.sin(1.3 * i + 0.2)) / n


def torus(p, q, n):
    pts = []
    for i in range(n):
        t = jitter(i, n)
        r = 2 + math.cos(q * t)
        pts.append((r * math.cos(p * t), r * math.sin(p * t), -math.sin(q * t)))
    return pts


def figure_eight(n):
    pts = []
    for i in range(n):
        t = jitter(i, n)
        r = 2 + math.cos(2 * t)
        pts.append((r * math.cos(3 * t), r * math.sin(3 * t), math.sin(4 * t)))
    return pts


def lissajous(nz, py, pz, n=40):
    pts = []
    for i in range(n):
        t = 2 * math.pi * (i + 0.31) / n
        pts.append((math.cos(3 * t), math.cos(2 * t + py), math.cos(nz * t + pz)))
    return pts


def unknot(n=12):
    pts = []
    for i in range(n):
        t = 2 * math.pi * (i + 0.25) / n
        pts.append((1.2 * math.cos(t), 0.8 * math.sin(t), 0.1 * math.sin(3 * t + 0.4)))
    return pts


KNOTS = {
    "unknot": unknot(),
    "3_1": torus(2, 3, 24),
    "4_1": figure_eight(36),
    "5_1": torus(2, 5, 40),
    "5_2": lissajous(7, 2 * math.pi / 20, 9 * math.pi / 20),
    "6_1": lissajous(5, 2 * math.pi / 20, 9 * math.pi / 20),
}


def rounded(pts):
    return [tuple(round(c, DIGITS) for c in p) for p in pts]


def cross2(a, b):
    return a[0] * b[1] - a[1] * b[0]


def crossings(pts):
    n = len(pts)
    out = []
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            p0, p1, q0, q1 = pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]
            u = (p1[0] - p0[0], p1[1] - p0[1])
            v = (q1[0] - q0[0], q1[1] - q0[1])
            w = (q0[0] - p0[0], q0[1] - p0[1])
            den = cross2(u, v)
            if den == 0:
                continue
            s, t = cross2(w, v) / den, cross2(w, u) / den
            if not (0 < s < 1 and 0 < t < 1):
                continue
            zi = p0[2] + s * (p1[2] - p0[2])
            zj = q0[2] + t * (q1[2] - q0[2])
            if zi > zj:
                over, under, d_over, d_under = i + s, j + t, u, v
            else:
                over, under, d_over, d_under = j + t, i + s, v, u
            out.append((over, under, 1 if cross2(d_over, d_under) > 0 else -1))
    return out


def gauss(pts):
    xs = crossings(pts)
    params = sorted(p for c in xs for p in c[:2])
    pos = {p: k for k, p in enumerate(params)}
    chords = [(pos[o], pos[u], s) for o, u, s in xs]
    return sorted(chords, key=lambda c: min(c[0], c[1]))


def pd(chords):
    n2 = 2 * len(chords)
    rows = []
    for o, u, s in chords:
        a, c = (n2 if u == 0 else u), u + 1
        o_in, o_out = (n2 if o == 0 else o), o + 1
        b, d = (o_out, o_in) if s > 0 else (o_in, o_out)
        rows.append((a, b, c, d, s))
    return rows


def main():
    here = pathlib.Path(__file__).resolve().parent
    out = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else here.parent / "classical"
    out.mkdir(parents=True, exist_ok=True)
    for name, pts in KNOTS.items():
        pts = rounded(pts)
        with open(out / f"{name}.knot", "w") as f:
            f.write("closed\n")
            for p in pts:
                f.write(" ".join(f"{c:.{DIGITS}f}" for c in p) + "\n")
        chords = gauss(pts)
        with open(out / f"{name}.gauss", "w") as f:
            f.write(f"# {name}: projection of {name}.knot to the (x, y)-plane\n")
            f.write(f"{len(chords)};\n")
            for o, u, s in chords:
                f.write(f"{o} {u} {'+' if s > 0 else '-'};\n")
        with open(out / f"{name}.pd", "w") as f:
            f.write(f"# {name}: projection of {name}.knot to the (x, y)-plane\n")
            for a, b, c, d, s in pd(chords):
                f.write(f"{a} {b} {c} {d} {'+' if s > 0 else '-'}\n")


if __name__ == "__main__":
    main()
