#!/usr/bin/env python3
"""Regenerates knots/*.diagram.

Usage: scripts/gen_diagrams.py [outdir]   (default: knots/ next to this script)
"""
import json
import math
import pathlib
import sys

DIGITS = 6


def pt(x, y):
    return [round(x, DIGITS), round(y, DIGITS)]


def circle(cx, cy, r, phase, n=64, ccw=True):
    s = 1 if ccw else -1
    return [pt(cx + r * math.cos(phase + s * 2 * math.pi * i / n),
               cy + r * math.sin(phase + s * 2 * math.pi * i / n)) for i in range(n)]


def diagram(name, note=""):
    d = {"name": name}
    if note:
        d["note"] = note
    d.update({"curves": [], "edges": [], "pairings": [], "triple_vertices": []})
    return d


def add_full(d, cid, c, label):
    d["curves"].append({"id": cid, "closed": True, "vertices": circle(*c)})
    d["edges"].append({"id": cid, "curve": cid, "t0": 0.0, "t1": 1.0, "label": label})


def pair(d, over, under, orientation):
    d["pairings"].append({"over": over, "under": under, "orientation": orientation})


# Six circles: three over/under pairs (A,D) (B,E) (C,F).
CIRCLES_8_1 = {
    "A": (-0.25, 0.04, 0.22, 4.65), "B": (0.33, -0.15, 0.125, 1.31),
    "C": (-0.03, 0.65, 0.255, 2.18), "D": (0.56, 0.13, 0.157, 3.57),
    "E": (-0.71, -0.03, 0.187, 1.34), "F": (-0.07, -0.58, 0.156, 1.57),
}

CIRCLES_9_1 = {
    "A": (0.0030, 0.0699, 0.2281, 4.5122), "B": (0.1869, -0.5721, 0.2410, 4.3029),
    "C": (0.6795, -0.0044, 0.2328, 0.2058), "D": (-0.5021, -0.3320, 0.2575, 0.2110),
    "E": (-0.5095, 0.5718, 0.1350, 5.1585), "F": (0.1946, 0.5251, 0.1795, 2.2429),
    "G": (-0.1579, 0.6807, 0.1431, 0.8220),
}

LABELS = {"A": "under", "B": "over", "C": "under", "D": "over", "E": "under", "F": "over"}


def knot_8_1():
    d = diagram("8_1")
    for k, c in CIRCLES_8_1.items():
        add_full(d, k, c, LABELS[k])
    for o, u in (("D", "A"), ("B", "E"), ("F", "C")):
        pair(d, o, u, "preserving")
    return d


def knot_9_1():
    d = diagram("9_1")
    for k in "ABCDEF":
        add_full(d, k, CIRCLES_9_1[k], LABELS[k])
    d["curves"].append({"id": "G", "closed": True, "vertices": circle(*CIRCLES_9_1["G"])})
    d["edges"].append({"id": "G+", "curve": "G", "t0": 0.0, "t1": 0.5, "label": "over"})
    d["edges"].append({"id": "G-", "curve": "G", "t0": 0.5, "t1": 1.0, "label": "under"})
    for o, u in (("D", "A"), ("B", "E"), ("F", "C"), ("G+", "G-")):
        pair(d, o, u, "reversing")
    return d


# Eight nested circles, innermost first.
CIRCLES_10_1 = [
    (0.0742, -0.0841, 0.1104, 3.7163), (0.0819, -0.1410, 0.2195, 2.8895),
    (0.1058, -0.1361, 0.3200, 4.8715), (0.1252, -0.1706, 0.3922, 5.1513),
    (0.1242, -0.1703, 0.5076, 2.1236), (0.1286, -0.1059, 0.6127, 5.4147),
    (0.1424, -0.1180, 0.6918, 1.0856), (0.1256, -0.0828, 0.8024, 2.6472),
]


def knot_10_1():
    d = diagram("10_1")
    for i, c in enumerate(CIRCLES_10_1, 1):
        add_full(d, f"C{i}", c, "over" if i <= 4 else "under")
    for o, u in ((1, 6), (2, 5), (3, 8), (4, 7)):
        pair(d, f"C{o}", f"C{u}", "preserving")
    return d


def venn(name, note, gadgets, k1, k2, names, per_arc=6, smooth=(False, True, True)):
    """Three circle/wave gadgets; gadget g has circle K_g and wave W_g meeting at six points."""
    d = diagram(name, note)
    arc = math.pi / 3
    for gi, (cx, cy, r, a, psi) in enumerate(gadgets):
        def gp(th, wave):
            rr = r + a * math.cos(3 * (th - psi)) if wave else r
            return pt(cx + rr * math.cos(th), cy + rr * math.sin(th))
        for side in (0, 1):
            verts = []
            for j in range(6):
                th0 = psi + math.pi / 6 + j * arc
                wave_outer = math.cos(3 * (arc + j * arc)) > 0
                use_wave = (side == 1) == wave_outer if smooth[gi] else side == 1
                for i in range(per_arc):
                    verts.append(gp(th0 + arc * i / per_arc, use_wave and i > 0))
                if gi == 0:
                    label = "over"
                elif gi == 2:
                    label = "under"
                else:
                    label = "over" if use_wave else "under"
                d["edges"].append({"id": f"{'W' if use_wave else 'K'}{gi + 1}.{j}", "curve": names[gi][side],
                                   "t0": j / 6, "t1": (j + 1) / 6, "label": label})
            d["curves"].append({"id": names[gi][side], "closed": True, "vertices": verts})
    k3 = k2 - k1
    for j in range(6):
        pair(d, f"K1.{j}", f"K2.{(j + k1) % 6}", "preserving")
        pair(d, f"W1.{j}", f"K3.{(j + k2) % 6}", "preserving")
        pair(d, f"W2.{j}", f"W3.{(j + k3) % 6}", "preserving")
    for j in range(6):
        d["triple_vertices"].append({
            "id": f"T{j + 1}",
            "incident": [{"curve": names[0][0], "t": j / 6},
                         {"curve": names[1][0], "t": ((j + k1) % 6) / 6},
                         {"curve": names[2][0], "t": ((j + k2) % 6) / 6}],
            "heights": ["top", "middle", "bottom"]})
    return d


COLOURS = (("orange", "green"), ("purple", "blue"), ("red", "brown"))
NOTE = "best-effort reconstruction; geometry chosen to realize the published counts"


def knot_10_2():
    r1, r2, phi, dx, psi = 0.2999796, 0.1524293, 0.6758041, -0.1191268, 0.3534292
    gadgets = [(-0.30, -0.40, r1, 0.05, psi), (-0.30 + dx, 0.28, r2, 0.04, psi + phi), (0.60, 0.0, 0.2, 0.05, 1.0)]
    return venn("10_2", NOTE, gadgets, 0, 0, COLOURS)


def knot_10_3():
    gadgets = [(-0.60, -0.15, 0.2, 0.04, 0.4), (0.0, 0.35, 0.2, 0.04, 1.3), (0.60, -0.10, 0.2, 0.04, 2.1)]
    return venn("10_3", NOTE, gadgets, 2, 4, COLOURS)


def main():
    out = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parent.parent / "knots"
    out.mkdir(parents=True, exist_ok=True)
    for d in (diagram("0_1"), knot_8_1(), knot_9_1(), knot_10_1(), knot_10_2(), knot_10_3()):
        (out / f"{d['name']}.diagram").write_text(json.dumps(d, indent=1) + "\n")


if __name__ == "__main__":
    main()
