#!/usr/bin/env python3
"""Reference statistics for an annotation file, computed without the C++ code.

FocusPixel maps use a per-cell overlap test, components and dilation come from
scipy.ndimage. Output is the JSON consumed by the acceptance suite.
"""
import argparse
import json
import math

import numpy as np
from scipy import ndimage

STRIDE = 16
A, B, C = 5.0, 64.0, 90.0
# (kind, value): "max_side" pixels or "factor"
PYRAMID = [("max_side", 512), ("factor", 1.667), ("factor", 3.0)]
MIN_CHIPS = [64, 128, 192, 256, 320, 384, 448, 512]
DILATION = 3
SMALL, LARGE = 32.0 * 32.0, 96.0 * 96.0


def load(path):
    doc = json.load(open(path))
    sizes = {im["id"]: (im["width"], im["height"]) for im in doc["images"]}
    boxes = {i: [] for i in sizes}
    for a in doc["annotations"]:
        w, h = sizes[a["image_id"]]
        x, y, bw, bh = a["bbox"]
        x1, y1, x2, y2 = x, y, x + bw, y + bh
        x1, x2 = min(max(x1, 0.0), w), min(max(x2, 0.0), w)
        y1, y2 = min(max(y1, 0.0), h), min(max(y2, 0.0), h)
        x2, y2 = max(x2, x1), max(y2, y1)
        boxes[a["image_id"]].append((x1, y1, x2, y2, bool(a.get("iscrowd", 0))))
    return [(sizes[i], boxes[i]) for i in sorted(sizes)]


def canvas(size, level):
    w, h = size
    kind, v = level
    f = v / max(w, h) if kind == "max_side" else v
    return max(1, math.floor(w * f + 0.5)), max(1, math.floor(h * f + 0.5))


def label_map(size, boxes, cv):
    w, h = size
    cw, ch = cv
    fx, fy = cw / w, ch / h
    gw, gh = -(-cw // STRIDE), -(-ch // STRIDE)
    cols = np.arange(gw, dtype=float) * STRIDE
    rows = np.arange(gh, dtype=float) * STRIDE
    has_focus = np.zeros((gh, gw), bool)
    has_ignore = np.zeros((gh, gw), bool)
    for x1, y1, x2, y2, _ in boxes:
        x1, x2, y1, y2 = x1 * fx, x2 * fx, y1 * fy, y2 * fy
        side = math.sqrt(max(0.0, (x2 - x1) * (y2 - y1)))
        if A < side < B:
            target = has_focus
        elif side <= A or side <= C:
            target = has_ignore
        else:
            continue
        cx = (cols < x2) & (cols + STRIDE > x1)
        cy = (rows < y2) & (rows + STRIDE > y1)
        if x2 > x1 and y2 > y1:
            target |= np.outer(cy, cx)
    labels = np.zeros((gh, gw), np.int8)
    labels[has_ignore] = -1
    labels[has_focus] = 1
    return labels


def grow(lo, hi, k, limit):
    if hi - lo < k:
        g = 0.5 * (k - (hi - lo))
        lo, hi = lo - g, hi + g
    if hi - lo >= limit:
        return 0.0, float(limit)
    if lo < 0.0:
        lo, hi = 0.0, hi - lo
    if hi > limit:
        lo, hi = lo - (hi - limit), float(limit)
    return lo, hi


def boxes_overlap(a, b):
    return min(a[2], b[2]) > max(a[0], b[0]) and min(a[3], b[3]) > max(a[1], b[1])


def focus_chips(focus, cv, k):
    cw, ch = cv
    grown = ndimage.binary_dilation(focus, structure=np.ones((DILATION, DILATION), bool))
    lab, _ = ndimage.label(grown, structure=np.ones((3, 3), int))
    rects = []
    for sl in ndimage.find_objects(lab):
        x1 = min(sl[1].start * STRIDE, cw)
        x2 = min(sl[1].stop * STRIDE, cw)
        y1 = min(sl[0].start * STRIDE, ch)
        y2 = min(sl[0].stop * STRIDE, ch)
        x1, x2 = grow(float(x1), float(x2), k, cw)
        y1, y2 = grow(float(y1), float(y2), k, ch)
        rects.append((x1, y1, x2, y2))
    # Union-find style closure: merge any overlapping pair until stable.
    changed = True
    while changed:
        changed = False
        out = []
        for r in rects:
            for i, o in enumerate(out):
                if boxes_overlap(r, o):
                    out[i] = (min(r[0], o[0]), min(r[1], o[1]), max(r[2], o[2]), max(r[3], o[3]))
                    changed = True
                    break
            else:
                out.append(r)
        rects = out
    return rects


def main():
    p = argparse.ArgumentParser()
    p.add_argument("annotations")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--out", help="write the reference JSON here")
    group.add_argument("--check", help="recompute and compare with this frozen reference")
    args = p.parse_args()
    data = load(args.annotations)

    small_n = total_n = 0
    small_area = image_area = 0.0
    for (w, h), boxes in data:
        image_area += w * h
        for x1, y1, x2, y2, crowd in boxes:
            if crowd:
                continue
            area = (x2 - x1) * (y2 - y1)
            total_n += 1
            if area < SMALL:
                small_n += 1
                small_area += area

    levels = []
    maps = []  # maps[image][level] -> (canvas, focus bool array)
    for size, boxes in data:
        per = []
        for lv in PYRAMID:
            cv = canvas(size, lv)
            per.append((cv, label_map(size, boxes, cv) == 1))
        maps.append(per)
    for li in range(len(PYRAMID)):
        cells = focus = dilated = 0
        for per in maps:
            m = per[li][1]
            cells += m.size
            focus += int(m.sum())
            dilated += int(ndimage.binary_dilation(
                m, structure=np.ones((DILATION, DILATION), bool)).sum())
        levels.append({"scale_id": li, "cells": cells, "focus_cells": focus,
                       "dilated_focus_cells": dilated, "fraction": focus / cells,
                       "dilated_fraction": dilated / cells})

    curve = []
    for k in MIN_CHIPS:
        processed = baseline = 0.0
        for per in maps:
            for li, (cv, _) in enumerate(per):
                baseline += cv[0] * cv[1]
                if li == 0:
                    processed += cv[0] * cv[1]
                    continue
                src_cv, src = per[li - 1]
                fx, fy = cv[0] / src_cv[0], cv[1] / src_cv[1]
                for x1, y1, x2, y2 in focus_chips(src, src_cv, k):
                    X1, X2 = min(max(x1 * fx, 0.0), cv[0]), min(max(x2 * fx, 0.0), cv[0])
                    Y1, Y2 = min(max(y1 * fy, 0.0), cv[1]), min(max(y2 * fy, 0.0), cv[1])
                    processed += max(0.0, X2 - X1) * max(0.0, Y2 - Y1)
        n = len(maps)
        curve.append({"min_chip": k, "processed": processed / n, "baseline": baseline / n,
                      "speedup": baseline / processed})

    out = {
        "annotations": args.annotations.split("/")[-1],
        "images": len(data),
        "instances": total_n,
        "small_instance_fraction": small_n / total_n,
        "small_area_fraction": small_area / image_area,
        "focus_pixels": levels,
        "speedup_curve": curve,
    }
    if args.check:
        frozen = json.load(open(args.check))
        bad = compare(out, frozen, "")
        for line in bad:
            print("mismatch:", line)
        print("reference matches" if not bad else "reference differs")
        raise SystemExit(1 if bad else 0)
    with open(args.out, "w") as f:
        json.dump(out, f, indent=2)
        f.write("\n")


def compare(got, want, where, rel=1e-12):
    if isinstance(want, dict):
        if not isinstance(got, dict) or set(got) != set(want):
            return [f"{where}: keys differ"]
        return [m for k in want for m in compare(got[k], want[k], f"{where}/{k}", rel)]
    if isinstance(want, list):
        if not isinstance(got, list) or len(got) != len(want):
            return [f"{where}: length differs"]
        return [m for i, (g, w) in enumerate(zip(got, want)) for m in compare(g, w, f"{where}/{i}", rel)]
    if isinstance(want, float) or isinstance(got, float):
        if abs(got - want) > rel * max(1.0, abs(want)):
            return [f"{where}: {got} != {want}"]
        return []
    return [] if got == want else [f"{where}: {got!r} != {want!r}"]


if __name__ == "__main__":
    main()
