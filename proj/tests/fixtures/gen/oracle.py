# Copyright 2026 The Coop Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Brute-force reference metrics used to design the shipped fixtures.

Written independently of the C++ library: plain loops, no shared code.
"""

import json
import os
import struct


def png_size(path):
    with open(path, "rb") as f:
        head = f.read(24)
    return struct.unpack(">II", head[16:24])


def iou(a, b):
    iw = max(0.0, min(a[2], b[2]) - max(a[0], b[0]))
    ih = max(0.0, min(a[3], b[3]) - max(a[1], b[1]))
    inter = iw * ih
    union = (a[2] - a[0]) * (a[3] - a[1]) + (b[2] - b[0]) * (b[3] - b[1]) - inter
    return inter / union if union > 0 else 0.0


def load_gt(root):
    """{image_id: [(class_id, box)]} with boxes in clipped pixels."""
    out = {}
    for name in sorted(os.listdir(os.path.join(root, "images"))):
        stem = os.path.splitext(name)[0]
        w, h = png_size(os.path.join(root, "images", name))
        boxes = []
        label = os.path.join(root, "labels", stem + ".txt")
        if os.path.exists(label):
            for line in open(label):
                if not line.strip():
                    continue
                c, cx, cy, bw, bh = line.split()
                cx, cy, bw, bh = float(cx), float(cy), float(bw), float(bh)
                box = [(cx - bw / 2) * w, (cy - bh / 2) * h,
                       (cx + bw / 2) * w, (cy + bh / 2) * h]
                box = [min(max(box[0], 0), w), min(max(box[1], 0), h),
                       min(max(box[2], 0), w), min(max(box[3], 0), h)]
                boxes.append((int(c), box))
        out[stem] = boxes
    return out


def load_dets(path):
    dets = []
    for line in open(path):
        if line.strip():
            d = json.loads(line)
            dets.append((d["image_id"], d["class_id"], d["confidence"], d["box"]))
    return dets


IOU_GRID = [(50 + 5 * k) / 100.0 for k in range(10)]


def match(gt, dets, grid=IOU_GRID):
    """[(class, conf, image_id, x_min, [tp per threshold])], n_gt per class."""
    per_image = {}
    for d in dets:
        per_image.setdefault(d[0], []).append(d)
    n_gt = {}
    for img, boxes in gt.items():
        for c, _ in boxes:
            n_gt[c] = n_gt.get(c, 0) + 1
    out = []
    for img in sorted(set(per_image) | set(gt)):
        preds = sorted(per_image.get(img, []), key=lambda d: (-d[2], d[3][0]))
        gts = gt.get(img, [])
        taken = [False] * len(gts)
        for _, c, conf, box in preds:
            best, best_iou = None, -1.0
            for g, (gc, gbox) in enumerate(gts):
                if taken[g] or gc != c:
                    continue
                v = iou(box, gbox)
                if v >= grid[0] and v > best_iou:
                    best, best_iou = g, v
            flags = [False] * len(grid)
            if best is not None:
                taken[best] = True
                flags = [best_iou >= t for t in grid]
            out.append((c, conf, img, box[0], flags))
    return out, n_gt


def ap101(flags, n_gt):
    """101-point interpolated AP for a ranked list of TP flags."""
    if n_gt == 0:
        return None if not flags else 0.0
    recalls, precisions = [], []
    tp = 0
    for i, f in enumerate(flags):
        tp += 1 if f else 0
        recalls.append(tp / n_gt)
        precisions.append(tp / (i + 1))
    total = 0.0
    for k in range(101):
        r = k / 100.0
        best = 0.0
        for rr, pp in zip(recalls, precisions):
            if rr >= r and pp > best:
                best = pp
        total += best
    return total / 101


def class_metrics(matched, n_gt, num_classes, report_conf=0.25):
    rows = []
    for c in range(num_classes):
        mine = sorted([m for m in matched if m[0] == c],
                      key=lambda m: (-m[1], m[2], m[3]))
        g = n_gt.get(c, 0)
        above = [m for m in mine if m[1] >= report_conf]
        tp = sum(1 for m in above if m[4][0])
        p = tp / len(above) if above else 1.0
        r = tp / g if g else 0.0
        aps = [ap101([m[4][k] for m in mine], g) for k in range(len(IOU_GRID))]
        if aps[0] is None:
            rows.append(dict(P=p, R=r, ap50=None, ap50_95=None))
        else:
            rows.append(dict(P=p, R=r, ap50=aps[0], ap50_95=sum(aps) / len(aps)))
    return rows


def sweep(matched, n_gt, num_classes, points=1001):
    """Pooled F1 over the confidence grid; returns (best_f1, best_conf)."""
    total_gt = sum(n_gt.values())
    best = None
    for i in range(points):
        c = i / (points - 1)
        n = sum(1 for m in matched if m[1] >= c)
        tp = sum(1 for m in matched if m[1] >= c and m[4][0])
        p = tp / n if n else 1.0
        r = tp / total_gt if total_gt else 0.0
        f = 2 * p * r / (p + r) if p + r > 0 else 0.0
        if best is None or f > best[0]:
            best = (f, c)
    return best


def confusion(gt, dets, num_classes, conf=0.25, iou_thr=0.45):
    k = num_classes
    cm = [[0] * (k + 1) for _ in range(k + 1)]
    per_image = {}
    for d in dets:
        if d[2] >= conf:
            per_image.setdefault(d[0], []).append(d)
    for img in sorted(set(per_image) | set(gt)):
        preds = sorted(per_image.get(img, []), key=lambda d: (-d[2], d[1]))
        gts = gt.get(img, [])
        pairs = []
        for pi, p in enumerate(preds):
            for gi, (gc, gbox) in enumerate(gts):
                v = iou(p[3], gbox)
                if v >= iou_thr:
                    pairs.append((-v, pi, gi))
        pairs.sort()
        pu, gu = set(), set()
        for _, pi, gi in pairs:
            if pi in pu or gi in gu:
                continue
            pu.add(pi)
            gu.add(gi)
            cm[preds[pi][1]][gts[gi][0]] += 1
        for pi, p in enumerate(preds):
            if pi not in pu:
                cm[p[1]][k] += 1
        for gi, (gc, _) in enumerate(gts):
            if gi not in gu:
                cm[k][gc] += 1
    return cm
