#!/usr/bin/env python3
#
# Copyright 2026 The wmcollide Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#
"""Recomputes the directional findings from the report CSVs alone.

Usage: recompute_summary.py OUT_DIR

Reads collision_matrix.csv, baselines.csv and paraphraser_baselines.csv,
derives every verdict independently and checks that summary.txt states the
same verdicts. Exits 1 on any mismatch.
"""

import csv
import sys
from pathlib import Path


def rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def label(kind, strength):
    return f"{kind}_{strength}"


def verdicts(out):
    cells = rows(out / "collision_matrix.csv")
    base = {(label(r["w_kind"], r["w_strength"]), float(r["fpr_target"])): r
            for r in rows(out / "baselines.csv")}
    pbase = {(label(r["p_kind"], r["p_strength"]), float(r["fpr_target"])): r
             for r in rows(out / "paraphraser_baselines.csv")}
    got = {}
    by_w = {}
    for c in cells:
        w = label(c["w_kind"], c["w_strength"])
        p = label(c["p_kind"], c["p_strength"])
        fpr = float(c["fpr_target"])
        dw, dp = float(c["tpr_dw"]), float(c["tpr_dp"])
        by_w.setdefault((w, fpr), {"weak": [], "strong": []})[c["p_strength"]].append(dw)
        if c["p_strength"] != "weak":
            continue
        if c["w_strength"] == "weak":
            held = (dw < float(base[(w, fpr)]["tpr_tw"])
                    and dp < float(pbase[(p, fpr)]["tpr_fresh"]))
            got[("competition", f"w={w} p={p}", fpr)] = held
        else:
            held = dp < float(pbase[(p, fpr)]["tpr_unwatermarked_source"])
            got[("weak watermark probe", f"w={w} p={p}", fpr)] = held
    for (w, fpr), b in base.items():
        tw, tpp, tp = (float(b[k]) for k in ("tpr_tw", "tpr_tp_prime", "tpr_tp"))
        got[("paraphrase degradation", f"w={w}", fpr)] = tw > tpp > tp
    for (w, fpr), d in by_w.items():
        if d["weak"] and d["strong"]:
            mean = lambda xs: sum(xs) / len(xs)
            got[("upstream erasure", f"w={w}", fpr)] = mean(d["strong"]) < mean(d["weak"])
    return got


def stated(out):
    result = {}
    for line in (out / "summary.txt").read_text().splitlines():
        parts = [p.strip() for p in line.split("|")]
        if len(parts) != 5:
            continue
        finding, who, fpr, verdict, _ = parts
        result[(finding, who, float(fpr.removeprefix("fpr=")))] = verdict == "held"
    return result


def main():
    if len(sys.argv) != 2:
        print(__doc__, file=sys.stderr)
        return 2
    out = Path(sys.argv[1])
    got, said = verdicts(out), stated(out)
    bad = 0
    for key in sorted(set(got) | set(said), key=str):
        if got.get(key) != said.get(key):
            print(f"mismatch {key}: recomputed={got.get(key)} summary={said.get(key)}")
            bad += 1
    held = sum(got.values())
    print(f"recomputed {len(got)} findings, {held} held, {bad} mismatches")
    return 1 if bad or not got else 0


if __name__ == "__main__":
    sys.exit(main())
