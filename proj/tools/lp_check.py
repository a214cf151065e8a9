#!/usr/bin/env python3
# Copyright 2026 The eqsched Authors
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
"""Cross-checks an exported LP model against an exact schedule with HiGHS.

For every program the script runs `synth export-lp` and `synth --solver exact`,
then loads the LP file into HiGHS twice: once free, once with the node
variables pinned to the exact schedule. The pinned model must be feasible at
the exact objective latency + alpha * impl_count. The free optimum must equal
it, or stay at or below it when timing closure added paths the exported model
does not carry.
"""

import argparse
import json
import pathlib
import re
import subprocess
import sys
import tempfile

import highspy


def solve(lp_path, pins=None, time_limit=60.0):
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("time_limit", time_limit)
    h.setOptionValue("mip_rel_gap", 0.0)
    if h.readModel(str(lp_path)) != highspy.HighsStatus.kOk:
        raise RuntimeError(f"HiGHS cannot read {lp_path}")
    if pins is not None:
        lp = h.getLp()
        for i, name in enumerate(lp.col_names_):
            m = re.fullmatch(r"([bsf])_n(\d+)", name)
            if not m:
                continue
            kind, node = m.group(1), int(m.group(2))
            v = pins.get(node, {}).get(kind, 0.0 if kind == "b" else None)
            if v is not None:
                h.changeColBounds(i, v, v)
    h.run()
    status = h.getModelStatus()
    if status != highspy.HighsModelStatus.kOptimal:
        return None
    return h.getInfo().objective_function_value


def check(synth, lib, program, clock_mhz, out, tol):
    base = [synth, str(program), "--lib", str(lib), "--clock-mhz", str(clock_mhz), "-q", "-o", str(out)]
    subprocess.run(base[:1] + ["export-lp"] + base[1:], check=True)
    subprocess.run(base + ["--solver", "exact"], check=True)
    stem = program.stem
    lp_path = out / f"{stem}.lp"
    sched = json.loads((out / f"{stem}.sched.json").read_text())
    header = lp_path.read_text().splitlines()[1]
    alpha = float(re.search(r"alpha = (\S+)", header).group(1))
    expected = sched["latency"] + alpha * sched["impl_count"]
    pins = {s["enode"]: {"b": 1.0, "s": float(s["start"]), "f": float(s["finish"])} for s in sched["selected"]}
    pinned = solve(lp_path, pins)
    free = solve(lp_path)
    closure = sched.get("closure_paths", 0)
    ok = pinned is not None and free is not None and abs(pinned - expected) <= tol
    if ok:
        ok = free <= expected + tol if closure else abs(free - expected) <= tol
    print(f"{stem} @ {clock_mhz:g} MHz: exact {expected:.6f} pinned {pinned} free {free} "
          f"closure paths {closure} {'ok' if ok else 'MISMATCH'}")
    return ok


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--synth", required=True)
    ap.add_argument("--lib", required=True)
    ap.add_argument("--clock-mhz", type=float, nargs="+", default=[100.0, 200.0, 400.0])
    ap.add_argument("--tol", type=float, default=1e-6)
    ap.add_argument("programs", nargs="+", type=pathlib.Path)
    args = ap.parse_args()
    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        for clk in args.clock_mhz:
            for p in args.programs:
                out = pathlib.Path(tmp) / f"{p.stem}_{clk:g}"
                out.mkdir()
                failures += not check(args.synth, args.lib, p, clk, out, args.tol)
    print(f"{failures} mismatches")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
