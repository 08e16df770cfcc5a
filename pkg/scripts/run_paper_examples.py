#!/usr/bin/env python3
"""Run the bundled corpus end to end and write the derived artifacts
(structure reports, coefficient dumps, asymptotic-law diagnostics) under
out/.  A compact summary table is printed at the end.

    python3 scripts/run_paper_examples.py [--entry ID] [--out DIR]
"""

import argparse
import json
import pathlib
import sys
import time

from qalg.corpus import ENTRIES, get_entry, run_entry
from qalg.errors import QalgError
from qalg.jobs import JobConfig, PreparedJob, asym_job, prepare, solve_job


def run_one(entry, outdir):
    t0 = time.time()
    edir = outdir / entry.id
    edir.mkdir(parents=True, exist_ok=True)
    (edir / "equation.eq").write_text(entry.equation + "\n")
    job = prepare(entry.equation, entry.config)
    (edir / "structure.json").write_text(
        json.dumps(job.report.to_json(), indent=1) + "\n")
    sol = solve_job(job)
    (edir / "coefficients.csv").write_text(sol.to_csv())
    rows = []
    if job.report.classification and \
            job.report.classification.kind == "DivergentCandidate":
        try:
            law, nsol = asym_job(job)
            need = 4 * law.period + 40
            if nsol.N < need:
                # the empirical table needs several full periods
                cfg = JobConfig(**{**entry.config.__dict__, "N": need})
                law, nsol = asym_job(PreparedJob(cfg, job.input_poly,
                                                 job.trace, job.leaf,
                                                 job.report))
            (edir / "law.json").write_text(json.dumps(law.to_json(), indent=1) + "\n")
            from qalg.asymptotics import empirical_constants
            emp = empirical_constants(nsol.coeffs, law.zeta0, law.period,
                                      prec=entry.config.precision_bits)
            (edir / "normalized.csv").write_text(emp.csv)
        except QalgError as exc:
            rows.append(("law", False, str(exc)))
    for tag, desc, ok, detail in run_entry(entry):
        rows.append((f"[{tag}] {desc}", ok, detail))
    return rows, time.time() - t0


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--entry", default=None)
    ap.add_argument("--out", default="out")
    args = ap.parse_args()
    outdir = pathlib.Path(args.out)
    entries = [get_entry(args.entry)] if args.entry else ENTRIES
    failures = 0
    for entry in entries:
        rows, dt = run_one(entry, outdir)
        print(f"== {entry.id} ({entry.title})  [{dt:.1f} s]")
        for desc, ok, detail in rows:
            mark = "ok " if ok else "FAIL"
            print(f"  {mark} {desc}" + (f"  -- {detail}" if detail else ""))
            failures += 0 if ok else 1
    print(f"\nartifacts under {outdir}/; {failures} failure(s)")
    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    main()
