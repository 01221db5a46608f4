#!/usr/bin/env python3
"""Runs every fspgemm command and validates the JSON reports against the schema.

Also checks that the exit code is 0 exactly when the report has no error
object, and that --deterministic reports are byte-identical across runs.
Exits 77 when the jsonschema package is unavailable.
"""

import argparse
import json
import subprocess
import sys
from pathlib import Path

try:
    import jsonschema
except ImportError:
    print("jsonschema not installed; skipping")
    sys.exit(77)


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", required=True)
    ap.add_argument("--schema", required=True, type=Path)
    ap.add_argument("--data", required=True, type=Path)
    ap.add_argument("--scratch", required=True, type=Path)
    args = ap.parse_args()

    schema = json.loads(args.schema.read_text())
    validator = jsonschema.Draft202012Validator(schema)
    data, scratch = args.data, args.scratch
    scratch.mkdir(parents=True, exist_ok=True)
    probe = scratch / "probe.csv"
    probe.write_text("sw,num_pe,logic_units\n16,1,1600\n")

    cases = [
        ["convert", "--in", data / "example4.mtx", "--out", scratch / "s.fcsv", "--vec-width", "2"],
        ["convert", "--in", data / "example4.mtx", "--out", scratch / "s.fcsv", "--vec-width", "0"],
        ["convert", "--in", data / "missing.mtx", "--out", scratch / "s.fcsv", "--vec-width", "2"],
        ["multiply", "--a", data / "sym3.mtx", "--b", data / "sym3.mtx"],
        ["multiply", "--a", data / "sym3.mtx", "--b", data / "sym3.mtx", "--engine", "oracle"],
        ["multiply", "--a", data / "example4.mtx", "--b", data / "example4.mtx", "--engine", "simulate",
         "--sw", "2", "--num-pe", "2", "--out", scratch / "c.fcsv"],
        ["multiply", "--a", data / "diag2.mtx", "--b", data / "example4.mtx"],
        ["multiply", "--a", data / "diag2.mtx"],
        ["omar", "--matrix", data / "example4.mtx", "--matrix", data / "sym3.mtx"],
        ["omar", "--matrix", data / "example4.mtx", "--pes", "0"],
        ["optimize", "--bandwidth-gbps", "15", "--freq-mhz", "236", "--logic-budget", "51200", "--beta", "100"],
        ["optimize", "--bandwidth-gbps", "15", "--freq-mhz", "236", "--logic-budget", "51200",
         "--probe-table", probe],
        ["optimize", "--bandwidth-gbps", "15", "--freq-mhz", "236", "--logic-budget", "51200"],
        ["stuf", "--nops", "1e9", "--freq-mhz", "236", "--parallelism", "3036", "--runtime-ms", "5"],
        ["stuf", "--a", data / "example4.mtx", "--freq-mhz", "236", "--parallelism", "3036", "--runtime-ms", "5"],
        ["stuf", "--nops", "0", "--freq-mhz", "236", "--parallelism", "3036", "--runtime-ms", "5"],
        ["generate", "--rows", "20", "--cols", "20", "--density", "0.1", "--out", scratch / "g.mtx"],
        ["bogus"],
    ]

    failures = 0
    for case in cases:
        argv = [args.cli, "--deterministic", "--seed", "3"] + [str(a) for a in case]
        runs = [subprocess.run(argv, capture_output=True, text=True) for _ in range(2)]
        first = runs[0]
        label = " ".join(str(a) for a in case[:1] + case[1:4])
        try:
            report = json.loads(first.stdout)
        except json.JSONDecodeError as exc:
            print(f"FAIL {label}: stdout is not JSON ({exc})")
            failures += 1
            continue
        errors = sorted(validator.iter_errors(report), key=lambda e: list(e.path))
        has_error = "error" in report
        problems = [f"schema: {e.message} at {list(e.path)}" for e in errors]
        if (first.returncode == 0) == has_error:
            problems.append(f"exit code {first.returncode} but error object present={has_error}")
        if runs[1].stdout != first.stdout:
            problems.append("report differs between identical invocations")
        if problems:
            failures += 1
            print(f"FAIL {label}: " + "; ".join(problems))
        else:
            print(f"ok   {label} (exit {first.returncode})")
    print(f"{len(cases) - failures}/{len(cases)} reports valid")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
