"""Run every subcommand on the fixtures and validate each report against the schema.

usage: validate_reports.py TOOL SCHEMA FIXTURE_DIR CV_FILE
"""

import json
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema


def commands(fx: Path, work: Path):
    return [
        ["describe", fx / "two_col.csv", "--max-lag", "4"],
        ["fit-ar", fx / "ar1.csv", "--col", "y", "--p", "2"],
        ["select-lag", fx / "ar1.csv", "--col", "y", "--p-max", "4"],
        ["select-lag", fx / "var2.csv", "--cols", "a,b", "--p-max", "3", "--criterion", "aic"],
        ["forecast", fx / "ar1.csv", "--col", "y", "--horizon", "4", "--poos-split", "0.75"],
        ["adf", fx / "random_walk.csv", "--col", "y"],
        ["adf", fx / "ar1.csv", "--col", "y", "--det", "trend", "--lags", "2", "--cv-reps", "2000", "--cv-tsim", "200"],
        ["chow", fx / "ar_break.csv", "--col", "y", "--tau", "150"],
        ["qlr", fx / "ar_break.csv", "--col", "y", "--emit-csv", work / "qlr_path.csv"],
        ["fit-var", fx / "var2.csv", "--cols", "a,b", "--p", "2"],
        ["forecast-var", fx / "var2.csv", "--cols", "a,b", "--horizon", "6", "--emit-csv", work / "fvar.csv"],
        ["granger", fx / "granger_independent.csv", "--cause", "x", "--effect", "y", "--p", "4"],
        ["integration-order", fx / "random_walk.csv", "--col", "y"],
        ["coint", fx / "coint_pair.csv", "--y", "y", "--x", "x"],
        ["dols", fx / "coint_pair.csv", "--y", "y", "--x", "x", "--p", "2"],
        ["simulate", "--kind", "var", "--A", "0.5,0.1;0,0.4", "--T", "50", "--seed", "3"],
        ["simulate", "--kind", "cointegrated-pair", "--T", "50", "--emit-csv", work / "sim.csv"],
        ["mc-critical", "--stat", "eg_adf", "--m", "2", "--T", "100", "--reps", "1000", "--seed", "4"],
        ["mc-critical", "--stat", "qlr", "--p", "1", "--T", "100", "--reps", "1000", "--seed", "4", "--no-timestamp"],
    ]


def main() -> int:
    tool, schema_path, fixtures, cv_file = sys.argv[1:5]
    schema = json.loads(Path(schema_path).read_text())
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    seen = set()
    with tempfile.TemporaryDirectory() as tmp:
        work = Path(tmp)
        cv_copy = work / "cv.txt"
        shutil.copyfile(cv_file, cv_copy)
        for cmd in commands(Path(fixtures), work):
            args = [tool] + [str(a) for a in cmd] + ["--cv-file", str(cv_copy)]
            proc = subprocess.run(args, capture_output=True, text=True)
            label = " ".join(str(a) for a in cmd[:2])
            if proc.returncode != 0:
                print(f"FAIL {label}: exit {proc.returncode}: {proc.stderr.strip()}")
                failures += 1
                continue
            report = json.loads(proc.stdout)
            errors = sorted(validator.iter_errors(report), key=lambda e: list(e.path))
            for e in errors:
                print(f"FAIL {label}: {'/'.join(map(str, e.path))}: {e.message}")
            if "--emit-csv" in cmd and not Path(report.get("emitted_csv", "")).is_file():
                print(f"FAIL {label}: emitted CSV missing")
                failures += 1
            if ("--no-timestamp" in cmd) == ("generated_at" in report):
                print(f"FAIL {label}: generated_at presence does not follow --no-timestamp")
                failures += 1
            failures += bool(errors)
            seen.add(cmd[0])
            if not errors:
                print(f"ok   {label}")
    expected = set(schema["properties"]["command"]["properties"]["name"]["enum"])
    if seen != expected:
        print(f"FAIL subcommands not exercised: {sorted(expected - seen)}")
        failures += 1
    print(f"{failures} failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
