"""Run every CLI subcommand and validate the files it writes.

JSON outputs are checked against the schema named by their "schema" field,
CSV outputs for UTF-8, a one-line header and a constant column count.
"""

import argparse
import csv
import json
import pathlib
import shutil
import subprocess
import sys

import jsonschema

RUNS = {
    "slit": ["slit", "--kx", "0.6"],
    "mz": ["mz", "--n1", "7", "--n2", "4", "--phi", "0.3"],
    "mz_balanced": ["mz", "--n1", "6", "--n2", "6"],
    "montecarlo": ["--seed", "9", "montecarlo", "--model", "mz", "--n1", "5", "--n2", "1",
                   "--theta", "0.7", "--n", "50", "--trials", "40"],
    "accumulate": ["accumulate", "--j", "20", "--repeats", "2", "--postselect-zero"],
    "accumulate_empty": ["accumulate", "--j", "5", "--repeats", "0"],
}


def load_schemas(directory):
    schemas = {}
    for path in sorted(directory.glob("*.json")):
        schema = json.loads(path.read_text(encoding="utf-8"))
        jsonschema.Draft202012Validator.check_schema(schema)
        schemas[schema["$id"]] = jsonschema.Draft202012Validator(schema)
    return schemas


def check_csv(path):
    text = path.read_bytes().decode("utf-8")
    rows = list(csv.reader(text.splitlines()))
    if len(rows) < 2:
        raise ValueError(f"{path}: no data rows")
    width = len(rows[0])
    if any(not cell.replace("_", "").isalpha() for cell in rows[0]):
        raise ValueError(f"{path}: header {rows[0]} is not a column-name line")
    for n, row in enumerate(rows[1:], start=2):
        if len(row) != width:
            raise ValueError(f"{path}:{n}: expected {width} columns, got {len(row)}")
        for cell in row:
            float(cell)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--tool", required=True)
    parser.add_argument("--schemas", required=True, type=pathlib.Path)
    parser.add_argument("--workdir", required=True, type=pathlib.Path)
    args = parser.parse_args()

    schemas = load_schemas(args.schemas)
    shutil.rmtree(args.workdir, ignore_errors=True)
    errors = []
    checked = 0
    for name, argv in RUNS.items():
        out = args.workdir / name
        result = subprocess.run([args.tool, "--out", str(out), *argv],
                                capture_output=True, text=True)
        if result.returncode != 0:
            errors.append(f"{name}: exit {result.returncode}: {result.stderr.strip()}")
            continue
        for path in sorted(out.iterdir()):
            try:
                if path.suffix == ".json":
                    doc = json.loads(path.read_text(encoding="utf-8"))
                    validator = schemas.get(doc.get("schema"))
                    if validator is None:
                        raise ValueError(f"{path}: unknown schema {doc.get('schema')!r}")
                    validator.validate(doc)
                elif path.suffix == ".csv":
                    check_csv(path)
                else:
                    raise ValueError(f"{path}: unexpected output file")
                checked += 1
            except (ValueError, jsonschema.ValidationError) as exc:
                errors.append(str(exc).splitlines()[0])

    for e in errors:
        print("FAIL", e)
    print(f"validated {checked} files, {len(errors)} errors")
    return 1 if errors else 0


if __name__ == "__main__":
    sys.exit(main())
