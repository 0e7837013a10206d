"""Experiment runner.

    avgshadow run NAME [--config FILE] [--horizon N] [--seed N]
                       [--epsilon X] [--delta X] [--out-dir DIR]
                       [--format {json,csv}]

Writes result.json (always), per-table CSV files (with --format csv), and a
human-readable summary.txt.  Exit codes: 0 all checks pass, 2 an assertion
failed (the first failing check is named on stderr), 3 configuration error.
Identical parameters and seed produce byte-identical result files; the only
timestamp lives in the summary.
"""

import argparse
import csv
import inspect
import json
import sys
import time
from pathlib import Path

from .experiments import EXPERIMENTS

EXIT_OK = 0
EXIT_ASSERTION = 2
EXIT_CONFIG = 3

_GENERIC_FLAGS = {
    "horizon": "horizon",
    "seed": "seed",
    "epsilon": "epsilon",
    "delta": "delta",
}


class ConfigError(Exception):
    pass


def parse_config_file(path) -> dict:
    """Flat key = value lines; '#' starts a comment; values are int, float,
    or bare strings."""
    params = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        params[key] = _parse_value(value)
    return params


def _parse_value(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def _accepted_params(func) -> set:
    return set(inspect.signature(func).parameters)


def _format_table(header, rows) -> str:
    def fmt(v):
        return f"{v:.6g}" if isinstance(v, float) else str(v)

    cells = [list(map(str, header))] + [[fmt(v) for v in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def run_experiment(name: str, params: dict, out_dir, fmt: str = "json") -> int:
    if name not in EXPERIMENTS:
        print(f"unknown experiment: {name!r} (choose from {sorted(EXPERIMENTS)})", file=sys.stderr)
        return EXIT_CONFIG
    func = EXPERIMENTS[name]
    accepted = _accepted_params(func)
    unknown = set(params) - accepted
    if unknown:
        print(
            f"parameters {sorted(unknown)} not accepted by {name} "
            f"(accepted: {sorted(accepted)})",
            file=sys.stderr,
        )
        return EXIT_CONFIG

    try:
        result = func(**params)
    except Exception as exc:
        print(f"FAILED: {name}: {exc}", file=sys.stderr)
        return EXIT_ASSERTION

    out = Path(out_dir) / name
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "result.json", "w") as fh:
        json.dump(result.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    if fmt == "csv":
        for table_name, (header, rows) in result.tables.items():
            with open(out / f"{table_name}.csv", "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(header)
                writer.writerows(rows)
    lines = [
        f"experiment: {result.name}",
        f"timestamp: {time.strftime('%Y-%m-%dT%H:%M:%S')}",
        f"params: {json.dumps(result.params, sort_keys=True)}",
        "",
    ]
    lines.extend(c.line() for c in result.checks)
    lines.append("")
    lines.append(f"overall: {'PASS' if result.passed else 'FAIL'}")
    (out / "summary.txt").write_text("\n".join(lines) + "\n")

    for table_name, (header, rows) in result.tables.items():
        if len(rows) > 30:
            continue
        print(f"\n{table_name}")
        print(_format_table(header, rows))
    for c in result.checks:
        print(c.line())
    if not result.passed:
        failure = result.first_failure
        print(f"FAILED: {failure.name}: {failure.detail}", file=sys.stderr)
        return EXIT_ASSERTION
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="avgshadow", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a named experiment")
    run.add_argument("name", help=f"one of {sorted(EXPERIMENTS)}")
    run.add_argument("--config", help="flat key = value parameter file")
    run.add_argument("--horizon", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--epsilon", type=float)
    run.add_argument("--delta", type=float)
    run.add_argument("--out-dir", default="out")
    run.add_argument("--format", choices=("json", "csv"), default="json")
    args = parser.parse_args(argv)

    try:
        params = parse_config_file(args.config) if args.config else {}
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for flag, key in _GENERIC_FLAGS.items():
        value = getattr(args, flag)
        if value is not None:
            params[key] = value
    return run_experiment(args.name, params, args.out_dir, args.format)


if __name__ == "__main__":
    sys.exit(main())
