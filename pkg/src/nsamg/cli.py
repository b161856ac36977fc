"""Batch driver: run verification suites, experiments, and generators.

Reports are serialized as JSON (schema ``nsamg-report/1``); re-running
with an identical configuration yields byte-identical output except for
the ``timestamp`` field.
"""

import argparse
import json
import sys

import jsonschema

from . import probgen
from .errors import ConfigError, NsamgError
from .suites import SUITE_NAMES, Report, SuiteOptions, run_suites

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["suites"],
    "properties": {
        "problem": {
            "type": "object",
            "additionalProperties": False,
            "required": ["family"],
            "properties": {
                "family": {"enum": list(probgen.FAMILIES)},
                "n": {"type": "integer", "minimum": 2},
                "seed": {"type": "integer"},
                "epsilon": {"type": "number"},
                "radius": {"type": "number", "exclusiveMinimum": 0},
                "multiplicity": {"type": "integer", "minimum": 1},
                "omega": {"type": "number"},
                "b_kind": {"enum": ["identity", "random_hpd"]},
                "a_path": {"type": "string"},
                "b_path": {"type": "string"},
                "minv_path": {"type": "string"},
            },
        },
        "smoother": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": list(probgen.SMOOTHER_KINDS)},
                "omega": {"type": "number"},
                "auto": {"type": "boolean"},
            },
        },
        "coarsening": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "strategy": {"enum": list(probgen.COARSENING_STRATEGIES)},
                "sizes": {
                    "type": "array",
                    "items": {"type": "integer", "minimum": 1},
                    "minItems": 1,
                },
                "seed": {"type": "integer"},
                "basis_change": {"enum": ["identity", "random"]},
            },
        },
        "kind": {"enum": ["adjoint_post", "plain"]},
        "nu1": {"type": "integer", "minimum": 0, "maximum": 8},
        "nu2": {"type": "integer", "minimum": 0, "maximum": 8},
        "levels": {"type": "integer", "minimum": 1},
        "suites": {
            "type": "array",
            "items": {"enum": list(SUITE_NAMES) + ["all", "experiment"]},
        },
        "seeds": {"type": "integer", "minimum": 1},
        "n": {"type": "integer", "minimum": 4},
        "seed": {"type": "integer"},
        "jobs": {"type": "integer", "minimum": 1},
        "output": {"type": "string"},
        "csv": {"type": "string"},
    },
}


def load_config(path):
    """Read and schema-validate an experiment configuration.

    :raises ConfigError: on unreadable, unparseable, or invalid files.
    """
    try:
        with open(path, encoding="utf-8") as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(raw, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"{path}: {exc.message}") from exc
    return raw


def report_to_json(report: Report):
    return json.dumps(
        {
            "schema": report.schema,
            "config": report.config,
            "summary": report.summary,
            "checks": report.checks,
            "timestamp": report.timestamp,
        },
        sort_keys=True,
        indent=2,
    )


def report_to_csv(report: Report):
    """Flat table of measured scalars, one row per check and value."""
    lines = ["name,status,key,value"]
    for check in report.checks:
        measured = check["measured"] or {"": ""}
        for key, value in sorted(measured.items()):
            if isinstance(value, list):
                value = ";".join(str(v) for v in value)
            lines.append(f"{check['name']},{check['status']},{key},{value}")
    return "\n".join(lines) + "\n"


def _emit(report: Report, output, csv_path):
    text = report_to_json(report)
    if output:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        print(text)
    if csv_path:
        with open(csv_path, "w", encoding="utf-8") as handle:
            handle.write(report_to_csv(report))
    for check in report.checks:
        if check["status"] == "fail":
            print(
                f"FAIL {check['name']}: {json.dumps(check['measured'], sort_keys=True)}",
                file=sys.stderr,
            )
    summary = report.summary
    print(
        f"{summary['pass']} passed, {summary['fail']} failed, "
        f"{summary['skipped-hypothesis']} skipped",
        file=sys.stderr,
    )


def _options_from(config, args):
    merged = dict(config)
    for key in ("seeds", "n", "levels", "jobs", "seed"):
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged, SuiteOptions(
        seeds=int(merged.get("seeds", 20)),
        n=int(merged.get("n", 24)),
        levels=int(merged.get("levels", 3)),
        jobs=int(merged.get("jobs", 1)),
        base_seed=int(merged.get("seed", 0)),
    )


def _cmd_verify(args):
    config = {"suites": [args.suite]}
    merged, opts = _options_from(config, args)
    report = run_suites([args.suite], opts, config_echo=merged)
    _emit(report, args.output, args.csv)
    return 1 if report.failures else 0


def _cmd_run(args):
    config = load_config(args.config)
    merged, opts = _options_from(config, args)
    suites = [name for name in merged["suites"] if name != "experiment"]
    experiment = None
    if "experiment" in merged["suites"] or "problem" in merged:
        experiment = merged
    report = run_suites(suites, opts, config_echo=merged, experiment=experiment)
    _emit(report, args.output or merged.get("output"), args.csv or merged.get("csv"))
    return 1 if report.failures else 0


def _cmd_gen(args):
    spec = probgen.ProblemSpec(
        family=args.family,
        n=args.n,
        seed=args.seed or 0,
        epsilon=args.epsilon,
        radius=args.radius,
        multiplicity=args.multiplicity,
    )
    A, B, minv = probgen.generate(spec)
    probgen.save_matrix(args.output, A)
    if args.all:
        stem = args.output.rsplit(".mtx", 1)[0]
        probgen.save_matrix(f"{stem}_b.mtx", B)
        probgen.save_matrix(f"{stem}_minv.mtx", minv)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nsamg",
        description="verification suites for weighted-norm two-grid and "
        "V-cycle error propagation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run one named suite (or all)")
    verify.add_argument("suite", choices=list(SUITE_NAMES) + ["all"])
    _common_flags(verify)

    run = sub.add_parser("run", help="run suites from a JSON configuration")
    run.add_argument("config")
    _common_flags(run)

    gen = sub.add_parser("gen", help="generate a test matrix in Matrix Market form")
    gen.add_argument("family", choices=[f for f in probgen.FAMILIES if f != "custom_file"])
    gen.add_argument("-n", type=int, default=16)
    gen.add_argument("--epsilon", type=float, default=0.1)
    gen.add_argument("--radius", type=float, default=0.95)
    gen.add_argument("--multiplicity", type=int, default=1)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--all", action="store_true",
                     help="also write the weight and smoother matrices")
    gen.add_argument("-o", "--output", required=True)
    return parser


def _common_flags(cmd):
    cmd.add_argument("--seeds", type=int, default=None)
    cmd.add_argument("--n", type=int, default=None)
    cmd.add_argument("--levels", type=int, default=None)
    cmd.add_argument("--jobs", type=int, default=None)
    cmd.add_argument("--seed", type=int, default=None)
    cmd.add_argument("-o", "--output", default=None)
    cmd.add_argument("--csv", default=None)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "gen":
            return _cmd_gen(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NsamgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    parser.error("unknown command")


if __name__ == "__main__":
    sys.exit(main())
