"""Command line interface.

    cliffpencil run <config.toml> [--out DIR] [--seed S] [--starts N]
    cliffpencil preset [<name>]
    cliffpencil check-module <module.json>

Exit codes: 0 on a PASS verdict, 2 on a theorem-bound shortfall or failed
check, 1 on errors.
"""

from __future__ import annotations

import argparse
import sys

from .clifford import module_from_json, verify_module
from .config import config_from_toml, config_to_toml, preset_names, presets
from .pipeline import EXIT_ERROR, EXIT_PASS, EXIT_SHORTFALL, run, write_bundle


def _cmd_run(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = config_from_toml(fh.read())
    except Exception as exc:
        print(f"error: cannot load config: {exc}", file=sys.stderr)
        return EXIT_ERROR
    bundle = run(cfg, seed=args.seed, starts=args.starts)
    if args.out:
        paths = write_bundle(bundle, args.out)
        for name, path in sorted(paths.items()):
            print(f"wrote {name}: {path}")
    if bundle.error is not None:
        print(f"error at stage {bundle.error['stage']}: {bundle.error['message']}",
              file=sys.stderr)
        return EXIT_ERROR
    verdict = bundle.verdict or {}
    print(f"verdict: {verdict.get('verdict', '?')}  ({verdict.get('label', '')})")
    if "count" in verdict:
        print(f"records: {verdict['count']}  bound used: {verdict['bound_used']} "
              f"(SB={verdict['SB']}, CL+1={verdict['CL_plus_1']})")
    return bundle.exit_code


def _cmd_preset(args) -> int:
    table = presets()
    if not args.name:
        for name in preset_names():
            print(name)
        return EXIT_PASS
    if args.name not in table:
        print(f"error: unknown preset {args.name!r}; available: "
              f"{', '.join(preset_names())}", file=sys.stderr)
        return EXIT_ERROR
    sys.stdout.write(config_to_toml(table[args.name]))
    return EXIT_PASS


def _cmd_check_module(args) -> int:
    try:
        with open(args.module, "r", encoding="utf-8") as fh:
            module = module_from_json(fh.read())
        report = verify_module(module.generators, module.metric)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(f"orthogonal:      {report.orthogonal}")
    print(f"square_minus_id: {report.square_minus_id}")
    print(f"anticommute:     {report.anticommute}")
    print(f"max_violation:   {report.max_violation:.3e}")
    return EXIT_PASS if report.ok else EXIT_SHORTFALL


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cliffpencil",
        description="Critical point solver for Clifford symplectic pencils on flat tori")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a configuration file")
    p_run.add_argument("config", help="path to a TOML configuration")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.add_argument("--seed", type=int, default=None, help="override the seed")
    p_run.add_argument("--starts", type=int, default=None, help="override the search budget")
    p_run.set_defaults(func=_cmd_run)

    p_preset = sub.add_parser("preset", help="print a preset configuration")
    p_preset.add_argument("name", nargs="?", default=None)
    p_preset.set_defaults(func=_cmd_preset)

    p_check = sub.add_parser("check-module", help="verify a serialized module")
    p_check.add_argument("module", help="path to a module JSON document")
    p_check.set_defaults(func=_cmd_check_module)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
