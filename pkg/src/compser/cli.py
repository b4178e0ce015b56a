"""``compser-lab``: run verification suites, emit CSV tables, evaluate rates.

Examples
--------
compser-lab suite rates
compser-lab suite decay --d 1 --s 0.75 --out reports
compser-lab table cfun --out tables
compser-lab rates --config spectral.json
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import rates, suites
from .suites import ConfigError, SuiteConfig


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="compser-lab", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON document with configuration fields")
        sp.add_argument("--d", type=int)
        sp.add_argument("--s", type=float)
        sp.add_argument("--upsilon", type=int)
        sp.add_argument("--cutoff", type=int)
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--show-config", action="store_true",
                        help="print the effective configuration and exit")

    sp = sub.add_parser("suite", help="run a verification suite")
    sp.add_argument("name", choices=suites.SUITES)
    common(sp)
    sp = sub.add_parser("table", help="write a CSV table")
    sp.add_argument("kind", choices=sorted(suites.TABLES))
    common(sp)
    sp = sub.add_parser("rates", help="rate report for a SpectralData document")
    sp.add_argument("--config", help="JSON SpectralData {d, delta, s1?, eigenvalues?, r?, xi?}")
    sp.add_argument("--d", type=int)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--s1", type=float)
    sp.add_argument("--r", type=float)
    sp.add_argument("--xi", type=float)
    sp.add_argument("--out", help="output directory")
    sp.add_argument("--show-config", action="store_true")
    return p


def _load(path) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config: file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON in {path}: {exc}")
    if not isinstance(data, dict):
        raise ConfigError("config: expected a JSON object")
    return data


def build_config(defaults, args) -> SuiteConfig:
    """defaults < config file < command line flags.

    ``defaults`` is a dict or a callable taking d and returning one.
    """
    loaded = _load(args.config)
    if callable(defaults):
        d = args.d if args.d is not None else loaded.get("d")
        defaults = defaults(d)
    data = dict(defaults)
    data.update(loaded)
    for key in ("d", "upsilon", "cutoff", "out"):
        val = getattr(args, key, None)
        if val is not None:
            data[key] = val
    if getattr(args, "s", None) is not None:
        data["s"] = args.s
        data["s_grid"] = None
    return SuiteConfig.from_dict(data)


def _rates(args) -> int:
    data = {"d": 1, "delta": 0.9, "s1": 0.6, "r": 0.05, "xi": 0.05}
    data.update(_load(args.config))
    for key in ("d", "delta", "s1", "r", "xi"):
        val = getattr(args, key)
        if val is not None:
            data[key] = val
    if args.show_config:
        print(json.dumps(data, indent=2, sort_keys=True))
        return 0
    try:
        spectral = rates.SpectralData.from_dict(data)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"config: {exc}")
    text = rates.rate_report_json(spectral, r=float(data.get("r", 0.05)), xi=float(data.get("xi", 0.05)))
    print(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "rates.json").write_text(text + "\n")
    return 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "rates":
            return _rates(args)
        if args.command == "suite":
            cfg = build_config(lambda d: suites.suite_defaults(args.name, d), args)
            suites.validate_config(args.name, cfg)
            if args.show_config:
                print(json.dumps(cfg.to_dict(), indent=2, sort_keys=True))
                return 0
            report = suites.run_suite(args.name, cfg, cfg.out)
            for c in report["cases"]:
                print(f"{'PASS' if c['pass'] else 'FAIL'}  {args.name}.{c['name']}  "
                      f"measured={c['measured']}  target={c['target']}  tol={c['tolerance']}")
            return 0 if report["pass"] else 1
        cfg = build_config(suites.TABLE_DEFAULTS[args.kind], args)
        if args.show_config:
            print(json.dumps(cfg.to_dict(), indent=2, sort_keys=True))
            return 0
        text = suites.TABLES[args.kind](cfg)
        out = Path(cfg.out)
        try:
            out.mkdir(parents=True, exist_ok=True)
            path = out / f"{args.kind}.csv"
            path.write_text(text)
        except OSError as exc:
            print(f"error: cannot write {out}: {exc}", file=sys.stderr)
            return 2
        print(path)
        return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
