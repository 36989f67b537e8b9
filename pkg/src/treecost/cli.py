"""Command-line interface: one subcommand per pipeline stage.

Configuration precedence: built-in defaults < key=value config file
(--config) < command-line flags.  The output directory may also come from
the TREECOST_OUTDIR environment variable (the only env-var input).
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from .errors import TreecostError
from .pipeline import RunConfig, run_baseline, run_compare, run_extrema, run_measure, \
    run_optimize, run_pa, run_pa_sweep

_CONFIG_FIELDS = {f.name: f.type for f in dataclasses.fields(RunConfig)}
_INT_FIELDS = {"global_seed", "epochs", "population", "record_every", "reps",
               "min_len", "max_len", "cap", "min_sentences", "n_max"}
_FLOAT_FIELDS = {"rho", "sigma", "alpha_override"}


def _parse_config_file(path) -> dict:
    values: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise TreecostError("config %s line %d: expected key=value" % (path, lineno))
            key, value = (s.strip() for s in line.split("=", 1))
            if key not in _CONFIG_FIELDS:
                raise TreecostError("config %s line %d: unknown key %r" % (path, lineno, key))
            if key in _INT_FIELDS:
                values[key] = int(value)
            elif key in _FLOAT_FIELDS:
                values[key] = float(value)
            else:
                values[key] = value
    return values


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value configuration file")
    p.add_argument("--outdir", help="output directory (default: $TREECOST_OUTDIR or ./out)")
    p.add_argument("--seed", type=int, dest="global_seed", help="global 64-bit seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treecost",
        description="Measure dependency-tree topology costs, generate matched "
                    "synthetic baselines, and compare the distributions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extrema", help="precompute the per-size entropy extrema table")
    _add_common(p)
    p.add_argument("--n-max", type=int, dest="n_max", help="largest tree size (default 50)")

    p = sub.add_parser("measure", help="ingest CONLL-U corpora and measure real sentences")
    _add_common(p)
    p.add_argument("--manifest", help="JSON file mapping language -> conllu paths")
    p.add_argument("--min-len", type=int, dest="min_len")
    p.add_argument("--max-len", type=int, dest="max_len")
    p.add_argument("--cap", type=int, help="per-language sentence cap")
    p.add_argument("--min-sentences", type=int, dest="min_sentences")
    p.add_argument("--punct-policy", choices=("reattach", "discard"), dest="punct_policy")

    p = sub.add_parser("baseline", help="uniform random trees matched to the real sentences")
    _add_common(p)
    p.add_argument("--measures", help="real measures file (default <outdir>/real_measures.csv)")

    p = sub.add_parser("optimize", help="run the genetic search on the baseline trees")
    _add_common(p)
    p.add_argument("--trees", help="baseline trees file (default <outdir>/uniform_trees.txt)")
    p.add_argument("--rho", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--population", type=int)
    p.add_argument("--record-every", type=int, dest="record_every")

    p = sub.add_parser("pa", help="preferential-attachment trees matched to the real sentences")
    _add_common(p)
    p.add_argument("--measures", help="real measures file (default <outdir>/real_measures.csv)")
    p.add_argument("--alpha-override", type=float, dest="alpha_override",
                   help="use this exponent for every language instead of the fitted mean")
    p.add_argument("--alpha-sweep", dest="alpha_sweep",
                   help="comma-separated exponents; emits pa_sweep.csv with per-alpha KLDs")
    p.add_argument("--reps", type=int, help="bootstrap replicates for sweep baselines")

    p = sub.add_parser("compare", help="KLDs, zero baselines, classifiers, paired t")
    _add_common(p)
    p.add_argument("--real", help="real measures file (default <outdir>/real_measures.csv)")
    p.add_argument("--synthetic", action="append", default=[],
                   metavar="NAME=PATH", help="condition measures file; repeatable")
    p.add_argument("--reps", type=int, help="bootstrap replicates")
    return parser


def _build_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if args.config:
        values.update(_parse_config_file(args.config))
    for key in _CONFIG_FIELDS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    if "outdir" not in values:
        values["outdir"] = os.environ.get("TREECOST_OUTDIR", "out")
    return RunConfig(**values)


def _fail(message: str, code: int = 2) -> int:
    print(json.dumps({"error": message}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _build_config(args)
        if args.command == "extrema":
            info = run_extrema(cfg)
            print("wrote %s (%d rows)" % (info["path"], info["rows"]))
        elif args.command == "measure":
            info = run_measure(cfg)
            print("measured %d sentences across %d languages" %
                  (info["rows"], len(info["kept"])))
            for lang, reason in sorted(info["failures"].items()):
                print("  skipped %s: %s" % (lang, reason))
            if not info["kept"]:
                return _fail("no language produced a valid sample", 3)
        elif args.command == "baseline":
            info = run_baseline(cfg, args.measures)
            print("sampled %d matched uniform trees" % info["rows"])
        elif args.command == "optimize":
            info = run_optimize(cfg, args.trees)
            print("optimized %d members across %d languages" %
                  (info["rows"], info["languages"]))
        elif args.command == "pa":
            if args.alpha_sweep:
                alphas = [float(a) for a in args.alpha_sweep.split(",") if a.strip()]
                info = run_pa_sweep(cfg, alphas, args.measures)
                print("wrote %s (%d rows)" % (info["path"], info["rows"]))
            else:
                info = run_pa(cfg, args.measures)
                print("sampled %d matched preferential-attachment trees" % info["rows"])
        elif args.command == "compare":
            synthetic = {}
            for item in args.synthetic:
                if "=" not in item:
                    return _fail("--synthetic expects NAME=PATH, got %r" % item)
                name, path = item.split("=", 1)
                synthetic[name] = path
            if not synthetic:
                return _fail("compare needs at least one --synthetic NAME=PATH")
            results = run_compare(cfg, args.real, synthetic)
            for cond, res in sorted(results.items()):
                print("%s: %d languages, accuracy(all)=%.3f, accuracy(min10)=%.3f" %
                      (cond, len(res["per_language"]), res["accuracies"]["all"],
                       res["accuracies"]["min10"]))
        return 0
    except (TreecostError, OSError, ValueError) as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
