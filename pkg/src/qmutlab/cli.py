"""Command line interface: ``qmutlab {generate,run,analyze,correlations,recommend,pipeline,corpus}``.

Exit codes: 0 success, 1 partial failure, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

from . import analytics, campaign
from .campaign import EXIT_OK, EXIT_USAGE, CampaignError
from .corpus import shipped_corpus_dir, write_corpus
from .recommender import Query
from .records import MUTATION_IVS, read_store

log = logging.getLogger("qmutlab")


def _csv(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _add_campaign_args(p: argparse.ArgumentParser, execution: bool) -> None:
    p.add_argument("--config", help="INI file with a [campaign] section")
    p.add_argument("--input", "-i", action="append", dest="inputs",
                   help="QASM file, directory or glob (repeatable); default: shipped corpus")
    p.add_argument("--out", "-o", dest="output_dir", help="output directory")
    p.add_argument("--strategy", dest="operand_strategy", choices=["Anchor", "Exhaustive"])
    p.add_argument("--angle", dest="default_angle", type=float, help="angle for inserted parameterized gates")
    p.add_argument("--max-mutants", dest="max_mutants_per_circuit", type=int)
    p.add_argument("--operators", help="comma list of Add,Remove,Replace")
    p.add_argument("--gates", help="comma list of mutatable gates")
    p.add_argument("--positions", help="comma list of position deciles (10..100)")
    if execution:
        p.add_argument("--shots", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--seed-mode", dest="seed_mode", choices=["shared", "per-mutant"])
        p.add_argument("--alpha", type=float)
        p.add_argument("--opo-test", dest="opo_test", choices=["homogeneity", "goodness_of_fit"])
        p.add_argument("--max-qubits", dest="max_qubits", type=int)
        p.add_argument("--workers", "-j", type=int)


_CONFIG_KEYS = ("inputs", "output_dir", "operand_strategy", "default_angle", "max_mutants_per_circuit",
                "operators", "gates", "positions", "shots", "seed", "seed_mode", "alpha", "opo_test",
                "max_qubits", "workers")


def _config(args) -> campaign.CampaignConfig:
    overrides = {k: getattr(args, k, None) for k in _CONFIG_KEYS}
    cfg = campaign.load_config(args.config, **overrides)
    if not cfg.inputs:
        cfg = campaign.load_config(args.config, **{**overrides, "inputs": [str(shipped_corpus_dir())]})
    return cfg


def cmd_generate(args) -> int:
    cfg = _config(args)
    res = campaign.generate(cfg)
    for path, msg in res.errors:
        print(f"error: {path}: {msg}", file=sys.stderr)
    summary = ", ".join(f"{k}={v}" for k, v in res.counts.items())
    print(f"generated {len(res.specs)} mutant specs ({summary}) in {cfg.out}")
    return res.exit_code


def cmd_run(args) -> int:
    cfg = _config(args)
    res = campaign.run(cfg)
    for path, msg in res.errors:
        print(f"error: {path}: {msg}", file=sys.stderr)
    s = campaign.summarize(res.records)
    print(f"executed {res.executed} mutants, skipped {res.skipped} already stored; "
          f"verdicts {json.dumps(s['verdicts'], sort_keys=True)}; store {cfg.out / campaign.STORE_FILE}")
    return res.exit_code


def _groupings(values):
    if not values:
        return None
    return [tuple(_csv(v)) if v != "overall" else () for v in values]


def cmd_analyze(args) -> int:
    heatmaps = None
    if args.heatmap:
        heatmaps = []
        for h in args.heatmap:
            pair = _csv(h)
            if len(pair) != 2:
                raise CampaignError(f"--heatmap expects ROW,COL, got {h!r}")
            heatmaps.append(tuple(pair))
    files = campaign.analyze(Path(args.store), Path(args.out), groupings=_groupings(args.group),
                             top=args.top, correlations=not args.no_correlations, heatmaps=heatmaps)
    for f in files:
        print(f)
    return EXIT_OK


def cmd_correlations(args) -> int:
    corr = analytics.complexity_correlations(read_store(args.store))
    lines = ["metric,pearson_r"] + [f"{k},{'' if v is None else f'{v:.6f}'}" for k, v in corr.items()]
    print("\n".join(lines))
    return EXIT_OK


def _parse_band(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError:
        raise CampaignError(f"--sr expects LO:HI, got {text!r}") from None
    return lo, hi


def cmd_recommend(args) -> int:
    scope, value = "all", None
    chosen = [(n, v) for n, v in (("algorithm", args.algorithm), ("algorithm_group", args.algorithm_group),
                                  ("output_dominance", args.dominance)) if v is not None]
    if len(chosen) > 1:
        raise CampaignError("choose at most one of --algorithm, --group, --dominance")
    if chosen:
        scope, value = chosen[0]
    filters = {}
    for name in MUTATION_IVS:
        raw = getattr(args, name)
        if raw:
            vals = [v for item in raw for v in _csv(item)]
            filters[name] = [int(v) for v in vals] if name == "position_bucket" else vals
    try:
        q = Query(scope, value, filters, _parse_band(args.sr), args.max)
    except ValueError as exc:
        raise CampaignError(str(exc)) from None
    with warnings.catch_warnings(record=True):
        warnings.simplefilter("always")
        manifest = campaign.recommend_manifest(Path(args.store), q,
                                               Path(args.copy_to) if args.copy_to else None,
                                               Path(args.mutants_root) if args.mutants_root else None)
    text = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if "warning" in manifest:
        print(f"warning: {manifest['warning']}", file=sys.stderr)
    return EXIT_OK


def cmd_pipeline(args) -> int:
    cfg = _config(args)
    gen = campaign.generate(cfg)
    if gen.exit_code == EXIT_USAGE:
        return EXIT_USAGE
    res = campaign.run(cfg)
    campaign.analyze(cfg.out / campaign.STORE_FILE, cfg.out / "reports")
    print(f"{len(gen.specs)} mutants; summary in {cfg.out / 'reports' / 'summary.json'}")
    return max(gen.exit_code, res.exit_code)


def cmd_corpus(args) -> int:
    for p in write_corpus(Path(args.directory)):
        print(p)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qmutlab", description="Mutation analysis for quantum circuits")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="enumerate mutants and write QASM files plus specs.jsonl")
    _add_campaign_args(p, execution=False)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("run", help="execute originals and mutants, judge, and write records.jsonl")
    _add_campaign_args(p, execution=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("pipeline", help="generate, run and analyze in one go")
    _add_campaign_args(p, execution=True)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("analyze", help="survival-rate tables, rankings, correlations and heatmap data")
    p.add_argument("--store", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--group", action="append",
                   help="comma list of up to 3 variables, or 'overall' (repeatable)")
    p.add_argument("--top", type=int, default=5)
    p.add_argument("--no-correlations", action="store_true")
    p.add_argument("--heatmap", action="append", help="ROW,COL variables (repeatable)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("correlations", help="Pearson r of per-circuit SR against complexity metrics")
    p.add_argument("--store", required=True)
    p.set_defaults(func=cmd_correlations)

    p = sub.add_parser("recommend", help="select mutants by characteristics and target SR")
    p.add_argument("--store", required=True)
    p.add_argument("--algorithm")
    p.add_argument("--group", dest="algorithm_group")
    p.add_argument("--dominance", help="dominant or diverse")
    p.add_argument("--operator", action="append")
    p.add_argument("--gate", action="append")
    p.add_argument("--gate-type", dest="gate_type", action="append")
    p.add_argument("--gate-size", dest="gate_size", action="append")
    p.add_argument("--position", dest="position_bucket", action="append")
    p.add_argument("--sr", default="0:1", help="target survival-rate band LO:HI")
    p.add_argument("--max", type=int, default=10)
    p.add_argument("--out", help="manifest path (default: stdout)")
    p.add_argument("--copy-to", help="copy selected mutant QASM files here")
    p.add_argument("--mutants-root", help="directory that record file paths are relative to")
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("corpus", help="write the shipped desk corpus to a directory")
    p.add_argument("directory")
    p.set_defaults(func=cmd_corpus)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CampaignError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
