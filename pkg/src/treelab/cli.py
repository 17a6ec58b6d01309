"""Command-line verification suites and catalog management.

Subcommands:

    treelab verify {lemma21|lemma22|corrpro|presentation|cogtri|hecke|all}
    treelab reduce
    treelab catalog {emit|list}

Every verify run emits a JSON report (stdout or --json PATH) and exits 0
iff the aggregate verdict is "pass".  Identical configuration and seed
reproduce byte-identical reports up to the elapsed-time fields.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import __version__
from .catalog import builtin_catalog, emit_catalog
from .halftree import (
    build_complex,
    check_cogtri_hypothesis,
    check_corrpro,
    check_presentation,
    reduce_chain,
    sample_fixed_class,
)
from .hecke import hecke_suite
from .lemmas import lemma21_suite, lemma22_suite
from .report import FAIL, PASS, LemmaReport, aggregate_status

SUPPORTED_P = (2, 3, 5, 7)
MAX_E = 3
MAX_DEPTH = 6


@dataclass
class RunConfig:
    """Validated knobs of one verification run."""

    command: str
    p: int
    e: int = 1
    depth: int = 4
    seed: Optional[int] = None
    catalog: str = "all"
    module: str = "all"
    rho: str = "w0"
    twist: int = 1
    n_random: int = 0
    checks: str = "dim,assoc,vytastra,flatness"
    out: Optional[str] = None
    jobs: int = 1
    count: int = 1

    def validate(self) -> None:
        if self.p not in SUPPORTED_P:
            raise ValueError(f"p must be one of {SUPPORTED_P}")
        if not 1 <= self.e <= MAX_E:
            raise ValueError(f"e must lie in 1..{MAX_E}")
        if not 1 <= self.depth <= MAX_DEPTH:
            raise ValueError(f"depth must lie in 1..{MAX_DEPTH}")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        if not self.module:
            raise ValueError("empty module selection")
        if not self.catalog:
            raise ValueError("empty catalog selection")
        randomized = self.command in ("lemma21", "lemma22", "all", "reduce") or (
            self.command == "hecke" and self.n_random > 0
        )
        if randomized and self.seed is None:
            raise ValueError("a seed is mandatory for any randomized run")

    def echo(self) -> dict:
        return {
            "command": self.command,
            "p": self.p,
            "e": self.e,
            "depth": self.depth,
            "seed": self.seed,
            "catalog": self.catalog,
            "module": self.module,
            "rho": self.rho,
            "twist": self.twist,
            "random": self.n_random,
            "checks": self.checks,
            "jobs": self.jobs,
            "count": self.count,
        }


def _selected_modules(cfg: RunConfig):
    mods = builtin_catalog(cfg.p, 1)
    if cfg.module != "all":
        mods = [m for m in mods if m.name == cfg.module]
        if not mods:
            raise ValueError(f"unknown module {cfg.module!r}")
    return mods


def _tree_reports(cfg: RunConfig, which: str) -> list[LemmaReport]:
    reports = []
    for W in _selected_modules(cfg):
        if which == "corrpro":
            cc = build_complex(W, cfg.depth, cfg.rho, cfg.twist)
            reports.append(check_corrpro(W, cfg.depth, cfg.rho, cfg.twist, cc=cc))
        elif which == "presentation":
            reports.append(check_presentation(W, cfg.depth, cfg.rho, cfg.twist))
        elif which == "cogtri":
            reports.append(check_cogtri_hypothesis(W, cfg.twist))
    return reports


def run_suite(cfg: RunConfig) -> dict:
    """Execute one verification command and assemble the report envelope."""
    cfg.validate()
    t0 = time.monotonic()
    reports: list[LemmaReport] = []
    seed = cfg.seed if cfg.seed is not None else 0
    if cfg.command == "lemma21":
        reports = lemma21_suite(cfg.p, 1, cfg.catalog, seed, cfg.n_random)
    elif cfg.command == "lemma22":
        reports = lemma22_suite(cfg.p, cfg.e, seed, cfg.n_random)
    elif cfg.command in ("corrpro", "presentation", "cogtri"):
        reports = _tree_reports(cfg, cfg.command)
    elif cfg.command == "hecke":
        checks = tuple(x for x in cfg.checks.split(",") if x)
        reports = hecke_suite(cfg.p, cfg.e, checks, seed, cfg.n_random)
    elif cfg.command == "all":
        tasks = [
            lambda: lemma21_suite(cfg.p, 1, "all", seed, cfg.n_random),
            lambda: lemma22_suite(cfg.p, cfg.e, seed, cfg.n_random),
            lambda: _tree_reports(cfg, "corrpro"),
            lambda: _tree_reports(cfg, "presentation"),
            lambda: _tree_reports(cfg, "cogtri"),
        ]
        if cfg.p <= 5:
            tasks.append(lambda: hecke_suite(cfg.p, cfg.e, seed=seed, n_random=min(cfg.n_random, 5)))
        if cfg.jobs > 1:
            with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
                chunks = list(pool.map(lambda f: f(), tasks))
        else:
            chunks = [f() for f in tasks]
        reports = [r for chunk in chunks for r in chunk]
    else:
        raise ValueError(f"unknown command {cfg.command!r}")
    return {
        "tool": "treelab",
        "version": __version__,
        "config": cfg.echo(),
        "reports": [r.to_dict() for r in reports],
        "aggregate": aggregate_status(reports),
        "elapsed_s": time.monotonic() - t0,
    }


def _emit(doc: dict, out: Optional[str]) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _fail_summary(doc: dict) -> None:
    for rep in doc["reports"]:
        if rep["status"] == FAIL:
            print("FAILED: " + json.dumps(rep, sort_keys=True), file=sys.stderr)


def _cmd_verify(args: argparse.Namespace) -> int:
    cfg = RunConfig(
        command=args.suite,
        p=args.p,
        e=args.e,
        depth=args.depth,
        seed=args.seed,
        catalog=args.catalog,
        module=args.module,
        rho=args.rho,
        twist=args.twist,
        n_random=args.random,
        checks=args.check,
        out=args.json,
        jobs=args.jobs,
    )
    doc = run_suite(cfg)
    _emit(doc, cfg.out)
    if doc["aggregate"] != PASS:
        _fail_summary(doc)
        return 1
    return 0


def _cmd_reduce(args: argparse.Namespace) -> int:
    cfg = RunConfig(
        command="reduce",
        p=args.p,
        depth=args.depth,
        seed=args.seed,
        module=args.module or "jbar",
        count=args.count,
        out=args.json,
    )
    cfg.validate()
    mods = _selected_modules(cfg)
    if cfg.module == "all":
        raise ValueError("reduce expects a single module")
    W = mods[0]
    cc = build_complex(W, cfg.depth)
    rng = np.random.default_rng(cfg.seed)
    runs = []
    for i in range(cfg.count):
        c = sample_fixed_class(cc, rng)
        w, B = reduce_chain(cc, c)
        lifted = np.zeros(cc.dim0, dtype=np.int64)
        lifted[: cc.w] = w
        exact = bool(np.array_equal((lifted + B @ cc.dmat) % cc.ring.modulus, c))
        runs.append(
            {
                "index": i,
                "reduced_vector": [int(x) for x in w],
                "in_edge_image": bool(cc.spec.inv_upper.contains(w)),
                "certificate_exact": exact,
                "certificate_support": int(np.count_nonzero(B)),
            }
        )
    doc = {
        "tool": "treelab",
        "version": __version__,
        "config": cfg.echo(),
        "runs": runs,
        "aggregate": PASS
        if all(r["certificate_exact"] and r["in_edge_image"] for r in runs)
        else FAIL,
    }
    _emit(doc, cfg.out)
    return 0 if doc["aggregate"] == PASS else 1


def _cmd_catalog(args: argparse.Namespace) -> int:
    if args.action == "emit":
        doc = emit_catalog(args.p, args.e, args.out)
        if not args.out:
            print(json.dumps(doc, sort_keys=True, indent=2))
        return 0
    mods = builtin_catalog(args.p, args.e)
    for m in mods:
        print(f"{m.name}\trank {m.rank}\tp={args.p} e={args.e}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="treelab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"treelab {__version__}")
    sub = parser.add_subparsers(dest="cmd", required=True)

    ver = sub.add_parser("verify", help="run a verification suite")
    ver.add_argument(
        "suite",
        choices=["lemma21", "lemma22", "corrpro", "presentation", "cogtri", "hecke", "all"],
    )
    ver.add_argument("--p", type=int, required=True)
    ver.add_argument("--e", type=int, default=1)
    ver.add_argument("--depth", type=int, default=4)
    ver.add_argument("--seed", type=int, default=None)
    ver.add_argument("--catalog", default="all", help="catalog module name or 'all'")
    ver.add_argument("--module", default="all", help="module name or 'all'")
    ver.add_argument("--rho", default="w0", help="gluing choice: w0 | twist:K | scalar:K")
    ver.add_argument("--twist", type=int, default=1, help="unit twist of the cyclic generator")
    ver.add_argument("--random", type=int, default=0, help="number of seeded random instances")
    ver.add_argument("--check", default="dim,assoc,vytastra,flatness", help="hecke checks (csv)")
    ver.add_argument("--json", default=None, help="write the report to this path")
    ver.add_argument("--jobs", type=int, default=1)
    ver.set_defaults(func=_cmd_verify)

    red = sub.add_parser("reduce", help="reduce seeded fixed classes to edge vectors")
    red.add_argument("--p", type=int, required=True)
    red.add_argument("--depth", type=int, required=True)
    red.add_argument("--module", default="jbar")
    red.add_argument("--seed", type=int, required=True)
    red.add_argument("--count", type=int, default=1)
    red.add_argument("--json", default=None)
    red.set_defaults(func=_cmd_reduce)

    cat = sub.add_parser("catalog", help="emit or list the built-in module catalog")
    cat.add_argument("action", choices=["emit", "list"])
    cat.add_argument("--p", type=int, required=True)
    cat.add_argument("--e", type=int, default=1)
    cat.add_argument("--out", default=None)
    cat.set_defaults(func=_cmd_catalog)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as err:
        parser.exit(2, f"treelab: error: {err}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
