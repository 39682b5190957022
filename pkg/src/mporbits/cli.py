"""Command-line surface: reproduce the depth-zero tables and figure data,
dump lattices and orbit inventories, and run the bijection check.

Exit codes: 0 ok, 2 mathematical assertion failure, 3 enumeration budget
exceeded, 4 usage error.  All outputs are byte-deterministic for a fixed
configuration; the figure command additionally renders a PNG next to the
delimited data when an output directory is given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from .apartment import (LatticeBounds, apartment_point, enumerate_theta_facets,
                        facet_of, figure_coords, mp_lattice)
from .classify import verify_bijection
from .liealg import SymmetricPair, pair_for
from .residue import (BudgetExceeded, action_group, enumerate_orbits,
                      is_noticed_rank, pairs_equivalent, residue_space)
from .lifting import is_noticed_building

EXIT_OK = 0
EXIT_ASSERTION = 2
EXIT_BUDGET = 3
EXIT_USAGE = 4

DEFAULT_BUDGET = 10 ** 7


class UsageError(ValueError):
    pass


class CheckFailed(RuntimeError):
    pass


@dataclass
class RunConfig:
    pair: str
    p: int
    r: Fraction
    precision: int
    window: tuple
    seed: int
    format: str
    out: Optional[str]
    budget: int

    def pair_obj(self) -> SymmetricPair:
        return pair_for(self.pair)


def _parse_fraction(text: str, what: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError("cannot parse %s %r as an exact fraction" % (what, text))


def _parse_window(text: str) -> tuple:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError("window must be 'lo,hi', got %r" % text)
    lo = _parse_fraction(parts[0], "window endpoint")
    hi = _parse_fraction(parts[1], "window endpoint")
    if lo > hi:
        raise UsageError("window is empty: %s > %s" % (lo, hi))
    return (lo, hi)


def _parse_point(text: str, n: int):
    parts = text.split(",")
    if len(parts) != n:
        raise UsageError("expected %d comma-separated coordinates, got %d"
                         % (n, len(parts)))
    coords = []
    for k, tok in enumerate(parts):
        try:
            coords.append(Fraction(tok))
        except (ValueError, ZeroDivisionError):
            raise UsageError("bad coordinate at position %d: %r" % (k + 1, tok))
    if sum(coords) != 0:
        raise UsageError("coordinates must sum to zero")
    return apartment_point(coords)


def _is_odd_prime(p: int) -> bool:
    if p < 3 or p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def _config_from(args) -> RunConfig:
    if not _is_odd_prime(args.p):
        raise UsageError("p must be an odd prime, got %d" % args.p)
    if args.precision < 4:
        raise UsageError("precision must be >= 4")
    window = _parse_window(args.window)
    budget = DEFAULT_BUDGET
    env = os.environ.get("MPORBITS_BUDGET")
    if env:
        try:
            budget = int(env)
        except ValueError:
            raise UsageError("MPORBITS_BUDGET must be an integer")
    return RunConfig(args.pair, args.p, _parse_fraction(args.r, "depth"),
                     args.precision, window, args.seed, args.format,
                     args.out, budget)


def _emit(text: str, cfg: RunConfig, filename: str) -> None:
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        with open(os.path.join(cfg.out, filename), "w") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _json_dump(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# lattice
# ---------------------------------------------------------------------------

def _bounds_rows(b: LatticeBounds) -> List[List[int]]:
    return [list(row) for row in b.bounds]


def _lattice_text(x, lax: LatticeBounds, strict: LatticeBounds) -> str:
    lines = ["point x = (%s)" % ", ".join(str(c) for c in x.coords),
             "depth r = %s" % lax.r]
    lines.append("entry bounds at r (valuation floors):")
    for row in lax.bounds:
        lines.append("  [" + "  ".join("%3d" % v for v in row) + "]")
    lines.append("entry bounds at r+ (strict):")
    for row in strict.bounds:
        lines.append("  [" + "  ".join("%3d" % v for v in row) + "]")
    lines.append("quotient shape (p^a/p^b where the bounds differ, else 0):")
    for i in range(lax.n):
        cells = []
        for j in range(lax.n):
            a, b = lax.entry(i, j), strict.entry(i, j)
            cells.append("p^%d/p^%d" % (a, b) if a != b else "0")
        lines.append("  [" + "  ".join("%9s" % c for c in cells) + "]")
    return "\n".join(lines) + "\n"


def cmd_lattice(cfg: RunConfig, point_text: str) -> int:
    pair = cfg.pair_obj()
    x = _parse_point(point_text, pair.n)
    lax = mp_lattice(x, cfg.r)
    strict = mp_lattice(x, cfg.r, strict=True)
    if cfg.format == "json":
        payload = {"pair": cfg.pair, "p": cfg.p, "r": str(cfg.r),
                   "x": [str(c) for c in x.coords],
                   "bounds": _bounds_rows(lax),
                   "strict_bounds": _bounds_rows(strict)}
        _emit(_json_dump(payload), cfg, "lattice.json")
    elif cfg.format == "tsv":
        rows = ["kind\t" + "\t".join("c%d" % j for j in range(pair.n))]
        for name, b in (("r", lax), ("r+", strict)):
            for row in b.bounds:
                rows.append(name + "\t" + "\t".join(str(v) for v in row))
        _emit("\n".join(rows) + "\n", cfg, "lattice.tsv")
    else:
        _emit(_lattice_text(x, lax, strict), cfg, "lattice.txt")
    return EXIT_OK


# ---------------------------------------------------------------------------
# orbits
# ---------------------------------------------------------------------------

def _facet_inventory(cfg: RunConfig):
    pair = cfg.pair_obj()
    facets = enumerate_theta_facets(cfg.window, cfg.r, pair)
    inventory = []
    for F in facets:
        space = residue_space(F, pair, cfg.p)
        group = action_group(space)
        records = enumerate_orbits(space, group, budget=cfg.budget)
        orbits = []
        for rec in records:
            entry = {"rep": list(rec.rep), "size": rec.size,
                     "degenerate": rec.degenerate, "noticed": False}
            if rec.degenerate:
                coset = space.coset(rec.rep)
                entry["noticed"] = (is_noticed_rank(coset, space)
                                    and is_noticed_building(coset, group))
            orbits.append(entry)
        inventory.append((space, group, {"facet": F.describe(), "p": cfg.p,
                                         "dim_minus": space.dim_minus,
                                         "orbits": orbits}))
    return inventory


def cmd_orbits(cfg: RunConfig) -> int:
    inventory = _facet_inventory(cfg)
    noticed = []
    for space, group, table in inventory:
        for entry in table["orbits"]:
            if entry["noticed"]:
                noticed.append((space, space.coset(tuple(entry["rep"]))))
    # count equivalence classes among the noticed pairs
    k = len(noticed)
    parent = list(range(k))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(k):
        for j in range(i + 1, k):
            if find(i) != find(j) and pairs_equivalent(noticed[i][1],
                                                       noticed[j][1]):
                parent[find(j)] = find(i)
    n_classes = len({find(i) for i in range(k)})
    payload = {"pair": cfg.pair, "p": cfg.p, "r": str(cfg.r),
               "window": [str(w) for w in cfg.window],
               "seed": cfg.seed,
               "facets": [table for _, _, table in inventory],
               "noticed_equivalence_classes": n_classes}
    _emit(_json_dump(payload), cfg, "orbits.json")
    return EXIT_OK


# ---------------------------------------------------------------------------
# match
# ---------------------------------------------------------------------------

def cmd_match(cfg: RunConfig) -> int:
    report = verify_bijection(cfg.pair, cfg.p, cfg.r, cfg.window,
                              budget=cfg.budget)
    report["seed"] = cfg.seed
    _emit(_json_dump(report), cfg, "match.json")
    if report["status"] != "bijective":
        raise CheckFailed("bijection check failed")
    return EXIT_OK


# ---------------------------------------------------------------------------
# example
# ---------------------------------------------------------------------------

def cmd_example(cfg: RunConfig) -> int:
    if cfg.pair != "sl3":
        raise UsageError("the worked example runs on the sl3 pair")
    pair = cfg.pair_obj()
    lines: List[str] = []
    lines.append("depth-zero residue algebras on the fixed line, p = %d" % cfg.p)
    noticed_counts = []
    for t in (Fraction(0), Fraction(1, 4), Fraction(1, 2)):
        x = apartment_point([t, 0, -t])
        F = facet_of(x, cfg.r, pair)
        space = residue_space(F, pair, cfg.p)
        lax = mp_lattice(x, cfg.r)
        strict = mp_lattice(x, cfg.r, strict=True)
        lines.append("")
        lines.append("facet %s: dim V = %d, dim V+ = %d, dim V- = %d (%s)"
                     % (F.describe(), space.dim, space.dim_plus,
                        space.dim_minus, " ".join(space.minus_labels())))
        for i in range(3):
            cells = []
            for j in range(3):
                a, b = lax.entry(i, j), strict.entry(i, j)
                cells.append("p^%d/p^%d" % (a, b) if a != b else "0")
            lines.append("  [" + "  ".join("%9s" % c for c in cells) + "]")
        group = action_group(space)
        records = enumerate_orbits(space, group, budget=cfg.budget)
        n_noticed = 0
        for rec in records:
            if not rec.degenerate:
                continue
            coset = space.coset(rec.rep)
            if is_noticed_rank(coset, space) and is_noticed_building(coset, group):
                n_noticed += 1
        noticed_counts.append(n_noticed)
    lines.append("")
    lines.append("noticed classes per facet: %s"
                 % " ".join(str(c) for c in noticed_counts))
    report = verify_bijection(cfg.pair, cfg.p, cfg.r, cfg.window,
                              budget=cfg.budget)
    lines.append("")
    lines.append("matching of noticed classes with orbit labels:")
    for left, right in report["matching"]:
        lines.append("  %-36s ->  %s" % (left, right))
    lines.append("status: %s" % report["status"])
    _emit("\n".join(lines) + "\n", cfg, "example.txt")
    if noticed_counts != [3, 1, 2]:
        raise CheckFailed("noticed counts %s differ from (3, 1, 2)"
                          % noticed_counts)
    if report["status"] != "bijective":
        raise CheckFailed("bijection check failed")
    return EXIT_OK


# ---------------------------------------------------------------------------
# figure
# ---------------------------------------------------------------------------

def _render_png(rows, path: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 6))
    styles = {
        "hyperplane": dict(color="0.6", lw=0.8, zorder=1),
        "fixed-line": dict(color="black", lw=1.2, ls=":", zorder=2),
        "facet-edge": dict(color="tab:blue", lw=2.5, zorder=3),
    }
    for row in rows[1:]:
        kind = row[0]
        u1, v1, u2, v2 = (float(Fraction(c)) for c in row[1:5])
        if kind == "facet-vertex":
            ax.plot([u1], [v1], marker="o", color="tab:red", ms=5, zorder=4)
        else:
            ax.plot([u1, u2], [v1, v2], **styles[kind])
    ax.set_aspect("equal")
    ax.set_xlabel("u")
    ax.set_ylabel("v")
    ax.set_title("apartment walls and the fixed line")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def cmd_figure(cfg: RunConfig) -> int:
    pair = cfg.pair_obj()
    rows = figure_coords(cfg.window, cfg.r, pair)
    text = "\n".join("\t".join(row) for row in rows) + "\n"
    _emit(text, cfg, "figure.tsv")
    if cfg.out:
        _render_png(rows, os.path.join(cfg.out, "figure.png"))
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mporbits",
        description="nilpotent orbit tables for split p-adic symmetric pairs")
    parser.add_argument("--pair", choices=("sl3", "sl2"), default="sl3")
    parser.add_argument("--p", type=int, default=5)
    parser.add_argument("--r", default="0", help="depth (exact fraction)")
    parser.add_argument("--precision", type=int, default=12)
    parser.add_argument("--window", default="0,1",
                        help="fixed-line window 'lo,hi' (exact fractions)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--format", choices=("json", "text", "tsv"),
                        default="text")
    parser.add_argument("--out", default=None,
                        help="directory for file artifacts (figures, reports)")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("example", help="reproduce the depth-zero worked tables")
    lat = sub.add_parser("lattice", help="entry bounds of the depth lattice")
    lat.add_argument("x", help="apartment point, comma-separated fractions")
    sub.add_parser("orbits", help="orbit inventory per facet (JSON)")
    sub.add_parser("match", help="run the bijection check (JSON report)")
    sub.add_parser("figure", help="apartment figure data (TSV, plus PNG with --out)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        cfg = _config_from(args)
        if args.command == "example":
            return cmd_example(cfg)
        if args.command == "lattice":
            return cmd_lattice(cfg, args.x)
        if args.command == "orbits":
            return cmd_orbits(cfg)
        if args.command == "match":
            return cmd_match(cfg)
        if args.command == "figure":
            return cmd_figure(cfg)
        raise UsageError("unknown command %r" % args.command)
    except UsageError as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print("budget exceeded: %s" % exc, file=sys.stderr)
        return EXIT_BUDGET
    except (CheckFailed, AssertionError) as exc:
        print("check failed: %s" % exc, file=sys.stderr)
        return EXIT_ASSERTION


def run_cli_for_tests(args: Sequence[str]):
    """Run main() in-process with captured streams (test support)."""
    import contextlib
    import io

    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(list(args))
    return code, out.getvalue(), err.getvalue()


if __name__ == "__main__":
    sys.exit(main())
