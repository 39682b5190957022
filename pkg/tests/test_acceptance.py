"""Acceptance suite: one criterion per test, one PASS/FAIL line each.

Run with `pytest tests/test_acceptance.py -s` to see the lines.  Every
tolerance is exact (integer and rational arithmetic throughout); the stated
runtime budgets are asserted.
"""

import json
import random
import time
from fractions import Fraction

from mporbits.apartment import apartment_point, depth_of, facet_at, mp_lattice
from mporbits.classify import verify_bijection
from mporbits.cli import run_cli_for_tests
from mporbits.liealg import (Sl2Triple, bracket, conjugate, diag, elem,
                             exp_nilpotent, identity, is_nilpotent, pair_for,
                             zero)
from mporbits.lifting import (is_noticed_building, kostant_conjugator,
                              lift_sl2, prepare_diagonal_rep, slice_conjugate)
from mporbits.residue import (action_group, enumerate_orbits, is_noticed_rank,
                              residue_space)

SL3 = pair_for("sl3")
E12, E13, E21, E23, E31, E32 = (elem(3, 0, 1), elem(3, 0, 2), elem(3, 1, 0),
                                elem(3, 1, 2), elem(3, 2, 0), elem(3, 2, 1))
ORIGIN = apartment_point([0, 0, 0])

_CACHE = {}


def _facet_data(p):
    """Spaces, groups and orbit tables at the three flagship facets."""
    if p not in _CACHE:
        out = []
        for t in (Fraction(0), Fraction(1, 4), Fraction(1, 2)):
            space = residue_space(facet_at(SL3, t, 0), SL3, p)
            group = action_group(space)
            records = enumerate_orbits(space, group)
            out.append((space, group, records))
        _CACHE[p] = out
    return _CACHE[p]


def _report(n, ok, msg):
    line = "%s criterion %d: %s" % ("PASS" if ok else "FAIL", n, msg)
    print(line)
    assert ok, line


def test_criterion_01_residue_algebra_shapes():
    t0 = time.time()
    expected = {
        "0,0,0": ([[0] * 3] * 3, [[1] * 3] * 3),
        "1/4,0,-1/4": ([[0, 0, 0], [1, 0, 0], [1, 1, 0]],
                       [[1, 0, 0], [1, 1, 0], [1, 1, 1]]),
        "1/2,0,-1/2": ([[0, 0, -1], [1, 0, 0], [1, 1, 0]],
                       [[1, 0, 0], [1, 1, 0], [2, 1, 1]]),
    }
    ok = True
    for point, (bounds, strict) in expected.items():
        code, out, _ = run_cli_for_tests(["--format", "json", "lattice", point])
        payload = json.loads(out)
        ok &= (code == 0 and payload["bounds"] == bounds
               and payload["strict_bounds"] == strict)
    code, out, _ = run_cli_for_tests(["lattice", "1/2,0,-1/2"])
    ok &= "p^-1/p^0" in out and "p^1/p^2" in out
    elapsed = time.time() - t0
    ok &= elapsed < 1.0
    _report(1, ok, "lattice shapes at the three facets exact (%.2fs < 1s)"
            % elapsed)


def test_criterion_02_noticed_counts():
    t0 = time.time()
    ok = True
    for p in (5, 7):
        counts = []
        for space, group, records in _facet_data(p):
            n = 0
            for rec in records:
                if not rec.degenerate:
                    continue
                coset = space.coset(rec.rep)
                if is_noticed_rank(coset, space) and \
                        is_noticed_building(coset, group):
                    n += 1
            counts.append(n)
        ok &= counts == [3, 1, 2]
    elapsed = time.time() - t0
    ok &= elapsed < 10.0
    _report(2, ok, "noticed counts 3/1/2 at p in {5,7} (%.2fs < 10s)" % elapsed)


def test_criterion_03_bijection_sl3():
    t0 = time.time()
    ok = True
    want = sorted(["trivial", "regular", "rank1(1)", "rank1(u)", "rank1(p)",
                   "rank1(up)"])
    for p in (5, 7):
        report = verify_bijection("sl3", p)
        ok &= report["status"] == "bijective"
        ok &= len(report["noticed_classes"]) == 6
        ok &= sorted(report["labels"]) == want
        for cls in report["noticed_classes"]:
            label = cls["label"]
            for member in cls["members"]:
                if label in ("rank1(1)", "rank1(u)"):
                    ok &= member["facet"] in ("t=0", "t=1")
                if label in ("rank1(p)", "rank1(up)"):
                    ok &= member["facet"] == "t=1/2"
    elapsed = time.time() - t0
    ok &= elapsed < 30.0
    _report(3, ok, "six noticed classes biject onto the six labels, unit "
            "classes at integral vertices (%.2fs < 30s)" % elapsed)


def test_criterion_04_action_group_order():
    ok = True
    for p in (5, 7):
        space, group, _ = _facet_data(p)[0]
        ok &= group.order() == p * (p * p - 1)
    _report(4, ok, "vertex action group has order p(p^2-1) for p in {5,7}")


def test_criterion_05_slice_algorithm():
    t0 = time.time()
    rng = random.Random(20240517)
    p, digits = 5, 12
    X, Y = E13, E31
    good = 0
    for _ in range(100):
        Z = zero(3)
        for b in SL3.p_basis():
            Z = Z + b.scale(p * Fraction(rng.randrange(0, p ** 6)))
        h, C = slice_conjugate(X, Y, Z, ORIGIN, 0, digits, SL3, p)
        residual = conjugate(h, X + C) - (X + Z)
        if depth_of(residual, ORIGIN, p) >= digits and \
                bracket(C, Y).is_zero():
            good += 1
    elapsed = time.time() - t0
    ok = good == 100 and elapsed < 30.0
    _report(5, ok, "slice congruence mod p^12 with centralizing C on "
            "%d/100 runs (%.2fs < 30s)" % (good, elapsed))


def test_criterion_06_orbit_recovery():
    t0 = time.time()
    rng = random.Random(777)
    p, digits = 5, 12
    X, Y = E13, E31
    good = 0
    for _ in range(50):
        g = identity(3)
        for _ in range(rng.randint(2, 4)):
            kind = rng.randrange(3)
            if kind == 0:
                g = g * SL3.torus_element(1 + p * Fraction(rng.randrange(p ** 4)))
            elif kind == 1:
                g = g * exp_nilpotent(SL3.h_basis()[1], p * rng.randrange(p ** 4))
            else:
                g = g * exp_nilpotent(SL3.h_basis()[2], p * rng.randrange(p ** 4))
        Z = conjugate(g, X) - X
        if not mp_lattice(ORIGIN, 0, strict=True).contains(Z, p):
            continue
        h, C = slice_conjugate(X, Y, Z, ORIGIN, 0, digits, SL3, p)
        ok_run = depth_of(C, ORIGIN, p) >= digits
        ok_run &= depth_of(conjugate(h, X + C) - (X + Z), ORIGIN, p) >= digits
        if ok_run:
            good += 1
    elapsed = time.time() - t0
    ok = good == 50
    _report(6, ok, "recovered centralizer part vanishes mod p^12 on "
            "%d/50 conjugates (%.2fs)" % (good, elapsed))


def test_criterion_07_sl2_machinery_exactness():
    checked = 0
    ok = True
    for p in (5, 7):
        for space, group, records in _facet_data(p):
            for rec in records:
                if not rec.degenerate or not any(rec.rep):
                    continue
                moved, triple = prepare_diagonal_rep(space.coset(rec.rep),
                                                     group)
                try:
                    triple.check()
                    lifted = lift_sl2(triple, space)  # asserts full rank
                    lifted.check()
                    ok &= lifted.normal and triple.normal
                except (AssertionError, ValueError):
                    ok = False
                checked += 1
    _report(7, ok, "bracket identities and normality exact on all %d "
            "completion/lift runs; graded solves full rank" % checked)


def test_criterion_08_noticed_criteria_agreement():
    flagged = {5: [], 7: []}
    for p in (5, 7):
        for space, group, records in _facet_data(p):
            for rec in records:
                if not rec.degenerate:
                    continue
                coset = space.coset(rec.rep)
                a = is_noticed_rank(coset, space)
                b = is_noticed_building(coset, group)
                if a != b:
                    flagged[p].append((space.facet.describe(), rec.rep, a, b))
    for facet, rep, a, b in flagged[5]:
        print("FLAG criterion 8 (p=5 below the Coxeter bound): facet %s "
              "rep %s rank=%s building=%s" % (facet, rep, a, b))
    ok = flagged[7] == []
    _report(8, ok, "rank and building noticed criteria agree on every "
            "degenerate class (p=5 flagged: %d, p=7 disagreements: %d)"
            % (len(flagged[5]), len(flagged[7])))


def test_criterion_09_kostant_conjugator():
    rng = random.Random(4242)
    t1 = Sl2Triple(E31, diag([1, 0, -1]), E13, True)
    good = 0
    for _ in range(10):
        u = Fraction(rng.randint(-50, 50), rng.randint(1, 9))
        g = exp_nilpotent(SL3.h_basis()[1], u)
        t2 = Sl2Triple(conjugate(g, t1.Y), conjugate(g, t1.H),
                       conjugate(g, t1.X), True)
        W = kostant_conjugator(t1, t2, SL3)
        gw = exp_nilpotent(W)
        if conjugate(gw, t1.H) == t2.H and conjugate(gw, t1.Y) == t2.Y:
            good += 1
    _report(9, good == 10,
            "conjugator recovered exactly on %d/10 seeded pairs" % good)


def test_criterion_10_degeneracy_oracle():
    # independent oracle: nilpotency of the graded matrix model
    ok = True
    total = 0
    for space, group, records in _facet_data(5):
        for rec in records:
            for v in rec.orbit:
                total += 1
                if is_nilpotent(space.minus_model(v)) != rec.degenerate:
                    ok = False
    _report(10, ok, "one-parameter-subgroup degeneracy agrees with the "
            "matrix-model oracle on all %d cosets at p=5" % total)


def test_criterion_11_bijection_sl2():
    expected = {"trivial"}
    for side in ("upper", "lower"):
        for tag in ("1", "u", "p", "up"):
            expected.add("%s(%s)" % (side, tag))
    report = verify_bijection("sl2", 5)
    ok = (report["status"] == "bijective"
          and len(report["noticed_classes"]) == 9
          and set(report["labels"]) == expected)
    _report(11, ok, "nine noticed classes biject onto the nine derived "
            "labels for the rank-two pair")
