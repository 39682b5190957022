"""Exact solvers and the lattice saturation routine."""

import random
from fractions import Fraction

from mporbits._linalg import (fp_kernel, fp_lex_least_solution, fp_solve,
                              frac_kernel, frac_membership, frac_solve,
                              saturate_lattice)
from mporbits.arith import val_p


def test_frac_solve_and_kernel():
    A = [[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]]
    assert frac_solve(A, [Fraction(3), Fraction(6)]) == [Fraction(3), Fraction(0)]
    assert frac_solve(A, [Fraction(1), Fraction(0)]) is None
    ker = frac_kernel(A)
    assert len(ker) == 1
    v = ker[0]
    assert v[0] * 1 + v[1] * 2 == 0


def test_frac_membership():
    basis = [[Fraction(1), Fraction(0), Fraction(1)],
             [Fraction(0), Fraction(1), Fraction(1)]]
    coords = frac_membership(basis, [Fraction(2), Fraction(3), Fraction(5)])
    assert coords == [Fraction(2), Fraction(3)]
    assert frac_membership(basis, [Fraction(1), Fraction(0), Fraction(0)]) is None


def test_fp_solvers():
    A = [[1, 2], [3, 4]]
    x = fp_solve(A, [1, 0], 5)
    assert x is not None
    assert [(r[0] * x[0] + r[1] * x[1]) % 5 for r in A] == [1, 0]
    assert fp_solve([[1, 1], [2, 2]], [1, 1], 5) is None
    assert fp_kernel([[1, 1]], 5) == [[4, 1]]


def test_fp_lex_least_picks_the_smallest_solution():
    # x + y = 1 over F_5: solutions (0,1), (1,0), ... lex-least is (0,1)
    assert fp_lex_least_solution([[1, 1]], [1], 5) == (0, 1)
    # unsolvable
    assert fp_lex_least_solution([[0, 0]], [1], 5) is None
    # brute-force cross-check on a random system
    rng = random.Random(3)
    for _ in range(20):
        A = [[rng.randrange(5) for _ in range(3)] for _ in range(2)]
        b = [rng.randrange(5) for _ in range(2)]
        got = fp_lex_least_solution(A, b, 5)
        best = None
        for x0 in range(5):
            for x1 in range(5):
                for x2 in range(5):
                    x = (x0, x1, x2)
                    if all(sum(a * v for a, v in zip(row, x)) % 5 == t % 5
                           for row, t in zip(A, b)):
                        best = x if best is None else min(best, x)
        assert got == best


def _span_equal_q(rows1, rows2):
    for v in rows1:
        if frac_membership(rows2, v) is None:
            return False
    for v in rows2:
        if frac_membership(rows1, v) is None:
            return False
    return True


def test_saturate_lattice_known_cases():
    p = 5
    # (1/5, 1) scaled into the integral lattice becomes (1, 5)
    got = saturate_lattice([[Fraction(1, 5), Fraction(1)]], p)
    assert got == [[Fraction(1), Fraction(5)]]
    # already saturated
    got = saturate_lattice([[Fraction(1), Fraction(1)], [Fraction(0), Fraction(1)]], p)
    assert len(got) == 2
    # dependent-mod-p rows combine: (1,0),(1,5) spans everything integrally
    got = saturate_lattice([[Fraction(1), Fraction(0)],
                            [Fraction(1), Fraction(5)]], p)
    assert len(got) == 2
    # their reductions are independent mod p
    red = [[int(v) % p for v in row] for row in got]
    assert fp_kernel([[red[0][0], red[1][0]], [red[0][1], red[1][1]]], p) == []


def test_saturate_lattice_random_properties():
    rng = random.Random(9)
    p = 5
    for _ in range(30):
        k = rng.randint(1, 3)
        rows = [[Fraction(rng.randint(-20, 20), p ** rng.randint(0, 2))
                 for _ in range(4)] for _ in range(k)]
        rows = [r for r in rows if any(r)]
        if not rows:
            continue
        sat = saturate_lattice(rows, p)
        # same rational span
        assert _span_equal_q(sat, [list(r) for r in rows]) or len(sat) < len(rows)
        for v in sat:
            # integral with minimal valuation zero
            vals = [val_p(c, p) for c in v if c != 0]
            assert min(vals) == 0
        # reductions mod p independent
        if sat:
            cols = [[int(Fraction(v[i]).numerator
                         * pow(Fraction(v[i]).denominator, -1, p)) % p
                     for v in sat] for i in range(4)]
            assert fp_kernel(cols, p) == []
