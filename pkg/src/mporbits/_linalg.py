"""Small exact linear solvers over Q and F_p used across the package.

Matrices are lists of rows; a system is A @ x = b with A of shape m x n.
Everything is deterministic: pivots are chosen first-come, particular
solutions set free variables to zero, and kernels are read off the reduced
echelon form in column order.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import List, Optional, Sequence, Tuple

from .arith import val_p


# ---------------------------------------------------------------------------
# rationals
# ---------------------------------------------------------------------------

def frac_rref(rows: List[List[Fraction]]) -> Tuple[List[List[Fraction]], List[int]]:
    m = [list(map(Fraction, row)) for row in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        piv = m[r][c]
        m[r] = [v / piv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def frac_solve(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]
               ) -> Optional[List[Fraction]]:
    """One solution of A x = b with free variables zero, or None."""
    if not A:
        return []
    n = len(A[0])
    aug = [list(map(Fraction, row)) + [Fraction(v)] for row, v in zip(A, b)]
    red, pivots = frac_rref(aug)
    for row in red:
        if all(v == 0 for v in row[:-1]) and row[-1] != 0:
            return None
    if n in pivots:
        return None  # pivot in the augmented column
    x = [Fraction(0)] * n
    for ri, c in enumerate(pivots):
        x[c] = red[ri][-1]
    return x


def frac_kernel(A: Sequence[Sequence[Fraction]]) -> List[List[Fraction]]:
    if not A:
        return []
    n = len(A[0])
    red, pivots = frac_rref([list(row) for row in A])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for ri, c in enumerate(pivots):
            v[c] = -red[ri][fc]
        basis.append(v)
    return basis


def frac_membership(vectors: Sequence[Sequence[Fraction]],
                    target: Sequence[Fraction]) -> Optional[List[Fraction]]:
    """Coordinates of target in span(vectors), or None."""
    if not vectors:
        return [] if all(Fraction(t) == 0 for t in target) else None
    cols = list(vectors)
    A = [[cols[j][i] for j in range(len(cols))] for i in range(len(target))]
    return frac_solve(A, list(target))


# ---------------------------------------------------------------------------
# F_p (matrices of plain ints, reduced mod p)
# ---------------------------------------------------------------------------

def fp_rref(rows: List[List[int]], p: int) -> Tuple[List[List[int]], List[int]]:
    m = [[v % p for v in row] for row in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c] % p != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [v * inv % p for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] % p != 0:
                f = m[i][c]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def fp_solve(A: Sequence[Sequence[int]], b: Sequence[int], p: int
             ) -> Optional[List[int]]:
    if not A:
        return []
    n = len(A[0])
    aug = [list(row) + [v] for row, v in zip(A, b)]
    red, pivots = fp_rref(aug, p)
    for row in red:
        if all(v % p == 0 for v in row[:-1]) and row[-1] % p != 0:
            return None
    if n in pivots:
        return None
    x = [0] * n
    for ri, c in enumerate(pivots):
        x[c] = red[ri][-1] % p
    return x


def fp_kernel(A: Sequence[Sequence[int]], p: int) -> List[List[int]]:
    if not A:
        return []
    n = len(A[0])
    red, pivots = fp_rref([list(row) for row in A], p)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * n
        v[fc] = 1
        for ri, c in enumerate(pivots):
            v[c] = -red[ri][fc] % p
        basis.append(v)
    return basis


def fp_lex_least_solution(A: Sequence[Sequence[int]], b: Sequence[int], p: int,
                          cap: int = 200_000) -> Optional[Tuple[int, ...]]:
    """Lexicographically least solution of A x = b over F_p, or None.

    The solution set is a coset of the kernel; it is enumerated outright
    (the kernels met here are tiny).
    """
    part = fp_solve(A, b, p)
    if part is None:
        return None
    ker = fp_kernel(A, p)
    if not ker:
        return tuple(part)
    if p ** len(ker) > cap:
        raise ValueError("solution coset too large to enumerate")
    best = None
    for coeffs in product(range(p), repeat=len(ker)):
        x = list(part)
        for c, k in zip(coeffs, ker):
            if c:
                x = [(xi + c * ki) % p for xi, ki in zip(x, k)]
        t = tuple(x)
        if best is None or t < best:
            best = t
    return best


# ---------------------------------------------------------------------------
# lattice saturation
# ---------------------------------------------------------------------------

def _min_valuation(vec: Sequence[Fraction], p: int):
    vals = [val_p(v, p) for v in vec if v != 0]
    return min(vals) if vals else None


def saturate_lattice(rows: Sequence[Sequence[Fraction]], p: int
                     ) -> List[List[Fraction]]:
    """Z_p-lattice basis of span_Q(rows) intersected with Z_p^m.

    Rows are rescaled to minimal valuation zero; while the reductions mod p
    are dependent, a dependent combination is divided by p and substituted
    back, strictly deepening the lattice index until the reductions become
    independent.
    """
    work = [list(map(Fraction, r)) for r in rows]
    work = [r for r in work if any(v != 0 for v in r)]
    # drop rational dependencies first
    red, pivots = frac_rref([list(r) for r in work])
    work = [red[i] for i in range(len(pivots))]
    while True:
        scaled = []
        for r in work:
            mv = _min_valuation(r, p)
            scaled.append([v * Fraction(p) ** (-mv) for v in r])
        if not scaled:
            return []
        resid = [[residue_row(v, p) for v in r] for r in scaled]
        combo = _fp_dependency(resid, p)
        if combo is None:
            return scaled
        j = max(i for i, c in enumerate(combo) if c != 0)
        new = [Fraction(0)] * len(scaled[0])
        for i, c in enumerate(combo):
            if c:
                new = [a + c * b for a, b in zip(new, scaled[i])]
        new = [v / p for v in new]
        work = [scaled[i] for i in range(len(scaled)) if i != j]
        if any(v != 0 for v in new):
            work.append(new)


def residue_row(v: Fraction, p: int) -> int:
    f = Fraction(v)
    if f.denominator % p == 0:
        raise ValueError("negative valuation entry where integral expected")
    return f.numerator * pow(f.denominator, -1, p) % p


def _fp_dependency(rows: List[List[int]], p: int) -> Optional[List[int]]:
    """A nontrivial F_p-combination of the rows equal to zero, if any."""
    if not rows:
        return None
    # transpose: combinations are kernel vectors of rows^T
    m = len(rows)
    n = len(rows[0])
    At = [[rows[i][c] for i in range(m)] for c in range(n)]
    ker = fp_kernel(At, p)
    return ker[0] if ker else None
