"""Matrix Lie algebra sl_n over Q or F_p, the split involution, eigenspace
decomposition, and sl2-triple completion by linear algebra.

The involution is conjugate-inverse-transpose by the antidiagonal permutation
J on the group, X -> -J X^t J on the Lie algebra.  Its fixed group H is the
special orthogonal group of the antidiagonal form; for n = 3 that group is
the image of PGL_2 under the symmetric-square representation, for n = 2 it is
the diagonal torus.  The (+1)/(-1) eigenspaces of the Lie algebra involution
are written h and p throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from .arith import FpScalar
from ._linalg import (fp_kernel, fp_lex_least_solution, frac_kernel,
                      frac_membership, frac_rref)

Scalar = Union[Fraction, FpScalar]


class NoSl2TripleError(ValueError):
    """Raised when the completion linear system is inconsistent."""


@dataclass(frozen=True)
class LieMatrix:
    """Square matrix over Q (Fraction entries) or F_p (FpScalar entries).

    Instances double as group elements (exp images, torus elements); the
    trace-zero invariant is enforced by the ``lie_q`` / ``lie_fp`` factories
    rather than by the container.
    """

    entries: Tuple[Tuple[Scalar, ...], ...]
    prime: Optional[int]  # None for rational entries

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    # -- ring structure ----------------------------------------------------

    def _same_field(self, other: "LieMatrix"):
        if self.prime != other.prime or self.n != other.n:
            raise ValueError("field or size mismatch")

    def __add__(self, other: "LieMatrix") -> "LieMatrix":
        self._same_field(other)
        return LieMatrix(tuple(tuple(a + b for a, b in zip(ra, rb))
                               for ra, rb in zip(self.entries, other.entries)),
                         self.prime)

    def __sub__(self, other: "LieMatrix") -> "LieMatrix":
        self._same_field(other)
        return LieMatrix(tuple(tuple(a - b for a, b in zip(ra, rb))
                               for ra, rb in zip(self.entries, other.entries)),
                         self.prime)

    def __neg__(self) -> "LieMatrix":
        return LieMatrix(tuple(tuple(-a for a in row) for row in self.entries),
                         self.prime)

    def __mul__(self, other: "LieMatrix") -> "LieMatrix":
        self._same_field(other)
        n = self.n
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = self.entries[i][0] * other.entries[0][j]
                for k in range(1, n):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            rows.append(tuple(row))
        return LieMatrix(tuple(rows), self.prime)

    def scale(self, c) -> "LieMatrix":
        c = self._coerce_scalar(c)
        return LieMatrix(tuple(tuple(c * a for a in row) for row in self.entries),
                         self.prime)

    def _coerce_scalar(self, c) -> Scalar:
        if self.prime is None:
            return Fraction(c) if not isinstance(c, Fraction) else c
        if isinstance(c, FpScalar):
            return c
        return FpScalar.make(Fraction(c), self.prime)

    # -- structure ---------------------------------------------------------

    def transpose(self) -> "LieMatrix":
        n = self.n
        return LieMatrix(tuple(tuple(self.entries[j][i] for j in range(n))
                               for i in range(n)), self.prime)

    def trace(self) -> Scalar:
        acc = self.entries[0][0]
        for i in range(1, self.n):
            acc = acc + self.entries[i][i]
        return acc

    def is_zero(self) -> bool:
        return all(not v for row in self.entries for v in row)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def power(self, k: int) -> "LieMatrix":
        acc = identity(self.n, self.prime)
        for _ in range(k):
            acc = acc * self
        return acc

    def det(self) -> Scalar:
        n = self.n
        e = self.entries
        if n == 1:
            return e[0][0]
        if n == 2:
            return e[0][0] * e[1][1] - e[0][1] * e[1][0]
        if n == 3:
            return (e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1])
                    - e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0])
                    + e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0]))
        raise ValueError("det implemented for n <= 3")

    def inverse(self) -> "LieMatrix":
        n = self.n
        aug = [list(self.entries[i]) + [self._coerce_scalar(1 if j == i else 0)
                                        for j in range(n)] for i in range(n)]
        for col in range(n):
            pr = next((r for r in range(col, n) if aug[r][col]), None)
            if pr is None:
                raise ZeroDivisionError("singular matrix")
            aug[col], aug[pr] = aug[pr], aug[col]
            piv = aug[col][col]
            aug[col] = [v / piv for v in aug[col]]
            for r in range(n):
                if r != col and aug[r][col]:
                    f = aug[r][col]
                    aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
        return LieMatrix(tuple(tuple(row[n:]) for row in aug), self.prime)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def qmat(rows: Sequence[Sequence]) -> LieMatrix:
    return LieMatrix(tuple(tuple(Fraction(v) for v in row) for row in rows), None)


def fpmat(rows: Sequence[Sequence], p: int) -> LieMatrix:
    conv = []
    for row in rows:
        out = []
        for v in row:
            out.append(v if isinstance(v, FpScalar) else FpScalar.make(Fraction(v), p))
        conv.append(tuple(out))
    return LieMatrix(tuple(conv), p)


def lie_q(rows: Sequence[Sequence]) -> LieMatrix:
    m = qmat(rows)
    if m.trace() != 0:
        raise ValueError("trace must vanish")
    return m


def lie_fp(rows: Sequence[Sequence], p: int) -> LieMatrix:
    m = fpmat(rows, p)
    if m.trace():
        raise ValueError("trace must vanish")
    return m


def identity(n: int, prime: Optional[int] = None) -> LieMatrix:
    rows = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    return qmat(rows) if prime is None else fpmat(rows, prime)


def zero(n: int, prime: Optional[int] = None) -> LieMatrix:
    rows = [[0] * n for _ in range(n)]
    return qmat(rows) if prime is None else fpmat(rows, prime)


def elem(n: int, i: int, j: int, prime: Optional[int] = None) -> LieMatrix:
    rows = [[1 if (a, b) == (i, j) else 0 for b in range(n)] for a in range(n)]
    return qmat(rows) if prime is None else fpmat(rows, prime)


def diag(values: Sequence, prime: Optional[int] = None) -> LieMatrix:
    n = len(values)
    rows = [[values[i] if i == j else 0 for j in range(n)] for i in range(n)]
    return qmat(rows) if prime is None else fpmat(rows, prime)


def reduce_mod_p(X: LieMatrix, p: int) -> LieMatrix:
    """Entry-wise reduction of a p-integral rational matrix."""
    if X.prime is not None:
        raise ValueError("already a mod-p matrix")
    return fpmat([[FpScalar.make(v, p) for v in row] for row in X.entries], p)


# ---------------------------------------------------------------------------
# involution and eigenspaces
# ---------------------------------------------------------------------------

def antidiagonal_j(n: int, prime: Optional[int] = None) -> LieMatrix:
    rows = [[1 if i + j == n - 1 else 0 for j in range(n)] for i in range(n)]
    return qmat(rows) if prime is None else fpmat(rows, prime)


@dataclass(frozen=True)
class Involution:
    """The split involution A -> J (A^t)^-1 J, with differential X -> -J X^t J."""

    n: int

    def on_group(self, A: LieMatrix) -> LieMatrix:
        J = antidiagonal_j(self.n, A.prime)
        return J * A.transpose().inverse() * J

    def on_algebra(self, X: LieMatrix) -> LieMatrix:
        J = antidiagonal_j(self.n, X.prime)
        return -(J * X.transpose() * J)


def dtheta(X: LieMatrix) -> LieMatrix:
    return Involution(X.n).on_algebra(X)


def bracket(X: LieMatrix, Y: LieMatrix) -> LieMatrix:
    return X * Y - Y * X


def eigen_split(X: LieMatrix) -> Tuple[LieMatrix, LieMatrix]:
    """X = X_h + X_p with dtheta(X_h) = X_h and dtheta(X_p) = -X_p."""
    s = dtheta(X)
    half = Fraction(1, 2)
    return (X + s).scale(half), (X - s).scale(half)


def in_plus_part(X: LieMatrix) -> bool:
    return (dtheta(X) - X).is_zero()


def in_minus_part(X: LieMatrix) -> bool:
    return (dtheta(X) + X).is_zero()


def is_nilpotent(X: LieMatrix) -> bool:
    return X.power(X.n).is_zero()


# ---------------------------------------------------------------------------
# exponentials
# ---------------------------------------------------------------------------

def exp_nilpotent(N: LieMatrix, t=1) -> LieMatrix:
    """exp(t N) as a finite sum; N must be nilpotent (and, mod p, the
    nilpotency degree must stay below p)."""
    n = N.n
    if not N.power(n).is_zero():
        raise ValueError("matrix is not nilpotent")
    acc = identity(n, N.prime)
    term = identity(n, N.prime)
    tN = N.scale(t)
    for k in range(1, n):
        if N.prime is not None and k >= N.prime:
            raise ValueError("characteristic too small for exp")
        term = (term * tN).scale(Fraction(1, k))
        acc = acc + term
    one = acc._coerce_scalar(1)
    if acc.det() != one:
        raise AssertionError("exp lost determinant one")
    return acc


def ad_exp_series(N: LieMatrix, M: LieMatrix) -> LieMatrix:
    """Sum of ad(N)^i (M) / i!, the adjoint action of exp(N)."""
    acc = M
    term = M
    k = 1
    while True:
        term = bracket(N, term).scale(Fraction(1, k))
        if term.is_zero():
            return acc
        acc = acc + term
        k += 1
        if k > 2 * N.n * N.n:
            raise AssertionError("ad series failed to terminate")


def conjugate(g: LieMatrix, X: LieMatrix) -> LieMatrix:
    """Adjoint action g X g^-1."""
    return g * X * g.inverse()


# ---------------------------------------------------------------------------
# sl2 triples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Sl2Triple:
    """A triple {Y, H, X} with [H,X] = 2X, [H,Y] = -2Y, [X,Y] = H.

    ``normal`` records that X, Y lie in the (-1)-eigenspace and H in the
    (+1)-eigenspace of the involution.
    """

    Y: LieMatrix
    H: LieMatrix
    X: LieMatrix
    normal: bool

    def check(self) -> None:
        two_x = self.X.scale(2)
        two_y = self.Y.scale(2)
        if not (bracket(self.H, self.X) - two_x).is_zero():
            raise AssertionError("[H,X] != 2X")
        if not (bracket(self.H, self.Y) + two_y).is_zero():
            raise AssertionError("[H,Y] != -2Y")
        if not (bracket(self.X, self.Y) - self.H).is_zero():
            raise AssertionError("[X,Y] != H")
        if self.normal:
            if not (in_minus_part(self.X) and in_minus_part(self.Y)
                    and in_plus_part(self.H)):
                raise AssertionError("normality flags wrong")

    def is_trivial(self) -> bool:
        return self.X.is_zero() and self.Y.is_zero() and self.H.is_zero()

    @classmethod
    def trivial(cls, n: int, prime: Optional[int] = None) -> "Sl2Triple":
        z = zero(n, prime)
        return cls(z, z, z, True)


def _flatten_fp(M: LieMatrix) -> List[int]:
    return [v.residue for row in M.entries for v in row]


def _flatten_q(M: LieMatrix) -> List[Fraction]:
    return [v for row in M.entries for v in row]


def _combine(basis: Sequence[LieMatrix], coeffs: Sequence) -> LieMatrix:
    acc = zero(basis[0].n, basis[0].prime)
    for c, b in zip(coeffs, basis):
        if c:
            acc = acc + b.scale(c)
    return acc


def complete_sl2(e: LieMatrix, minus_basis: Sequence[LieMatrix],
                 plus_basis: Sequence[LieMatrix]) -> Sl2Triple:
    """Complete a nilpotent e over F_p to a triple {f, h, e} with h in the
    span of ``plus_basis`` and f in the span of ``minus_basis``.

    h is found as [e, w] with w in the minus span solving [[e,w],e] = 2e;
    then f solves [e,f] = h, [h,f] = -2f.  Both solves take the
    lexicographically least solution in the given basis order, which pins the
    non-uniqueness of (f, h) deterministically.
    """
    p = e.prime
    if p is None:
        raise ValueError("complete_sl2 expects a mod-p matrix")
    if p < 5:
        raise NoSl2TripleError("completion needs p >= 5 at this rank")
    if e.is_zero():
        return Sl2Triple.trivial(e.n, p)
    if not is_nilpotent(e):
        raise NoSl2TripleError("e is not nilpotent")

    cols_w = [_flatten_fp(bracket(bracket(e, b), e)) for b in minus_basis]
    A = [[cols_w[j][i] for j in range(len(minus_basis))]
         for i in range(len(cols_w[0]))]
    rhs = _flatten_fp(e.scale(2))
    w_coords = fp_lex_least_solution(A, rhs, p)
    if w_coords is None:
        raise NoSl2TripleError("no neutral element: e not nilpotent or p too small")
    h = bracket(e, _combine(minus_basis, w_coords))

    rows = []
    rhs2 = []
    cols_ef = [_flatten_fp(bracket(e, b)) for b in minus_basis]
    cols_hf = [_flatten_fp(bracket(h, b) + b.scale(2)) for b in minus_basis]
    dim_flat = len(cols_ef[0])
    for i in range(dim_flat):
        rows.append([cols_ef[j][i] for j in range(len(minus_basis))])
        rhs2.append(_flatten_fp(h)[i])
    for i in range(dim_flat):
        rows.append([cols_hf[j][i] for j in range(len(minus_basis))])
        rhs2.append(0)
    f_coords = fp_lex_least_solution(rows, rhs2, p)
    if f_coords is None:
        raise NoSl2TripleError("no lowering element for (h, e)")
    f = _combine(minus_basis, f_coords)

    normal = in_minus_part(e) and in_minus_part(f) and in_plus_part(h)
    triple = Sl2Triple(f, h, e, normal)
    triple.check()
    return triple


def complete_sl2_q(e: LieMatrix, minus_basis: Sequence[LieMatrix],
                   plus_basis: Sequence[LieMatrix]) -> Sl2Triple:
    """Rational counterpart of complete_sl2: deterministic echelon solutions
    (free variables zero) replace the finite-field lexicographic choice."""
    from ._linalg import frac_solve
    if e.prime is not None:
        raise ValueError("complete_sl2_q expects a rational matrix")
    if e.is_zero():
        return Sl2Triple.trivial(e.n)
    if not is_nilpotent(e):
        raise NoSl2TripleError("e is not nilpotent")
    cols_w = [_flatten_q(bracket(bracket(e, b), e)) for b in minus_basis]
    A = [[cols_w[j][i] for j in range(len(minus_basis))]
         for i in range(len(cols_w[0]))]
    w_coords = frac_solve(A, _flatten_q(e.scale(2)))
    if w_coords is None:
        raise NoSl2TripleError("no neutral element over Q")
    h = bracket(e, _combine(minus_basis, w_coords))
    rows = []
    rhs = []
    cols_ef = [_flatten_q(bracket(e, b)) for b in minus_basis]
    cols_hf = [_flatten_q(bracket(h, b) + b.scale(2)) for b in minus_basis]
    h_flat = _flatten_q(h)
    for i in range(len(cols_ef[0])):
        rows.append([cols_ef[j][i] for j in range(len(minus_basis))])
        rhs.append(h_flat[i])
    for i in range(len(cols_hf[0])):
        rows.append([cols_hf[j][i] for j in range(len(minus_basis))])
        rhs.append(Fraction(0))
    f_coords = frac_solve(rows, rhs)
    if f_coords is None:
        raise NoSl2TripleError("no lowering element over Q")
    f = _combine(minus_basis, f_coords)
    triple = Sl2Triple(f, h, e,
                       in_minus_part(e) and in_minus_part(f) and in_plus_part(h))
    triple.check()
    return triple


def centralizer_basis(S: Sequence[LieMatrix], ambient: Sequence[LieMatrix]
                      ) -> List[LieMatrix]:
    """Basis of {Z in span(ambient) : [Z, s] = 0 for all s in S}."""
    if not ambient:
        return []
    nonzero = [s for s in S if not s.is_zero()]
    if not nonzero:
        return list(ambient)
    p = ambient[0].prime
    rows = []
    if p is None:
        for s in nonzero:
            cols = [_flatten_q(bracket(b, s)) for b in ambient]
            for i in range(len(cols[0])):
                rows.append([cols[j][i] for j in range(len(ambient))])
        ker = frac_kernel(rows)
    else:
        for s in nonzero:
            cols = [_flatten_fp(bracket(b, s)) for b in ambient]
            for i in range(len(cols[0])):
                rows.append([cols[j][i] for j in range(len(ambient))])
        ker = fp_kernel(rows, p)
    return [_combine(ambient, v) for v in ker]


# ---------------------------------------------------------------------------
# the implemented symmetric pairs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymmetricPair:
    """Split pair (sl_n, involution by the antidiagonal form), n = 2 or 3.

    ``line_cochar`` is the integer cocharacter of the maximal split torus of
    the fixed group whose real span is the theta-fixed line of the standard
    apartment; the point at parameter t has coordinates t * line_cochar.
    """

    name: str
    n: int
    line_cochar: Tuple[int, ...]

    # -- bases ---------------------------------------------------------

    def h_basis(self) -> List[LieMatrix]:
        if self.n == 3:
            return [
                lie_q([[1, 0, 0], [0, 0, 0], [0, 0, -1]]),
                lie_q([[0, 1, 0], [0, 0, -1], [0, 0, 0]]),
                lie_q([[0, 0, 0], [1, 0, 0], [0, -1, 0]]),
            ]
        return [lie_q([[1, 0], [0, -1]])]

    def p_basis(self) -> List[LieMatrix]:
        if self.n == 3:
            return [
                lie_q([[1, 0, 0], [0, -2, 0], [0, 0, 1]]),
                lie_q([[0, 1, 0], [0, 0, 1], [0, 0, 0]]),
                lie_q([[0, 0, 1], [0, 0, 0], [0, 0, 0]]),
                lie_q([[0, 0, 0], [1, 0, 0], [0, 1, 0]]),
                lie_q([[0, 0, 0], [0, 0, 0], [1, 0, 0]]),
            ]
        return [lie_q([[0, 1], [0, 0]]), lie_q([[0, 0], [1, 0]])]

    def p_basis_labels(self) -> Tuple[str, ...]:
        return ("x", "y", "s", "z", "u") if self.n == 3 else ("y", "z")

    def minus_diag_patterns(self) -> List[LieMatrix]:
        return [self.p_basis()[0]] if self.n == 3 else []

    def plus_diag_patterns(self) -> List[LieMatrix]:
        return [self.h_basis()[0]]

    # -- distinguished group elements -----------------------------------

    def torus_element(self, a) -> LieMatrix:
        a = Fraction(a)
        if self.n == 3:
            return qmat([[a, 0, 0], [0, 1, 0], [0, 0, 1 / a]])
        return qmat([[a, 0], [0, 1 / a]])

    def translation_element(self, p: int, k: int) -> LieMatrix:
        """Torus element translating the fixed line by +k."""
        return self.torus_element(Fraction(p) ** (-k))

    def unipotent_nilpotents(self) -> List[LieMatrix]:
        if self.n == 3:
            return [self.h_basis()[1], self.h_basis()[2]]
        return []

    def weyl_element(self) -> Optional[LieMatrix]:
        if self.n == 3:
            return -antidiagonal_j(3)
        return None

    def line_coeff(self, i: int, j: int) -> int:
        """Coefficient c with alpha_ij(point(t)) = c * t on the fixed line."""
        return self.line_cochar[i] - self.line_cochar[j]

    def in_h(self, X: LieMatrix) -> bool:
        return in_plus_part(X)

    def in_p(self, X: LieMatrix) -> bool:
        return in_minus_part(X)

    def is_group_element(self, g: LieMatrix) -> bool:
        one = g._coerce_scalar(1)
        if g.det() != one:
            return False
        return (Involution(self.n).on_group(g) - g).is_zero()


PAIR_SL3 = SymmetricPair("sl3", 3, (1, 0, -1))
PAIR_SL2 = SymmetricPair("sl2", 2, (1, -1))


def pair_for(name: str) -> SymmetricPair:
    if name == "sl3":
        return PAIR_SL3
    if name == "sl2":
        return PAIR_SL2
    raise ValueError("unknown pair %r (expected sl3 or sl2)" % (name,))
