"""Exact-level sl2 machinery: lifting residue triples to rational triples,
building-set polytopes on the fixed line, the noticed criterion on the
building side, the successive-approximation slice conjugation, the
weight-by-weight conjugator for triples sharing their nilpositive element,
and the integral fixed-point search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

from .arith import val_p
from ._linalg import (frac_kernel, frac_membership, frac_solve,
                      saturate_lattice)
from .apartment import (ApartmentPoint, depth_of, facet_at,
                        fixed_line_point, line_parameter, mp_lattice)
from ._linalg import fp_solve
from .liealg import (LieMatrix, Sl2Triple, SymmetricPair, ad_exp_series,
                     bracket, centralizer_basis, complete_sl2, conjugate,
                     exp_nilpotent, in_minus_part, is_nilpotent, pair_for,
                     qmat, zero)
from .residue import (ResidueCoset, ResidueSpace, _matvec, action_group,
                      residue_space)


class SingularSolveError(ValueError):
    """The graded square of the raising operator failed to invert."""


class NotConjugateError(ValueError):
    """The weight induction left a nonzero residual."""


# ---------------------------------------------------------------------------
# gradings from a diagonal cocharacter
# ---------------------------------------------------------------------------

def symmetric_residue(c: int, p: int) -> int:
    c %= p
    return c - p if c > (p - 1) // 2 else c

def cochar_from_model_h(h_model: LieMatrix) -> Tuple[int, ...]:
    """Integer diagonal cocharacter matching a diagonal semisimple element of
    the residue algebra, via symmetric residues."""
    p = h_model.prime
    n = h_model.n
    for i in range(n):
        for j in range(n):
            if i != j and h_model.entries[i][j]:
                raise ValueError("residue element is not diagonal")
    lam = tuple(symmetric_residue(h_model.entries[i][i].residue, p)
                for i in range(n))
    if sum(lam) != 0:
        raise ValueError("symmetric residues of the diagonal do not sum to 0")
    return lam


def position_weight(lam: Sequence[int], i: int, j: int) -> int:
    return lam[i] - lam[j]


def weight_component(X: LieMatrix, lam: Sequence[int], w: int) -> LieMatrix:
    rows = []
    for i in range(X.n):
        row = []
        for j in range(X.n):
            keep = (0 if i == j else position_weight(lam, i, j)) == w
            row.append(X.entries[i][j] if keep else X.entries[i][j] * 0)
        rows.append(tuple(row))
    return LieMatrix(tuple(rows), X.prime)


def supported_weights(X: LieMatrix, lam: Sequence[int]) -> List[int]:
    out = set()
    for i in range(X.n):
        for j in range(X.n):
            if X.entries[i][j]:
                out.add(0 if i == j else position_weight(lam, i, j))
    return sorted(out)


def _weight_subspace(basis: Sequence[LieMatrix], lam: Sequence[int], w: int
                     ) -> List[LieMatrix]:
    out = []
    for b in basis:
        if (weight_component(b, lam, w) - b).is_zero():
            out.append(b)
    return out


@dataclass(frozen=True)
class GradedDecomposition:
    """Grading of the ambient algebra by an integer diagonal cocharacter:
    weight spaces, their minus parts, and graded slices of depth lattices."""

    cochar: Tuple[int, ...]

    def weight(self, i: int, j: int) -> int:
        return position_weight(self.cochar, i, j)

    def component(self, X: LieMatrix, w: int) -> LieMatrix:
        return weight_component(X, self.cochar, w)

    def weights_of(self, X: LieMatrix) -> List[int]:
        return supported_weights(X, self.cochar)

    def minus_weight_basis(self, pair: SymmetricPair, w: int
                           ) -> List[LieMatrix]:
        return _weight_subspace(pair.p_basis(), self.cochar, w)

    def lattice_slice(self, X: LieMatrix, bounds, p: int, w: int) -> bool:
        """Whether the weight-w component of X meets the given bounds."""
        return bounds.contains(self.component(X, w), p)


# ---------------------------------------------------------------------------
# lifting residue triples
# ---------------------------------------------------------------------------

def _model_minus_coords(space: ResidueSpace, M: LieMatrix):
    """Coordinates of a minus-part matrix-model element over the minus basis."""
    coords = []
    for v in space.minus_basis():
        i, j = v.positions[0]
        coords.append(M.entries[i][j].residue)
    rebuilt = space.minus_model(tuple(coords))
    if not (rebuilt - M).is_zero():
        raise ValueError("model element is not in the minus span")
    return tuple(coords)


def _model_plus_coords(space: ResidueSpace, M: LieMatrix):
    coords = []
    for v in space.plus_basis():
        i, j = v.positions[0]
        coords.append(M.entries[i][j].residue)
    acc = zero(space.pair.n, space.prime)
    for c, v in zip(coords, space.plus_basis()):
        if c:
            acc = acc + space.model_of(v).scale(c)
    if not (acc - M).is_zero():
        raise ValueError("model element is not in the plus span")
    return tuple(coords)


def lift_sl2(triple: Sl2Triple, space: ResidueSpace) -> Sl2Triple:
    """Lift a normal residue triple (matrix-model, diagonal h) to an exact
    rational normal triple at the facet.

    The nilpositive lift is the natural graded representative, checked to sit
    in the weight-2 space of the adapted cocharacter; the lowering element
    solves ad(X)^2 Y = -2X inside the weight (-2) part of the minus
    eigenspace, exactly.
    """
    p, pair = space.prime, space.pair
    r = space.facet.r
    x = space.witness
    if triple.is_trivial():
        return Sl2Triple.trivial(pair.n)
    grading = GradedDecomposition(cochar_from_model_h(triple.H))

    e_coords = _model_minus_coords(space, triple.X)
    X = space.lift_minus(e_coords)
    for w in grading.weights_of(X):
        if w != 2:
            raise SingularSolveError("nilpositive lift meets weight %d != 2" % w)

    y_basis = grading.minus_weight_basis(pair, -2)
    if not y_basis:
        raise SingularSolveError("empty weight -2 space")
    cols = []
    for b in y_basis:
        img = bracket(X, bracket(X, b))
        cols.append([v for row in img.entries for v in row])
    A = [[cols[j][i] for j in range(len(cols))] for i in range(len(cols[0]))]
    target = [v * -2 for row in X.entries for v in row]
    sol = frac_solve(A, target)
    if sol is None or frac_kernel(A):
        raise SingularSolveError("ad(X)^2 is not a graded isomorphism here")
    Y = zero(pair.n)
    for c, b in zip(sol, y_basis):
        if c:
            Y = Y + b.scale(c)
    H = bracket(X, Y)

    lax_minus_r = mp_lattice(x, -r)
    lax_zero = mp_lattice(x, 0)
    if not lax_minus_r.contains(Y, p):
        raise SingularSolveError("lowering lift violates the depth bounds")
    if not lax_zero.contains(H, p):
        raise SingularSolveError("neutral lift violates the depth bounds")
    out = Sl2Triple(Y, H, X, True)
    out.check()
    if r == 0:
        got_f = space.minus_model(space.reduce_minus(Y))
        if not (got_f - triple.Y).is_zero():
            raise AssertionError("lowering lift does not reduce to the input")
        got_h = space.reduce_plus(H)
        if got_h != _model_plus_coords(space, triple.H):
            raise AssertionError("neutral lift does not reduce to the input")
    return out


def prepare_diagonal_rep(e: ResidueCoset, group=None) -> Tuple[ResidueCoset, Sl2Triple]:
    """Move e inside its orbit until the completed residue triple has a
    diagonal neutral element; returns the moved coset and its triple."""
    space = e.space
    if space.facet.r != 0:
        raise ValueError("the residue triple machinery runs at depth zero")
    triple = complete_sl2(space.minus_model(e.coords),
                          space.minus_model_basis(), space.plus_model_basis())
    try:
        cochar_from_model_h(triple.H)
        return e, triple
    except ValueError:
        pass
    if group is None:
        group = action_group(space)
    for g in sorted(group.closure()):
        moved = _matvec(g, e.coords, space.prime)
        triple = complete_sl2(space.minus_model(moved),
                              space.minus_model_basis(),
                              space.plus_model_basis())
        try:
            cochar_from_model_h(triple.H)
            return space.coset(moved), triple
        except ValueError:
            continue
    raise SingularSolveError("no orbit representative with diagonal neutral part")


# ---------------------------------------------------------------------------
# building polytopes and the building-side noticed test
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BuildingSetPolytope:
    """Fixed-line slice of the locus where X has depth >= r and Y has depth
    >= -r, as inequalities coeff*t + const >= 0."""

    constraints: Tuple[Tuple[int, Fraction], ...]
    lo: Optional[Fraction]     # None = unbounded below
    hi: Optional[Fraction]     # None = unbounded above
    empty: bool

    def contains_t(self, t: Fraction) -> bool:
        if self.empty:
            return False
        if self.lo is not None and t < self.lo:
            return False
        if self.hi is not None and t > self.hi:
            return False
        return True

    def is_single_point(self) -> bool:
        return (not self.empty and self.lo is not None
                and self.lo == self.hi)


def _depth_constraints(members, pair: SymmetricPair, p: int
                       ) -> BuildingSetPolytope:
    """Fixed-line locus where each listed matrix has at least its stated
    depth; members is a list of (matrix, depth) pairs."""
    constraints: List[Tuple[int, Fraction]] = []
    for M, depth in members:
        for i in range(pair.n):
            for j in range(pair.n):
                v = M.entries[i][j]
                if not v:
                    continue
                coeff = 0 if i == j else pair.line_coeff(i, j)
                constraints.append((coeff, Fraction(val_p(v, p)) - depth))
    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    empty = False
    for coeff, const in constraints:
        if coeff == 0:
            if const < 0:
                empty = True
        elif coeff > 0:
            bound = -const / coeff
            lo = bound if lo is None else max(lo, bound)
        else:
            bound = const / (-coeff)
            hi = bound if hi is None else min(hi, bound)
    if lo is not None and hi is not None and lo > hi:
        empty = True
    return BuildingSetPolytope(tuple(constraints), lo, hi, empty)


def building_polytope(Y: LieMatrix, H: LieMatrix, X: LieMatrix, r,
                      pair: SymmetricPair, p: int) -> BuildingSetPolytope:
    r = Fraction(r)
    return _depth_constraints([(X, r), (Y, -r)], pair, p)


def max_facet_dim_inside(poly: BuildingSetPolytope) -> int:
    if poly.empty:
        raise ValueError("empty building set")
    return 0 if poly.is_single_point() else 1


def is_noticed_building(e: ResidueCoset, group=None) -> bool:
    """True iff the facet is of maximal dimension within the building set of
    a completing lifted triple (one witness suffices)."""
    space = e.space
    pair, p = space.pair, space.prime
    if e.is_zero():
        lifted = Sl2Triple.trivial(pair.n)
    else:
        moved, triple = prepare_diagonal_rep(e, group)
        lifted = lift_sl2(triple, space)
    poly = building_polytope(lifted.Y, lifted.H, lifted.X, space.facet.r,
                             pair, p)
    if not poly.contains_t(space.facet.witness_t()):
        raise AssertionError("facet fell outside the building set")
    return space.facet.dim == max_facet_dim_inside(poly)


# ---------------------------------------------------------------------------
# lattice generators of rational subspaces
# ---------------------------------------------------------------------------

def _matrix_to_scaled_vector(M: LieMatrix, bounds, p: int) -> List[Fraction]:
    out = []
    for i in range(M.n):
        for j in range(M.n):
            out.append(M.entries[i][j] * Fraction(p) ** (-bounds.entry(i, j)))
    return out


def _scaled_vector_to_matrix(vec: Sequence[Fraction], n: int, bounds, p: int
                             ) -> LieMatrix:
    rows = []
    k = 0
    for i in range(n):
        row = []
        for j in range(n):
            row.append(Fraction(vec[k]) * Fraction(p) ** bounds.entry(i, j))
            k += 1
        rows.append(tuple(row))
    return LieMatrix(tuple(rows), None)


def lattice_generators(subspace: Sequence[LieMatrix], bounds, p: int
                       ) -> List[LieMatrix]:
    """Z_p-generators of span(subspace) intersected with the bounded lattice."""
    if not subspace:
        return []
    n = subspace[0].n
    rows = [_matrix_to_scaled_vector(M, bounds, p) for M in subspace]
    sat = saturate_lattice(rows, p)
    return [_scaled_vector_to_matrix(v, n, bounds, p) for v in sat]


@lru_cache(maxsize=None)
def _space_at_depth(pair_name: str, t: Fraction, s: Fraction, p: int
                    ) -> ResidueSpace:
    pair = pair_for(pair_name)
    return residue_space(facet_at(pair, t, s), pair, p)


# ---------------------------------------------------------------------------
# the slice conjugation algorithm
# ---------------------------------------------------------------------------

def _first_order_element(P: LieMatrix, pair: SymmetricPair) -> LieMatrix:
    """A group element whose adjoint action is 1 + ad(P) to first order, for
    P in the plus eigenspace: exponentials on the nilpotent components and an
    exact torus element 1 + a on the diagonal component."""
    coords = frac_membership([_flat(b) for b in pair.h_basis()], _flat(P))
    if coords is None:
        raise ValueError("element is not in the plus eigenspace")
    a = coords[0]
    g = pair.torus_element(1 + a)
    for c, N in zip(coords[1:], pair.unipotent_nilpotents()):
        if c:
            g = g * exp_nilpotent(N, c)
    return g


def _flat(M: LieMatrix) -> List[Fraction]:
    return [v for row in M.entries for v in row]


def slice_conjugate(X: LieMatrix, Y: LieMatrix, Z: LieMatrix,
                    x: ApartmentPoint, r, digits: int, pair: SymmetricPair,
                    p: int) -> Tuple[LieMatrix, LieMatrix]:
    """Successive approximation: find h (a product of first-order elements of
    increasing depth) and C centralizing Y exactly, with

        h (X + C) h^-1  =  X + Z  modulo depth r + digits.

    Each step solves, in the depth-s quotient, the decomposition of the
    residual into a centralizer part and ad(X) of a positive-depth plus-part
    element; conjugating by the matching first-order element strictly
    increases the residual depth.
    """
    r = Fraction(r)
    t = line_parameter(pair, x)
    strict = mp_lattice(x, r, strict=True)
    if not strict.contains(Z, p):
        raise ValueError("perturbation is not in the strict depth-%s lattice" % r)
    if not in_minus_part(Z) or not in_minus_part(X) or not in_minus_part(Y):
        raise ValueError("slice data must lie in the (-1)-eigenspace")

    cent_y = [b for b in _centralizer_in_p(Y, pair)]
    h_basis = pair.h_basis()
    target = X + Z
    h_acc = qmat([[1 if i == j else 0 for j in range(pair.n)]
                  for i in range(pair.n)])
    C = zero(pair.n)
    goal = r + digits
    denom = max(c.denominator for c in
                [Fraction(pair.line_coeff(i, j)) * t
                 for i in range(pair.n) for j in range(pair.n) if i != j]
                + [Fraction(0)])
    max_steps = (digits + 2) * max(denom, 1) * 2 + 8
    steps = 0
    prev_depth = r
    while True:
        R = target - conjugate(h_acc, X + C)
        d = depth_of(R, x, p)
        if d == math.inf or d >= goal:
            break
        if d <= prev_depth:
            raise AssertionError("residual depth failed to increase")
        prev_depth = d
        steps += 1
        if steps > max_steps:
            raise AssertionError("step budget exceeded")
        s = Fraction(d)
        space_s = _space_at_depth(pair.name, t, s, p)
        zbar = space_s.reduce_minus(R)

        bounds_s = mp_lattice(x, s)
        bounds_h = mp_lattice(x, s - r)
        cent_gens = lattice_generators(cent_y, bounds_s, p)
        h_gens = lattice_generators(h_basis, bounds_h, p)
        # image columns first: the solver then leaves the centralizer
        # coordinates at zero whenever a pure conjugation step suffices
        cols = []
        ad_images = [bracket(X, g) for g in h_gens]
        for M in ad_images:
            cols.append(space_s.reduce_minus(M))
        for M in cent_gens:
            cols.append(space_s.reduce_minus(M))
        A = [[cols[j][i] for j in range(len(cols))]
             for i in range(space_s.dim_minus)]
        sol = fp_solve(A, list(zbar), p)
        if sol is None:
            raise AssertionError("level decomposition failed")
        P = zero(pair.n)
        for c, M in zip(sol[:len(h_gens)], h_gens):
            if c:
                P = P + M.scale(c)
        Cprime = zero(pair.n)
        for c, M in zip(sol[len(h_gens):], cent_gens):
            if c:
                Cprime = Cprime + M.scale(c)
        g = _first_order_element(-P, pair)
        C = C + Cprime
        h_acc = g * h_acc
    return h_acc, C


def _centralizer_in_p(Y: LieMatrix, pair: SymmetricPair) -> List[LieMatrix]:
    return centralizer_basis([Y], pair.p_basis())


# ---------------------------------------------------------------------------
# conjugating triples that share their nilpositive element
# ---------------------------------------------------------------------------

def _project_weight(H: LieMatrix, V: LieMatrix, eigenvalues: List[int],
                    i: int) -> LieMatrix:
    """Lagrange projection of V onto the ad(H)-eigenvalue i; V must lie in
    the sum of the listed eigenspaces."""
    out = V
    for j in eigenvalues:
        if j == i:
            continue
        out = (bracket(H, out) - out.scale(j)).scale(Fraction(1, i - j))
    return out


def kostant_conjugator(t1: Sl2Triple, t2: Sl2Triple, pair: SymmetricPair
                       ) -> LieMatrix:
    """W in the nilpotent algebra h_X = [p, X] ∩ C_h(X) with Ad(exp W)
    carrying the first triple onto the second; both triples must share X.

    W is built weight by weight: starting from W = 0, the residual
    Ad(exp W)(H) - (H + V) lives in ad(H)-weights > j after step j, and its
    weight-(j+1) component, divided by j+1, is folded into W.
    """
    if not (t1.X - t2.X).is_zero():
        raise ValueError("triples must share their nilpositive element")
    X, H, Y = t1.X, t1.H, t1.Y
    bracket_px = [bracket(b, X) for b in pair.p_basis()]
    cent_h = _centralizer_basis_h(X, pair)
    hx = _span_intersection_q(bracket_px, cent_h)
    for b in hx:
        if not is_nilpotent(b):
            raise AssertionError("h_X contains a non-nilpotent element")
    V = t2.H - t1.H
    if frac_membership([_flat(b) for b in hx], _flat(V)) is None:
        raise NotConjugateError("difference of neutral elements leaves h_X")

    eigenvalues = _positive_weights_on(hx, H)
    W = zero(pair.n)
    if not V.is_zero():
        if not eigenvalues:
            raise NotConjugateError("no positive weights available")
        for j in range(0, max(eigenvalues)):
            delta = ad_exp_series(W, H) - (H + V)
            if delta.is_zero():
                break
            if j + 1 in eigenvalues:
                Wj = _project_weight(H, delta, eigenvalues, j + 1)
                W = W + Wj.scale(Fraction(1, j + 1))
        if not (ad_exp_series(W, H) - (H + V)).is_zero():
            raise NotConjugateError("weight induction left a residual")
    g = exp_nilpotent(W)
    if not (conjugate(g, H) - t2.H).is_zero():
        raise NotConjugateError("neutral elements not matched")
    if not (conjugate(g, Y) - t2.Y).is_zero():
        raise NotConjugateError("lowering elements not matched")
    return W


def _positive_weights_on(hx: List[LieMatrix], H: LieMatrix) -> List[int]:
    """ad(H)-eigenvalues occurring on the span of hx (all positive integers)."""
    if not hx:
        return []
    flat = [_flat(b) for b in hx]
    weights = []
    for i in range(1, 4 * H.n):
        # (ad H - i) restricted: columns are coordinates over hx
        cols = []
        for b in hx:
            img = bracket(H, b) - b.scale(i)
            coords = frac_membership(flat, _flat(img))
            if coords is None:
                raise AssertionError("h_X is not ad(H)-stable")
            cols.append(coords)
        A = [[cols[j][i2] for j in range(len(hx))] for i2 in range(len(hx))]
        if frac_kernel(A):
            weights.append(i)
    return weights


def _centralizer_basis_h(X: LieMatrix, pair: SymmetricPair) -> List[LieMatrix]:
    return centralizer_basis([X], pair.h_basis())


def _span_intersection_q(A: List[LieMatrix], B: List[LieMatrix]
                         ) -> List[LieMatrix]:
    A = [M for M in A if not M.is_zero()]
    B = [M for M in B if not M.is_zero()]
    if not A or not B:
        return []
    fa = [_flat(M) for M in A]
    fb = [_flat(M) for M in B]
    m = len(fa[0])
    rows = [[(fa[j][i] if j < len(fa) else -fb[j - len(fa)][i])
             for j in range(len(fa) + len(fb))] for i in range(m)]
    out = []
    for k in frac_kernel(rows):
        acc = zero(A[0].n)
        for j in range(len(fa)):
            if k[j]:
                acc = acc + A[j].scale(k[j])
        if not acc.is_zero():
            out.append(acc)
    return out


# ---------------------------------------------------------------------------
# fixed points on the line for integral triples
# ---------------------------------------------------------------------------

def fixed_point_check(triple: Sl2Triple, r, pair: SymmetricPair, p: int,
                      window=(Fraction(-3), Fraction(3))) -> ApartmentPoint:
    """A theta-fixed point whose depth-zero lattice holds the whole triple,
    translated by (r/2) times the neutral cocharacter; membership of the
    translated point is verified before returning it."""
    r = Fraction(r)
    poly = _depth_constraints([(triple.X, Fraction(0)),
                               (triple.Y, Fraction(0)),
                               (triple.H, Fraction(0))], pair, p)
    if poly.empty:
        raise ValueError("no point in window")
    lo = poly.lo if poly.lo is not None else Fraction(window[0])
    hi = poly.hi if poly.hi is not None else Fraction(window[1])
    lo, hi = max(lo, Fraction(window[0])), min(hi, Fraction(window[1]))
    if lo > hi:
        raise ValueError("no point in window")
    t0 = Fraction(0) if lo <= 0 <= hi else (lo if lo > 0 else hi)
    x = fixed_line_point(pair, t0)

    if triple.is_trivial():
        return x
    lam = [triple.H.entries[i][i] for i in range(pair.n)]
    for i in range(pair.n):
        for j in range(pair.n):
            if i != j and triple.H.entries[i][j]:
                raise ValueError("neutral element must be diagonal here")
    y = x.translate([r / 2 * c for c in lam])
    if not mp_lattice(y, r).contains(triple.X, p):
        raise AssertionError("nilpositive element misses its depth bound")
    if not mp_lattice(y, -r).contains(triple.Y, p):
        raise AssertionError("lowering element misses its depth bound")
    if not mp_lattice(y, 0).contains(triple.H, p):
        raise AssertionError("neutral element misses its depth bound")
    return y
