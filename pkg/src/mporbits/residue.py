"""Residue spaces attached to theta-facets: the graded F_p quotient of the
depth-r lattice pair, its +/- eigenspace split, the finite group acting on
the minus part, orbit enumeration, degeneracy, and the rank-zero noticed
criterion.

A quotient basis vector is a matrix pattern (a single entry position, a
theta-paired combination of two positions, or a diagonal pattern) together
with the p-power level at which it sits.  Dropping the p-powers maps the
quotient isomorphically onto a Lie subalgebra of sl_n(F_p) - the levels on
the fixed line are additive across brackets of contributing positions - and
this "matrix model" is what all finite-field Lie algebra computations use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import FrozenSet, List, Optional, Sequence, Tuple

from .arith import FpScalar, residue_of_unit
from ._linalg import fp_kernel, fp_solve
from .apartment import (ApartmentPoint, ThetaFacet, depth_of, facet_witness,
                        mp_lattice)
from .liealg import (LieMatrix, SymmetricPair, bracket, centralizer_basis,
                     complete_sl2, conjugate, elem, exp_nilpotent, identity,
                     in_minus_part, in_plus_part, is_nilpotent, reduce_mod_p,
                     zero)

Coords = Tuple[int, ...]


class BudgetExceeded(RuntimeError):
    """Enumeration would exceed the configured element budget."""


@dataclass(frozen=True)
class ResidueBasisVector:
    label: str
    sign: int               # +1 for the fixed part, -1 for the swapped part
    level: int              # p-power of the natural lift
    pattern: LieMatrix      # integer pattern over Q
    positions: Tuple[Tuple[int, int], ...]

    def lift(self, coeff: int, p: int) -> LieMatrix:
        return self.pattern.scale(Fraction(coeff) * Fraction(p) ** self.level)


@dataclass(frozen=True)
class ResidueSpace:
    """The graded quotient at a facet, with its eigenspace split."""

    facet: ThetaFacet
    pair: SymmetricPair
    prime: int
    witness: ApartmentPoint
    basis: Tuple[ResidueBasisVector, ...]
    plus_indices: Tuple[int, ...]
    minus_indices: Tuple[int, ...]

    # -- dimensions ------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def dim_plus(self) -> int:
        return len(self.plus_indices)

    @property
    def dim_minus(self) -> int:
        return len(self.minus_indices)

    def minus_basis(self) -> List[ResidueBasisVector]:
        return [self.basis[i] for i in self.minus_indices]

    def plus_basis(self) -> List[ResidueBasisVector]:
        return [self.basis[i] for i in self.plus_indices]

    def minus_labels(self) -> List[str]:
        return [v.label for v in self.minus_basis()]

    # -- matrix model ------------------------------------------------------

    def model_of(self, vec: ResidueBasisVector) -> LieMatrix:
        return reduce_mod_p(vec.pattern, self.prime)

    def minus_model_basis(self) -> List[LieMatrix]:
        return [self.model_of(v) for v in self.minus_basis()]

    def plus_model_basis(self) -> List[LieMatrix]:
        return [self.model_of(v) for v in self.plus_basis()]

    def minus_model(self, coords: Coords) -> LieMatrix:
        acc = zero(self.pair.n, self.prime)
        for c, v in zip(coords, self.minus_basis()):
            if c % self.prime:
                acc = acc + self.model_of(v).scale(c)
        return acc

    # -- lifts and reductions ---------------------------------------------

    def lift_minus(self, coords: Coords) -> LieMatrix:
        acc = zero(self.pair.n)
        for c, v in zip(coords, self.minus_basis()):
            if c % self.prime:
                acc = acc + v.lift(c % self.prime, self.prime)
        return acc

    def _reduce(self, X: LieMatrix, vectors: List[ResidueBasisVector]) -> Coords:
        p = self.prime
        lax = mp_lattice(self.witness, self.facet.r)
        strict = mp_lattice(self.witness, self.facet.r, strict=True)
        if not lax.contains(X, p):
            raise ValueError("matrix violates the depth-%s bounds" % (self.facet.r,))
        coords = []
        for v in vectors:
            i, j = v.positions[0]
            entry = X.entries[i][j] * Fraction(p) ** (-v.level)
            coords.append(residue_of_unit(entry, p))
        rem = X
        for c, v in zip(coords, vectors):
            if c:
                rem = rem - v.lift(c, p)
        if not strict.contains(rem, p):
            raise ValueError("matrix is not in the span of this eigenspace part")
        return tuple(coords)

    def reduce_minus(self, X: LieMatrix) -> Coords:
        if not in_minus_part(X):
            raise ValueError("expected a matrix in the (-1)-eigenspace")
        return self._reduce(X, self.minus_basis())

    def reduce_plus(self, X: LieMatrix) -> Coords:
        if not in_plus_part(X):
            raise ValueError("expected a matrix in the (+1)-eigenspace")
        return self._reduce(X, self.plus_basis())

    # -- misc ---------------------------------------------------------------

    def minus_weight_coeffs(self) -> List[int]:
        """Pairing of each minus basis vector with the fixed-line cocharacter."""
        out = []
        for v in self.minus_basis():
            i, j = v.positions[0]
            out.append(0 if i == j else self.pair.line_coeff(i, j))
        return out

    def coset(self, coords: Sequence[int]) -> "ResidueCoset":
        return ResidueCoset(tuple(c % self.prime for c in coords), self)


@dataclass(frozen=True)
class ResidueCoset:
    """A coset of the strict sublattice inside the minus part, by coordinates
    over the minus basis."""

    coords: Coords
    space: ResidueSpace

    def is_zero(self) -> bool:
        return all(c % self.space.prime == 0 for c in self.coords)

    def lift(self) -> LieMatrix:
        return self.space.lift_minus(self.coords)

    def model(self) -> LieMatrix:
        return self.space.minus_model(self.coords)


def _theta_partner(pos: Tuple[int, int], n: int) -> Tuple[int, int]:
    i, j = pos
    return (n - 1 - j, n - 1 - i)


def residue_space(F: ThetaFacet, pair: SymmetricPair, p: int) -> ResidueSpace:
    """Quotient basis at the facet: positions where the lax and strict bounds
    differ, split into involution eigenvectors."""
    x = facet_witness(F, pair)
    lax = mp_lattice(x, F.r)
    strict = mp_lattice(x, F.r, strict=True)
    n = pair.n
    basis: List[ResidueBasisVector] = []
    plus_idx: List[int] = []
    minus_idx: List[int] = []

    def add(vec: ResidueBasisVector):
        basis.append(vec)
        (plus_idx if vec.sign > 0 else minus_idx).append(len(basis) - 1)

    if lax.entry(0, 0) != strict.entry(0, 0):
        level = lax.entry(0, 0)
        for k, pat in enumerate(pair.plus_diag_patterns()):
            add(ResidueBasisVector("a%d" % k if k else "a", +1, level, pat,
                                   tuple((i, i) for i in range(n))))
        for k, pat in enumerate(pair.minus_diag_patterns()):
            add(ResidueBasisVector("x%d" % k if k else "x", -1, level, pat,
                                   tuple((i, i) for i in range(n))))

    seen = set()
    labels = {(0, 1): ("y", "b"), (0, 2): ("s", None), (1, 0): ("z", "c"),
              (2, 0): ("u", None)}
    for i in range(n):
        for j in range(n):
            if i == j or (i, j) in seen:
                continue
            if lax.entry(i, j) == strict.entry(i, j):
                continue
            partner = _theta_partner((i, j), n)
            seen.add((i, j))
            seen.add(partner)
            level = lax.entry(i, j)
            minus_lab, plus_lab = labels.get((i, j), ("m%d%d" % (i, j),
                                                      "p%d%d" % (i, j)))
            if partner == (i, j):
                add(ResidueBasisVector(minus_lab, -1, level, elem(n, i, j),
                                       ((i, j),)))
            else:
                if lax.entry(*partner) != level or strict.entry(*partner) != level + 1:
                    raise AssertionError("theta-paired positions at unequal levels")
                pat_minus = elem(n, i, j) + elem(n, *partner)
                pat_plus = elem(n, i, j) - elem(n, *partner)
                add(ResidueBasisVector(minus_lab, -1, level, pat_minus,
                                       ((i, j), partner)))
                add(ResidueBasisVector(plus_lab, +1, level, pat_plus,
                                       ((i, j), partner)))

    space = ResidueSpace(F, pair, p, x, tuple(basis), tuple(plus_idx),
                         tuple(minus_idx))
    if F.r == 0:
        # only the depth-zero quotient is itself a Lie algebra (nonzero
        # depths bracket into a different graded piece); the matrix model is
        # used as an algebra exactly there
        _validate_model(space)
    return space


def _flatten(M: LieMatrix) -> List[int]:
    return [v.residue for row in M.entries for v in row]


def _span_membership(vectors: List[LieMatrix], target: LieMatrix, p: int) -> bool:
    if target.is_zero():
        return True
    if not vectors:
        return False
    cols = [_flatten(v) for v in vectors]
    A = [[cols[j][i] for j in range(len(cols))] for i in range(len(cols[0]))]
    return fp_solve(A, _flatten(target), p) is not None


def _validate_model(space: ResidueSpace) -> None:
    # the matrix model must be closed under brackets, else the level map
    # failed to be additive and the model would be unsound
    models = [space.model_of(v) for v in space.basis]
    for i in range(len(models)):
        for j in range(i, len(models)):
            br = bracket(models[i], models[j])
            if not _span_membership(models, br, space.prime):
                raise AssertionError("matrix model is not bracket-closed")


# ---------------------------------------------------------------------------
# the finite action group
# ---------------------------------------------------------------------------

def _matvec(M: Tuple[Tuple[int, ...], ...], v: Coords, p: int) -> Coords:
    return tuple(sum(r * c for r, c in zip(row, v)) % p for row in M)


def _matmul(A, B, p: int):
    n = len(A)
    return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(n)) % p
                       for j in range(n)) for i in range(n))


def _primitive_root(p: int) -> int:
    for g in range(2, p):
        seen = set()
        x = 1
        for _ in range(p - 1):
            x = x * g % p
            seen.add(x)
        if len(seen) == p - 1:
            return g
    raise AssertionError("no primitive root mod %d" % p)


class ResidueActionGroup:
    """Image of the facet stabilizer inside GL of the minus part.

    Generated by reductions of: torus elements over all unit representatives,
    the theta-fixed root-group unipotents scaled to depth >= 0 at the
    witness, and (where an affine flip stabilizes the facet) the Weyl
    representative composed with the matching p-power translation.
    """

    def __init__(self, space: ResidueSpace, generators, bfs_generators,
                 generator_elements):
        self.space = space
        self.generators = generators
        self._bfs = bfs_generators
        self.generator_elements = generator_elements
        self._closure: Optional[FrozenSet] = None

    def closure(self) -> FrozenSet:
        if self._closure is None:
            p = self.space.prime
            d = self.space.dim_minus
            eye = tuple(tuple(1 if i == j else 0 for j in range(d))
                        for i in range(d))
            els = {eye}
            bdy = [eye]
            while bdy:
                new = []
                for B in bdy:
                    for A in self._bfs:
                        C = _matmul(A, B, p)
                        if C not in els:
                            els.add(C)
                            new.append(C)
                bdy = new
            self._closure = frozenset(els)
        return self._closure

    def order(self) -> int:
        return len(self.closure())

    def orbit(self, v: Sequence[int]) -> FrozenSet[Coords]:
        p = self.space.prime
        v0 = tuple(c % p for c in v)
        seen = {v0}
        bdy = [v0]
        while bdy:
            new = []
            for w in bdy:
                for A in self._bfs:
                    u = _matvec(A, w, p)
                    if u not in seen:
                        seen.add(u)
                        new.append(u)
            bdy = new
        return frozenset(seen)


def _action_matrix(space: ResidueSpace, g: LieMatrix):
    cols = []
    for v in space.minus_basis():
        img = conjugate(g, v.lift(1, space.prime))
        cols.append(space.reduce_minus(img))
    d = space.dim_minus
    return tuple(tuple(cols[j][i] for j in range(d)) for i in range(d))


def stabilizing_flip(space: ResidueSpace) -> Optional[LieMatrix]:
    """The affine Weyl flip t -> k - t stabilizing the facet, as a group
    element, when the required translation amount k is integral."""
    w = space.pair.weyl_element()
    if w is None:
        return None
    F = space.facet
    k = F.lo + F.hi
    if k.denominator != 1:
        return None
    return space.pair.translation_element(space.prime, int(k)) * w


def action_group(space: ResidueSpace) -> ResidueActionGroup:
    pair, p = space.pair, space.prime
    x = space.witness
    elements: List[Tuple[str, LieMatrix]] = []
    for a in range(1, p):
        elements.append(("torus:%d" % a, pair.torus_element(a)))
    for idx, N in enumerate(pair.unipotent_nilpotents()):
        d = depth_of(N, x, p)
        m = max(0, math.ceil(-d))
        for s0 in range(1, p):
            elements.append(("unipotent%d:%d" % (idx, s0),
                             exp_nilpotent(N, Fraction(s0 * p ** m))))
    flip = stabilizing_flip(space)
    if flip is not None:
        elements.append(("weyl-flip", flip))

    actions = []
    seen = set()
    for label, g in elements:
        A = _action_matrix(space, g)
        if A not in seen:
            seen.add(A)
            actions.append((label, A))

    # a small generating subset: the one-parameter families are closed under
    # powers, so one representative of each suffices for closures and orbits
    root = _primitive_root(p)
    bfs: List = []
    bfs_elements: List[Tuple[str, LieMatrix]] = []
    for label, g in elements:
        keep = (label == "torus:%d" % root or label.endswith(":1")
                or label == "weyl-flip")
        if keep:
            bfs_elements.append((label, g))
            bfs.append(_action_matrix(space, g))
    group = ResidueActionGroup(space, [a for _, a in actions], bfs, elements)
    return group


# ---------------------------------------------------------------------------
# orbits, degeneracy, noticed
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitRecord:
    rep: Coords
    size: int
    degenerate: bool
    orbit: FrozenSet[Coords]


def is_degenerate(e, space: ResidueSpace,
                  group: Optional[ResidueActionGroup] = None,
                  orbit: Optional[FrozenSet[Coords]] = None,
                  box: int = 4) -> bool:
    """One-parameter-subgroup degeneracy test: after moving e over its finite
    orbit, some integral cocharacter of the fixed-line torus must give every
    supported coordinate a strictly positive weight."""
    coords = e.coords if isinstance(e, ResidueCoset) else tuple(e)
    p = space.prime
    coords = tuple(c % p for c in coords)
    if orbit is None:
        if group is None:
            group = action_group(space)
        orbit = group.orbit(coords)
    weights = space.minus_weight_coeffs()
    result = False
    for v in orbit:
        support = [weights[k] for k, c in enumerate(v) if c]
        for nmu in [n for n in range(-box, box + 1) if n]:
            if all(w * nmu > 0 for w in support):
                result = True
                break
        if result:
            break
    _cross_check_single_level(coords, space, result)
    return result


def _cross_check_single_level(coords: Coords, space: ResidueSpace,
                              claimed: bool) -> None:
    sup = [v for c, v in zip(coords, space.minus_basis()) if c % space.prime]
    levels = {v.level for v in sup}
    if len(levels) > 1:
        return
    model = space.minus_model(coords)
    if is_nilpotent(model) != claimed:
        raise AssertionError(
            "degeneracy test disagrees with graded-matrix nilpotency")


def enumerate_orbits(space: ResidueSpace,
                     group: Optional[ResidueActionGroup] = None,
                     budget: int = 10 ** 7) -> List[OrbitRecord]:
    """Exhaustive partition of the minus part into action-group orbits,
    canonical representative first (lexicographically least)."""
    p, d = space.prime, space.dim_minus
    total = p ** d
    if total > budget:
        raise BudgetExceeded("minus part has %d elements > budget %d"
                             % (total, budget))
    if group is None:
        group = action_group(space)
    records = []
    seen = set()
    for v in product(range(p), repeat=d):
        if v in seen:
            continue
        orb = group.orbit(v)
        seen |= orb
        rep = min(orb)
        records.append(OrbitRecord(rep, len(orb),
                                   is_degenerate(rep, space, group, orb), orb))
    records.sort(key=lambda rec: rec.rep)
    return records


def _fp_span_intersection(A: List[List[int]], B: List[List[int]], p: int
                          ) -> List[List[int]]:
    """Basis of span(A) intersect span(B); vectors are flat int lists."""
    if not A or not B:
        return []
    m = len(A[0])
    rows = [[(A[j][i] if j < len(A) else -B[j - len(A)][i]) % p
             for j in range(len(A) + len(B))] for i in range(m)]
    out = []
    for k in fp_kernel(rows, p):
        vec = [0] * m
        for j in range(len(A)):
            if k[j]:
                vec = [(x + k[j] * y) % p for x, y in zip(vec, A[j])]
        if any(vec):
            out.append(vec)
    return out


def _mat_pow_fp(M: LieMatrix, k: int) -> LieMatrix:
    acc = identity(M.n, M.prime)
    base = M
    while k:
        if k & 1:
            acc = acc * base
        base = base * base
        k >>= 1
    return acc


def is_noticed_rank(e, space: ResidueSpace) -> bool:
    """Rank-zero criterion: the centralizer of a completing triple inside the
    plus part, intersected with the derived span, contains no nonzero
    F_p-diagonalizable element."""
    if space.facet.r != 0:
        raise ValueError("the residue triple machinery runs at depth zero")
    coords = e.coords if isinstance(e, ResidueCoset) else tuple(e)
    model_e = space.minus_model(coords)
    triple = complete_sl2(model_e, space.minus_model_basis(),
                          space.plus_model_basis())
    cz = centralizer_basis([triple.X, triple.H, triple.Y],
                           space.plus_model_basis())
    if not cz:
        return True
    models = [space.model_of(v) for v in space.basis]
    derived = []
    for i in range(len(models)):
        for j in range(i + 1, len(models)):
            br = bracket(models[i], models[j])
            if not br.is_zero():
                derived.append(br)
    inter = _fp_span_intersection([_flatten(v) for v in cz],
                                  [_flatten(v) for v in derived], space.prime)
    if not inter:
        return True
    p = space.prime
    n = space.pair.n
    basis_mats = []
    for flat in inter:
        rows = [[FpScalar(flat[i * n + j] % p, p) for j in range(n)]
                for i in range(n)]
        basis_mats.append(LieMatrix(tuple(tuple(r) for r in rows), p))
    for cs in product(range(p), repeat=len(basis_mats)):
        if not any(cs):
            continue
        z = zero(n, p)
        for c, b in zip(cs, basis_mats):
            if c:
                z = z + b.scale(c)
        if (_mat_pow_fp(z, p) - z).is_zero():
            return False
    return True


# ---------------------------------------------------------------------------
# equivalence of pairs
# ---------------------------------------------------------------------------

def _candidate_moves(space1: ResidueSpace, space2: ResidueSpace
                     ) -> List[LieMatrix]:
    """Group elements whose building action carries the affine hull of the
    second facet onto that of the first (a bounded search set)."""
    pair, p = space1.pair, space1.prime
    F1, F2 = space1.facet, space2.facet
    moves: List[LieMatrix] = []
    if F1.dim != F2.dim:
        return moves

    def add_translation(k: Fraction):
        if k.denominator == 1:
            moves.append(pair.translation_element(p, int(k)))

    def add_flip(k: Fraction):
        w = pair.weyl_element()
        if w is not None and k.denominator == 1:
            moves.append(pair.translation_element(p, int(k)) * w)

    if F1.dim == 0:
        add_translation(F1.lo - F2.lo)
        add_flip(F1.lo + F2.lo)
    else:
        # hulls are the whole line; exact facet matches first, then nearby
        # translations (the lattice memberships prune invalid transports)
        add_translation(F1.lo - F2.lo)
        add_flip(F1.lo + F2.hi)
        for k in range(-2, 3):
            add_translation(Fraction(k))
    return moves


def pairs_equivalent(e1, e2) -> bool:
    """Sufficient equivalence check for facet-coset pairs: an implemented
    symmetry move matching the affine hulls must transport the second coset
    into the action-group orbit of the first.  A False answer means no match
    was found within the search set."""
    space1, space2 = e1.space, e2.space
    if space1.prime != space2.prime or space1.pair != space2.pair:
        return False
    group1 = action_group(space1)
    orbit1 = group1.orbit(e1.coords)
    lift2 = e2.lift()
    for m in _candidate_moves(space1, space2):
        img = conjugate(m, lift2)
        try:
            transported = space1.reduce_minus(img)
        except ValueError:
            continue
        if transported in orbit1:
            return True
    return False
