"""The standard apartment of the diagonal torus of SL_n over Q_p.

Points are sum-zero coordinate vectors; affine roots are the functionals
psi(x) = x_i - x_j + m.  The depth-r lattice attached to a point is encoded
entry-wise: position (i, j) of the lattice consists of the rationals of
valuation >= ceil(r - (x_i - x_j)), the diagonal of valuation >= ceil(r)
(strict variants take the least integer strictly above).  All facet
computation happens on the theta-fixed line of the involution, parametrized
by a single rational t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .arith import val_p
from .liealg import LieMatrix, SymmetricPair

Window = Tuple[Fraction, Fraction]


def ceil_frac(q: Fraction) -> int:
    return math.ceil(q)


def strict_ceil_frac(q: Fraction) -> int:
    return math.floor(q) + 1


@dataclass(frozen=True)
class ApartmentPoint:
    coords: Tuple[Fraction, ...]

    def __post_init__(self):
        if sum(self.coords) != 0:
            raise ValueError("apartment coordinates must sum to zero")

    @property
    def n(self) -> int:
        return len(self.coords)

    def translate(self, vector: Sequence[Fraction]) -> "ApartmentPoint":
        return ApartmentPoint(tuple(a + Fraction(b)
                                    for a, b in zip(self.coords, vector)))


def apartment_point(coords: Sequence) -> ApartmentPoint:
    return ApartmentPoint(tuple(Fraction(c) for c in coords))


def theta_on_point(x: ApartmentPoint) -> ApartmentPoint:
    """Induced action of the involution on the apartment: reverse and negate."""
    return ApartmentPoint(tuple(-c for c in reversed(x.coords)))


def is_theta_fixed(x: ApartmentPoint) -> bool:
    return theta_on_point(x) == x


def fixed_line_point(pair: SymmetricPair, t) -> ApartmentPoint:
    t = Fraction(t)
    return ApartmentPoint(tuple(t * c for c in pair.line_cochar))


def line_parameter(pair: SymmetricPair, x: ApartmentPoint) -> Fraction:
    """Recover t with x = t * line_cochar; rejects points off the fixed line."""
    cochar = pair.line_cochar
    num = sum(Fraction(c) * xc for c, xc in zip(cochar, x.coords))
    den = sum(Fraction(c) * c for c in cochar)
    t = num / den
    if fixed_line_point(pair, t) != x:
        raise ValueError("point does not lie on the theta-fixed line")
    return t


@dataclass(frozen=True)
class AffineRoot:
    """psi(x) = x_i - x_j + m."""

    i: int
    j: int
    m: int

    def value(self, x: ApartmentPoint) -> Fraction:
        return x.coords[self.i] - x.coords[self.j] + self.m

    def gradient(self) -> Tuple[int, int]:
        return (self.i, self.j)


@dataclass(frozen=True)
class LatticeBounds:
    """Entry-wise minimal valuations of the depth-r lattice at a point.

    ``bounds[i][j]`` for i != j bounds position (i, j); ``bounds[i][i]`` is
    the common diagonal bound.
    """

    bounds: Tuple[Tuple[int, ...], ...]
    r: Fraction
    strict: bool

    @property
    def n(self) -> int:
        return len(self.bounds)

    def entry(self, i: int, j: int) -> int:
        return self.bounds[i][j]

    def contains(self, X: LieMatrix, p: int) -> bool:
        if X.prime is not None:
            raise ValueError("lattice membership is a rational-matrix question")
        for i in range(self.n):
            for j in range(self.n):
                if val_p(X.entries[i][j], p) < self.bounds[i][j]:
                    return False
        return True

    def shift(self, k: int) -> "LatticeBounds":
        return LatticeBounds(tuple(tuple(b + k for b in row) for row in self.bounds),
                             self.r + k, self.strict)


def mp_lattice(x: ApartmentPoint, r, strict: bool = False) -> LatticeBounds:
    """Depth-r lattice bounds at x (strictly deeper sublattice when strict)."""
    r = Fraction(r)
    up = strict_ceil_frac if strict else ceil_frac
    n = x.n
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                row.append(up(r))
            else:
                row.append(up(r - (x.coords[i] - x.coords[j])))
        rows.append(tuple(row))
    return LatticeBounds(tuple(rows), r, strict)


def depth_of(X: LieMatrix, x: ApartmentPoint, p: int):
    """Largest s with X in the depth-s lattice at x (math.inf for X = 0)."""
    best = math.inf
    for i in range(x.n):
        for j in range(x.n):
            v = val_p(X.entries[i][j], p)
            if v == math.inf:
                continue
            off = 0 if i == j else x.coords[i] - x.coords[j]
            best = min(best, v + off)
    return best


# ---------------------------------------------------------------------------
# theta-facets on the fixed line
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThetaFacet:
    """A facet of the depth-r wall arrangement restricted to the fixed line.

    Point facets have lo == hi; segment facets are open intervals whose
    endpoints are the true neighbouring walls (they may extend beyond any
    enumeration window).
    """

    pair_name: str
    r: Fraction
    lo: Fraction
    hi: Fraction

    @property
    def kind(self) -> str:
        return "point" if self.lo == self.hi else "segment"

    @property
    def dim(self) -> int:
        return 0 if self.lo == self.hi else 1

    @property
    def theta_fixed(self) -> bool:
        return True

    def witness_t(self) -> Fraction:
        return self.lo if self.lo == self.hi else (self.lo + self.hi) / 2

    def contains_t(self, t: Fraction) -> bool:
        if self.lo == self.hi:
            return t == self.lo
        return self.lo < t < self.hi

    def describe(self) -> str:
        if self.kind == "point":
            return "t=%s" % (self.lo,)
        return "%s<t<%s" % (self.lo, self.hi)

    def sample_points(self, count: int) -> List[Fraction]:
        if self.kind == "point":
            return [self.lo]
        width = self.hi - self.lo
        return [self.lo + width * Fraction(k, count + 1)
                for k in range(1, count + 1)]


def _line_coeffs(pair: SymmetricPair) -> List[int]:
    cs = set()
    for i in range(pair.n):
        for j in range(pair.n):
            if i != j:
                c = pair.line_coeff(i, j)
                if c:
                    cs.add(abs(c))
    return sorted(cs)


def _wall_below(t: Fraction, r: Fraction, c: int) -> Fraction:
    # largest (r + m)/c strictly below t
    s = t * c - r
    m = math.ceil(s) - 1
    return (r + m) / c


def _wall_above(t: Fraction, r: Fraction, c: int) -> Fraction:
    s = t * c - r
    m = math.floor(s) + 1
    return (r + m) / c


def _is_wall(t: Fraction, r: Fraction, coeffs: Sequence[int]) -> bool:
    return any((t * c - r).denominator == 1 for c in coeffs)


def active_roots(pair: SymmetricPair, t: Fraction, r) -> Tuple[AffineRoot, ...]:
    """All affine roots vanishing at depth r at the fixed-line point t."""
    r = Fraction(r)
    out = []
    for i in range(pair.n):
        for j in range(pair.n):
            if i == j:
                continue
            c = pair.line_coeff(i, j)
            m = r - c * t
            if m.denominator == 1:
                out.append(AffineRoot(i, j, int(m)))
    return tuple(out)


def facet_at(pair: SymmetricPair, t, r) -> ThetaFacet:
    t = Fraction(t)
    r = Fraction(r)
    coeffs = _line_coeffs(pair)
    if _is_wall(t, r, coeffs):
        return ThetaFacet(pair.name, r, t, t)
    lo = max(_wall_below(t, r, c) for c in coeffs)
    hi = min(_wall_above(t, r, c) for c in coeffs)
    return ThetaFacet(pair.name, r, lo, hi)


def facet_of(x: ApartmentPoint, r, pair: SymmetricPair) -> ThetaFacet:
    """Facet descriptor of a theta-fixed point of the standard apartment."""
    return facet_at(pair, line_parameter(pair, x), r)


def facet_witness(F: ThetaFacet, pair: SymmetricPair) -> ApartmentPoint:
    return fixed_line_point(pair, F.witness_t())


def enumerate_theta_facets(window: Window, r, pair: SymmetricPair
                           ) -> List[ThetaFacet]:
    """All facets meeting the closed window [lo, hi] of the fixed line.

    Each connected component is reported once, with its true endpoints.
    """
    lo, hi = Fraction(window[0]), Fraction(window[1])
    if lo > hi:
        raise ValueError("empty window")
    r = Fraction(r)
    coeffs = _line_coeffs(pair)
    walls = set()
    for c in coeffs:
        m = math.ceil(lo * c - r)
        while (r + m) / c <= hi:
            walls.add((r + m) / c)
            m += 1
    samples = sorted(walls | {lo, hi})
    probes = list(samples)
    for a, b in zip(samples, samples[1:]):
        probes.append((a + b) / 2)
    seen = {}
    for t in probes:
        F = facet_at(pair, t, r)
        seen[(F.lo, F.hi)] = F
    return [seen[key] for key in sorted(seen,
                                        key=lambda k: (k[0], k[1]))]


def strongly_associated(F1: ThetaFacet, F2: ThetaFacet) -> bool:
    """True iff the affine hulls of the two facets coincide (within the
    one-dimensional fixed line: equal points, or both full-dimensional)."""
    if F1.pair_name != F2.pair_name or F1.r != F2.r:
        return False
    if F1.dim != F2.dim:
        return False
    if F1.dim == 1:
        return True
    return F1.lo == F2.lo


# ---------------------------------------------------------------------------
# figure data
# ---------------------------------------------------------------------------

def _embed(x: ApartmentPoint) -> Tuple[Fraction, Fraction]:
    """Rational planar coordinates: (x_1 - x_n, x_2) for n = 3, (x_1 - x_2, 0)
    for n = 2."""
    if x.n == 3:
        return (x.coords[0] - x.coords[2], x.coords[1])
    return (x.coords[0] - x.coords[1], Fraction(0))


def _gradient_plane_form(pair: SymmetricPair, i: int, j: int
                         ) -> Tuple[Fraction, Fraction]:
    """(a, b) with alpha_ij = a*u + b*v in the planar coordinates."""
    if pair.n == 3:
        forms = {
            (0, 1): (Fraction(1, 2), Fraction(-3, 2)),
            (1, 2): (Fraction(1, 2), Fraction(3, 2)),
            (0, 2): (Fraction(1), Fraction(0)),
        }
        key = (min(i, j), max(i, j))
        a, b = forms[key]
        return (a, b) if (i, j) == key else (-a, -b)
    return (Fraction(1), Fraction(0)) if (i, j) == (0, 1) else (Fraction(-1), Fraction(0))


def _clip_line_to_box(a: Fraction, b: Fraction, c: Fraction, box
                      ) -> Optional[Tuple[Fraction, Fraction, Fraction, Fraction]]:
    (ulo, uhi), (vlo, vhi) = box
    pts = set()
    if b != 0:
        for u in (ulo, uhi):
            v = (c - a * u) / b
            if vlo <= v <= vhi:
                pts.add((u, v))
    if a != 0:
        for v in (vlo, vhi):
            u = (c - b * v) / a
            if ulo <= u <= uhi:
                pts.add((u, v))
    pts = sorted(pts)
    if len(pts) < 2:
        return None
    (u1, v1), (u2, v2) = pts[0], pts[-1]
    return (u1, v1, u2, v2)


def figure_coords(window: Window, r, pair: SymmetricPair) -> List[Tuple[str, ...]]:
    """Rows (kind, u1, v1, u2, v2) describing the apartment picture inside the
    square box window x window: depth-r walls, the theta-fixed line, and the
    facets it carries.  Fractions are rendered as 'a/b'; point objects repeat
    their endpoint.  Row order is deterministic."""
    lo, hi = Fraction(window[0]), Fraction(window[1])
    if lo > hi:
        return [("kind", "u1", "v1", "u2", "v2")]
    r = Fraction(r)
    box = ((lo, hi), (lo, hi))
    segs = {"hyperplane": set(), "fixed-line": set(),
            "facet-edge": set(), "facet-vertex": set()}

    pairs_seen = set()
    for i in range(pair.n):
        for j in range(pair.n):
            if i == j:
                continue
            a, b = _gradient_plane_form(pair, i, j)
            # walls a*u + b*v = r - m for integer offsets m meeting the box
            corners = [a * u + b * v for u in (lo, hi) for v in (lo, hi)]
            m_lo = math.ceil(r - max(corners))
            m_hi = math.floor(r - min(corners))
            for m in range(m_lo, m_hi + 1):
                seg = _clip_line_to_box(a, b, r - m, box)
                if seg is not None and seg not in pairs_seen:
                    pairs_seen.add(seg)
                    segs["hyperplane"].add(seg)

    # fixed line {v = 0}: u ranges over the box; in line parameter u = scale*t
    scale = _embed(fixed_line_point(pair, 1))[0]
    seg = _clip_line_to_box(Fraction(0), Fraction(1), Fraction(0), box)
    if seg is not None:
        segs["fixed-line"].add(seg)
        for F in enumerate_theta_facets((min(lo / scale, hi / scale),
                                         max(lo / scale, hi / scale)), r, pair):
            if F.kind == "point":
                u = F.lo * scale
                if lo <= u <= hi:
                    segs["facet-vertex"].add((u, Fraction(0), u, Fraction(0)))
            else:
                u1, u2 = sorted((max(F.lo * scale, lo), min(F.hi * scale, hi)))
                if u1 < u2:
                    segs["facet-edge"].add((u1, Fraction(0), u2, Fraction(0)))

    rows: List[Tuple[str, ...]] = [("kind", "u1", "v1", "u2", "v2")]
    for kind in ("hyperplane", "fixed-line", "facet-edge", "facet-vertex"):
        for seg in sorted(segs[kind]):
            rows.append((kind,) + tuple(_fmt_frac(v) for v in seg))
    return rows


def _fmt_frac(q: Fraction) -> str:
    return "%d/%d" % (q.numerator, q.denominator)


def figure_tsv(window: Window, r, pair: SymmetricPair) -> str:
    return "\n".join("\t".join(row) for row in figure_coords(window, r, pair)) + "\n"
