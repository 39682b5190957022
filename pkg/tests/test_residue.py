"""Residue spaces, the finite action group, orbits, degeneracy, noticed."""

from fractions import Fraction
from itertools import product

import pytest

from mporbits.apartment import facet_at
from mporbits.liealg import (bracket, elem, in_minus_part, in_plus_part,
                             is_nilpotent, pair_for, zero)
from mporbits.residue import (BudgetExceeded, action_group, enumerate_orbits,
                              is_degenerate, is_noticed_rank, pairs_equivalent,
                              residue_space, stabilizing_flip, _action_matrix,
                              _matvec)

SL3 = pair_for("sl3")
SL2 = pair_for("sl2")
F12 = Fraction(1, 2)
F14 = Fraction(1, 4)


def _spaces(p):
    return (residue_space(facet_at(SL3, 0, 0), SL3, p),
            residue_space(facet_at(SL3, F14, 0), SL3, p),
            residue_space(facet_at(SL3, F12, 0), SL3, p))


def test_residue_space_dimensions():
    S1, S2, S3 = _spaces(5)
    assert (S1.dim, S1.dim_plus, S1.dim_minus) == (8, 3, 5)
    assert S1.minus_labels() == ["x", "y", "s", "z", "u"]
    assert (S2.dim, S2.dim_plus, S2.dim_minus) == (2, 1, 1)
    assert (S3.dim, S3.dim_plus, S3.dim_minus) == (4, 1, 3)
    assert [(v.label, v.level) for v in S3.minus_basis()] == [
        ("x", 0), ("s", -1), ("u", 1)]
    assert [v.label for v in S3.plus_basis()] == ["a"]


def test_dimensions_split_additively_and_brackets_graded():
    for S in _spaces(5):
        assert S.dim_plus + S.dim_minus == S.dim
        minus = S.minus_model_basis()
        plus = S.plus_model_basis()
        for a in minus:
            for b in minus:
                assert in_plus_part(bracket(a, b))
        for a in plus:
            for b in minus:
                assert in_minus_part(bracket(a, b))
        # graded bracket agrees with bracketing the natural lifts
        for va in S.minus_basis():
            for vb in S.minus_basis():
                lifted = bracket(va.lift(1, S.prime), vb.lift(1, S.prime))
                model = bracket(S.model_of(va), S.model_of(vb))
                if model.is_zero():
                    continue
                got = S.reduce_plus(lifted)
                acc = zero(S.pair.n, S.prime)
                for c, w in zip(got, S.plus_basis()):
                    if c:
                        acc = acc + S.model_of(w).scale(c)
                assert (acc - model).is_zero()


def test_reduce_lift_roundtrip():
    S1, _, S3 = _spaces(5)
    for coords in product(range(5), repeat=3):
        full = (0, 0) + coords
        assert S1.reduce_minus(S1.lift_minus(full)) == full
    # E13 reduces to the s-coordinate
    assert S1.reduce_minus(elem(3, 0, 2)) == (0, 0, 1, 0, 0)
    # the strict sublattice reduces to zero
    assert S1.reduce_minus(elem(3, 0, 2).scale(5)) == (0, 0, 0, 0, 0)
    # graded representative convention at the half vertex
    lifted = S3.lift_minus((0, 2, 0))
    assert lifted == elem(3, 0, 2).scale(Fraction(2, 5))
    assert S3.reduce_minus(lifted) == (0, 2, 0)


def test_reduce_rejects_out_of_lattice_input():
    S1, _, _ = _spaces(5)
    with pytest.raises(ValueError):
        S1.reduce_minus(elem(3, 0, 2).scale(Fraction(1, 5)))
    with pytest.raises(ValueError):
        S1.reduce_minus(elem(3, 0, 1))  # not in the minus eigenspace


def test_action_group_order_is_pgl2():
    for p in (5, 7):
        S1 = residue_space(facet_at(SL3, 0, 0), SL3, p)
        assert action_group(S1).order() == p * (p * p - 1)


def test_action_group_closure_covers_all_listed_generators():
    S1, _, S3 = _spaces(5)
    for S in (S1, S3):
        G = action_group(S)
        closure = G.closure()
        for A in G.generators:
            assert A in closure


def test_torus_action_scales_by_squares():
    S1, _, S3 = _spaces(5)
    A = _action_matrix(S1, SL3.torus_element(2))
    assert _matvec(A, (0, 0, 1, 0, 0), 5) == (0, 0, 4, 0, 0)
    ident = _action_matrix(S1, SL3.torus_element(1))
    assert _matvec(ident, (1, 2, 3, 4, 0), 5) == (1, 2, 3, 4, 0)
    # at the half vertex the flip swaps the two off-diagonal levels
    flip = stabilizing_flip(S3)
    assert flip is not None
    Af = _action_matrix(S3, flip)
    assert _matvec(Af, (0, 1, 0), 5) == (0, 0, 1)
    assert _matvec(Af, (0, 0, 3), 5) == (0, 3, 0)


def test_action_preserves_split_and_levels():
    # every listed generator transports both eigenspace parts of the lattice
    # pair into themselves (reduction succeeds and stays in the same part)
    from mporbits.liealg import conjugate
    S1, _, S3 = _spaces(5)
    for S in (S1, S3):
        G = action_group(S)
        for _, g in G.generator_elements:
            for v in S.minus_basis():
                img = conjugate(g, v.lift(1, S.prime))
                assert in_minus_part(img)
                S.reduce_minus(img)  # raises if a level or bound is violated
            for v in S.plus_basis():
                img = conjugate(g, v.lift(1, S.prime))
                assert in_plus_part(img)
                S.reduce_plus(img)


def test_no_flip_stabilizes_segments_or_sl2_facets():
    _, S2, _ = _spaces(5)
    assert stabilizing_flip(S2) is None
    Ssl2 = residue_space(facet_at(SL2, 0, 0), SL2, 5)
    assert stabilizing_flip(Ssl2) is None


def test_enumerate_orbits_partitions_everything():
    for p in (5,):
        for S in _spaces(p):
            G = action_group(S)
            records = enumerate_orbits(S, G)
            assert sum(rec.size for rec in records) == p ** S.dim_minus
            order = G.order()
            for rec in records:
                assert order % rec.size == 0
                assert rec.rep == min(rec.orbit)


def test_degenerate_orbit_inventory_matches_worked_example():
    S1, S2, S3 = _spaces(5)
    deg1 = [rec for rec in enumerate_orbits(S1) if rec.degenerate]
    assert len(deg1) == 4
    reps = {rec.rep for rec in deg1}
    assert (0, 0, 0, 0, 0) in reps
    sizes = sorted(rec.size for rec in deg1)
    assert sizes == [1, 12, 12, 120]
    # regular class contains the displayed representative y = 1
    regular = max(deg1, key=lambda rec: rec.size)
    assert (0, 1, 0, 0, 0) in regular.orbit
    # the two rank-one classes split by the square class of the coefficient
    squares = {a * a % 5 for a in range(1, 5)}
    for rec in deg1:
        if rec.size == 12:
            coeffs = {v[2] for v in rec.orbit if v[2]} | \
                     {v[4] for v in rec.orbit if v[4]}
            assert coeffs == squares or coeffs == {2, 3}

    deg2 = [rec for rec in enumerate_orbits(S2) if rec.degenerate]
    assert [rec.rep for rec in deg2] == [(0,)]

    deg3 = [rec for rec in enumerate_orbits(S3) if rec.degenerate]
    assert len(deg3) == 3
    orb = action_group(S3).orbit((0, 1, 0))
    assert orb == frozenset({(0, 1, 0), (0, 4, 0), (0, 0, 1), (0, 0, 4)})


def test_is_degenerate_examples_and_invariance():
    S1, S2, S3 = _spaces(5)
    G1 = action_group(S1)
    assert is_degenerate(S1.coset((0,) * 5), S1, G1)
    assert is_degenerate(S1.coset((0, 1, 0, 0, 0)), S1, G1)
    assert not is_degenerate(S2.coset((1,)), S2)
    assert not is_degenerate(S1.coset((1, 0, 0, 0, 0)), S1, G1)
    # mixed coset with weights of both signs is not degenerate
    assert not is_degenerate(S1.coset((0, 1, 0, 0, 1)), S1, G1)
    for rec in enumerate_orbits(S1, G1):
        flags = {is_degenerate(v, S1, G1, rec.orbit) for v in
                 list(rec.orbit)[:8]}
        assert flags == {rec.degenerate}


def test_degeneracy_matches_model_nilpotency():
    # independent oracle: nilpotency of the graded matrix model
    S1, S2, S3 = _spaces(5)
    for S in (S1, S2, S3):
        G = action_group(S)
        for rec in enumerate_orbits(S, G):
            for v in rec.orbit:
                assert rec.degenerate == is_nilpotent(S.minus_model(v))


def test_is_noticed_rank_examples():
    S1, S2, S3 = _spaces(5)
    assert is_noticed_rank(S1.coset((0, 1, 0, 0, 0)), S1)
    assert is_noticed_rank(S2.coset((0,)), S2)
    assert not is_noticed_rank(S1.coset((0,) * 5), S1)
    assert is_noticed_rank(S1.coset((0, 0, 1, 0, 0)), S1)
    assert not is_noticed_rank(S3.coset((0, 0, 0)), S3)
    assert is_noticed_rank(S3.coset((0, 1, 0)), S3)


def test_noticedness_constant_on_orbits():
    S1, _, S3 = _spaces(5)
    for S in (S1, S3):
        G = action_group(S)
        for rec in enumerate_orbits(S, G):
            if not rec.degenerate:
                continue
            flags = {is_noticed_rank(S.coset(v), S) for v in
                     list(rec.orbit)[:6]}
            assert len(flags) == 1


def test_pairs_equivalent_examples():
    S1, S2, S3 = _spaces(5)
    G1 = action_group(S1)
    e = S1.coset((0, 0, 1, 0, 0))
    for g in list(G1.closure())[:10]:
        moved = S1.coset(_matvec(g, e.coords, 5))
        assert pairs_equivalent(e, moved)
    assert not pairs_equivalent(S1.coset((0, 1, 0, 0, 0)), S2.coset((0,)))
    assert not pairs_equivalent(S1.coset((0, 0, 1, 0, 0)),
                                S1.coset((0, 0, 2, 0, 0)))
    # translated vertex: the same square class at t = 1 matches t = 0
    Sv1 = residue_space(facet_at(SL3, 1, 0), SL3, 5)
    assert pairs_equivalent(e, Sv1.coset((0, 0, 1, 0, 0)))
    assert not pairs_equivalent(e, Sv1.coset((0, 0, 2, 0, 0)))
    # segment cosets at associated facets match through the identity
    Sseg2 = residue_space(facet_at(SL3, Fraction(3, 4), 0), SL3, 5)
    assert pairs_equivalent(S2.coset((0,)), Sseg2.coset((0,)))


def test_budget_guard():
    S1 = residue_space(facet_at(SL3, 0, 0), SL3, 5)
    with pytest.raises(BudgetExceeded):
        enumerate_orbits(S1, budget=10)


def test_sl2_residue_spaces():
    p = 5
    Sv = residue_space(facet_at(SL2, 0, 0), SL2, p)
    assert (Sv.dim, Sv.dim_plus, Sv.dim_minus) == (3, 1, 2)
    Sseg = residue_space(facet_at(SL2, F14, 0), SL2, p)
    assert (Sseg.dim, Sseg.dim_plus, Sseg.dim_minus) == (1, 1, 0)
    Sh = residue_space(facet_at(SL2, F12, 0), SL2, p)
    assert (Sh.dim, Sh.dim_plus, Sh.dim_minus) == (3, 1, 2)
    assert [(v.label, v.level) for v in Sh.minus_basis()] == [
        ("y", -1), ("z", 1)]
    # torus squares give (p-1)/2 scalings and no flip
    G = action_group(Sv)
    assert G.order() == (p - 1) // 2
    deg = [rec for rec in enumerate_orbits(Sv, G) if rec.degenerate]
    assert len(deg) == 5
    assert sum(rec.size for rec in deg) == 1 + 2 * (p - 1)
    # zero-dimensional minus part carries the single trivial orbit
    recs = enumerate_orbits(Sseg)
    assert len(recs) == 1 and recs[0].rep == () and recs[0].degenerate
    assert is_noticed_rank(Sseg.coset(()), Sseg)
