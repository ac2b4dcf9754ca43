from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avmod import linalg
from avmod.jets import (JetGen, JetPoly, JetRep, generators, gl_embed, gl_gen, jet_bracket, raw_bracket,
                        truncated_algebra)


def _add(acc, d, c=1):
    for g, v in d.items():
        acc[g] = acc.get(g, 0) + c * v
    return {g: v for g, v in acc.items() if v}


def _bracket_lin(x: dict, b: JetGen, s=None):
    out = {}
    for g, c in x.items():
        out = _add(out, jet_bracket(g, b, s), c)
    return out


@pytest.mark.parametrize("n,s", [(1, 4), (2, 2)])
def test_jacobi_identity(n, s):
    gens = generators(n, s)
    for a, b, c in product(gens, repeat=3):
        # [[a, b], c] + [[b, c], a] + [[c, a], b] in the full (untruncated) algebra
        t = _bracket_lin(raw_bracket(a, b), c)
        t = _add(t, _bracket_lin(raw_bracket(b, c), a))
        t = _add(t, _bracket_lin(raw_bracket(c, a), b))
        assert t == {}, (a, b, c)


def test_bracket_examples():
    d, xd, x2d = JetGen((0,), 0), JetGen((1,), 0), JetGen((2,), 0)
    assert raw_bracket(d, x2d) == {xd: 2}
    assert raw_bracket(xd, x2d) == {x2d: 1}
    # degree grading: [L_i, L_j] lands in L_{i+j}
    for a, b in product(generators(2, 3), repeat=2):
        for g in raw_bracket(a, b):
            assert g.degree == a.degree + b.degree
    # truncation drops the top degree
    assert jet_bracket(x2d, JetGen((3,), 0), 2) == {}


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_degree_zero_part_is_gl(n):
    for (j, i, l, k) in product(range(n), repeat=4):
        a, b = gl_gen(j, i, n), gl_gen(l, k, n)
        assert gl_embed(a) == (j, i)
        want = {}
        if i == l:
            want[gl_gen(j, k, n)] = want.get(gl_gen(j, k, n), 0) + 1
        if k == j:
            want[gl_gen(l, i, n)] = want.get(gl_gen(l, i, n), 0) - 1
        want = {g: Fraction(c) for g, c in want.items() if c}
        assert raw_bracket(a, b) == want


@settings(max_examples=30, deadline=None)
@given(st.lists(st.sampled_from(generators(2, 3)), min_size=1, max_size=3),
       st.lists(st.sampled_from(generators(2, 3)), min_size=1, max_size=3),
       st.lists(st.sampled_from(generators(2, 3)), min_size=1, max_size=3))
def test_pbw_associative(u, v, w):
    U = truncated_algebra(3)

    def word(gs):
        out = {(): Fraction(1)}
        for g in gs:
            out = U.mul(out, {(g,): Fraction(1)})
        return out

    a, b, c = word(u), word(v), word(w)
    assert U.mul(U.mul(a, b), c) == U.mul(a, U.mul(b, c))


def test_pbw_commutator_matches_bracket():
    U = truncated_algebra(3)
    for a, b in product(generators(1, 3), repeat=2):
        if a.key() >= b.key():
            continue
        ab = U.mul({(a,): 1}, {(b,): 1})
        ba = U.mul({(b,): 1}, {(a,): 1})
        diff = {m: ab.get(m, 0) - ba.get(m, 0) for m in set(ab) | set(ba)}
        diff = {m: c for m, c in diff.items() if c}
        assert diff == {(g,): c for g, c in jet_bracket(a, b, 3).items()}


@pytest.mark.parametrize("a", [Fraction(0), Fraction(1), Fraction(-1), Fraction(1, 2)])
def test_jetchain_is_a_representation(a):
    J = JetRep.jetchain(3, a)
    gens = generators(1, J.s)
    for p, q in product(gens, repeat=2):
        P, Q = JetPoly.of(p, J.s), JetPoly.of(q, J.s)
        assert (J.act_poly(P * Q) == J.act_poly(P) @ J.act_poly(Q)).all()


def test_jetchain_matrices():
    J = JetRep.jetchain(2, 5)
    assert J.act(JetGen((1,), 0), [1, 0]) == [5, 0]
    assert J.act(JetGen((2,), 0), [1, 0]) == [0, 2]
    assert J.killed_from() == 2


def test_broken_jetchain_is_rejected():
    J = JetRep.jetchain(2, 1)
    mats = dict(J.mats)
    X = JetGen((1,), 0)
    mats[X] = linalg.as_matrix([[1, 0], [0, 3]])
    with pytest.raises(ValueError):
        JetRep(1, J.s, 2, mats)


def test_truncation_mismatch():
    from avmod.jets import TruncationMismatch
    with pytest.raises(TruncationMismatch):
        JetPoly.one(2) + JetPoly.one(3)
