from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avmod import gln
from avmod.build import build_module
from avmod.jets import JetGen, JetPoly, generators, jet_bracket
from avmod.local_iso import (SmashWord, check_homomorphism, jet_act, phi, psi, random_word,
                             roundtrip_generators, smash_normal_form)
from avmod.modules import RingDModule, TensorModule
from avmod.rings import poly
from avmod.weyl import DiffOp, VecField
from strategies import QX, QXY


def test_phi_of_quadratic_field():
    (x,) = QX.gens()
    w = SmashWord(QX.one(), [VecField.basis(QX, 0, x * x)])
    s = 3
    want = (JetPoly.one(s, DiffOp(QX, {(1,): x * x}))
            + JetPoly.of(JetGen((1,), 0), s, DiffOp.mult(2 * x))
            + JetPoly.of(JetGen((2,), 0), s, DiffOp.mult(QX.one())))
    assert phi(w, s) == want


@pytest.mark.parametrize("ring,s", [(QX, 1), (QX, 3), (QXY, 1), (QXY, 2)])
def test_phi_psi_roundtrip(ring, s):
    for want, got in roundtrip_generators(ring, s):
        assert want == got


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_phi_multiplicative_on_random_words(seed):
    assert check_homomorphism(QX, 4, s=3, seed=seed) == []


def _commutative_nf(w):
    """Wrong normal form: treats functions and fields as commuting."""
    lead = w.lead
    fields = []
    for f in w.factors:
        if isinstance(f, VecField):
            fields.append(f)
        else:
            lead = lead * f
    return [SmashWord(lead, fields, w.coeff)]


def test_multiplicativity_check_detects_wrong_normal_form():
    (x,) = QX.gens()
    w1 = SmashWord(QX.one(), [VecField.basis(QX, 0)])
    w2 = SmashWord(x)
    good = phi(smash_normal_form(w1 * w2), 3)
    bad = phi(_commutative_nf(w1 * w2), 3)
    assert good == phi(w1, 3) * phi(w2, 3)
    assert bad != phi(w1, 3) * phi(w2, 3)


def test_smash_relation_in_normal_form():
    # d # x = x # d + 1
    (x,) = QX.gens()
    nf = smash_normal_form(SmashWord(QX.one(), [VecField.basis(QX, 0), x]))
    assert [w.to_text() for w in nf] == ["(1) # 1", "(x) # [(1) d1]"]


@pytest.mark.parametrize("W", [gln.natural(1), gln.det(Fraction(2, 3))])
def test_jet_generators_act_through_the_fibre(W):
    M = TensorModule(RingDModule(QX), W)
    for p in QX.monomials(3):
        m = M.unit(0, p)
        for g in generators(1, 2):
            got = jet_act(M, g, m)
            w = M.W.act(g, [Fraction(1)])
            assert got == M.elem(p, w)


def test_jet_action_on_jetchain_fibre():
    M = build_module("tensor(ring(x), jetchain(3,1/2))")
    for a in range(3):
        m = M.unit(a, QX.var(0))
        for g in generators(1, 3):
            want = M.elem(QX.var(0), M.W.act(g, [Fraction(int(b == a)) for b in range(3)]))
            assert jet_act(M, g, m) == want


@pytest.mark.parametrize("expr", ["tensor(ring(x,y), natural(2))", "charged(ring(x,y), 1/3)", "ring(x,y)"])
def test_jet_action_respects_brackets(expr):
    M = build_module(expr)
    gens = generators(2, 1)
    for m in M.basis(1):
        for a, b in product(gens, repeat=2):
            lhs = M.sub(jet_act(M, a, jet_act(M, b, m)), jet_act(M, b, jet_act(M, a, m)))
            rhs = M.zero()
            for g, c in jet_bracket(a, b).items():
                rhs = M.add(rhs, M.scale(c, jet_act(M, g, m)))
            assert M.eq(lhs, rhs)


def test_psi_requires_parameters():
    from avmod.rings import elliptic
    with pytest.raises(ValueError):
        psi(elliptic(), elliptic().one(), JetGen((1,), 0))
