from fractions import Fraction

import pytest

from avmod import gln
from avmod.atlas import (Atlas, Chart, NoOverlap, PushedModule, casimir_invariance_check, get_atlas,
                         glue_check, gm_intertwiner_exponents, gm_reparam_failures, inverse_jacobian,
                         jacobian, pushforward, rule_for, section_matrix, transform_section)
from avmod.modules import ChargedTwist, RingDModule, TensorModule, validate_smash
from avmod.rings import inverse, laurent, poly
from avmod.weyl import VecField, bracket, monomial_fields


def test_p1_jacobian():
    A = get_atlas("p1")
    (y,) = A.overlap[1].gens()
    assert jacobian(A, 0, 1) == [[-inverse(y) ** 2]]
    (x,) = A.overlap[0].gens()
    # x = 1/y, so dx/dy = -1/y^2 = -x^2 written in the x chart
    assert inverse_jacobian(A, 1, 0) == [[-x ** 2]]


def test_circle_jacobian():
    A = get_atlas("circle")
    x, y = A.overlap[1].gens()
    # x as a function of y on the overlap: dx/dy = -y/x
    assert jacobian(A, 0, 1) == [[-y * inverse(x)]]


def test_transitions_must_be_inverse():
    X, Y = laurent("x"), laurent("y")
    (x,), (y,) = X.gens(), Y.gens()
    with pytest.raises(ValueError):
        Atlas("bad", [Chart("a", X, ("x",)), Chart("b", Y, ("y",))], overlap={0: X, 1: Y},
              sigma={(0, 1): [inverse(y)], (1, 0): [2 * inverse(x)]})


def test_no_overlap():
    with pytest.raises(NoOverlap):
        get_atlas("p1").map(0, 2, poly("x").one())


@pytest.mark.parametrize("name", ["p1", "gm", "circle", "a2-shear"])
def test_pushforward_preserves_brackets(name):
    A = get_atlas(name)
    fields = monomial_fields(A.overlap[0], 2)
    for e1 in fields[:6]:
        for e2 in fields[:6]:
            assert pushforward(A, 0, 1, bracket(e1, e2)) == bracket(pushforward(A, 0, 1, e1),
                                                                    pushforward(A, 0, 1, e2))


GLUE_PASS = [
    ("p1", "section"), ("p1", "det:-2"), ("p1", "det:2"), ("p1", "tensor:natural(1)"), ("p1", "charged:1/2"),
    ("p1", "jet:3"), ("gm", "charged:0"), ("gm", "charged:1/2"), ("gm", "charged:1"), ("gm", "jet:2"),
    ("circle", "det:1"), ("circle", "tensor:natural(1)"), ("circle", "section"), ("circle", "charged:1/3"),
    ("a2-shear", "tensor:natural(2)"), ("a2-shear", "tensor:dual(natural(2))"), ("a2-shear", "tensor:sym(2,2)"),
    ("a2-shear", "tensor:ext(2,2)"), ("a2-shear", "det:-1"), ("a2-shear", "charged:1/2"), ("a2-shear", "jet:2"),
    ("elliptic-affine", "section"),
]


@pytest.mark.parametrize("name,rule", GLUE_PASS)
def test_glue_checks_pass(name, rule):
    A = get_atlas(name)
    rep = glue_check(A, rule_for(A, rule))
    assert rep.passed, rep.entries


@pytest.mark.parametrize("name,rule", [("p1", "det:1/2"), ("gm", "charged:1/3"), ("a2-shear", "det:1/3")])
def test_glue_checks_fail(name, rule):
    A = get_atlas(name)
    rep = glue_check(A, rule_for(A, rule))
    assert not rep.passed
    assert any(e["witness"] for e in rep.entries if e["status"] == "fail")


def test_untransposed_jacobian_breaks_the_natural_module():
    # acting by J instead of its transpose is not compatible with the field action
    A = get_atlas("a2-shear")
    W = gln.natural(2)
    Ma = TensorModule(RingDModule(A.overlap[0]), W)
    Mb = TensorModule(RingDModule(A.overlap[1]), W)

    def transform(sec, transpose):
        J = jacobian(A, 0, 1)
        g = [list(c) for c in zip(*J)] if transpose else J
        M = gln.group_action(W, g)
        vals = [A.map(0, 1, c) for c in sec]
        return tuple(sum((M[r][c] * vals[c] for c in range(2)), A.overlap[1].zero()) for r in range(2))

    x1, x2 = A.overlap[0].gens()
    eta = VecField(A.overlap[0], [x1, x2])
    results = {}
    for transpose in (True, False):
        ok = True
        for f in A.overlap[0].monomials(2):
            for c in range(2):
                sec = Ma.unit(c, f)
                lhs = transform(Ma.act_field(eta, sec), transpose)
                rhs = Mb.act_field(pushforward(A, 0, 1, eta), transform(sec, transpose))
                ok = ok and Mb.eq(lhs, rhs)
        results[transpose] = ok
    assert results == {True: True, False: False}
    assert transform_section(A, W, 0, 1, (x1, x2)) == transform((x1, x2), True)


@pytest.mark.parametrize("name", ["p1", "circle", "a2-shear"])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_casimir_invariance(name, k):
    A = get_atlas(name)
    for a, b in A.sigma:
        assert casimir_invariance_check(A, a, b, k)


@pytest.mark.parametrize("name", ["p1", "circle", "a2-shear"])
def test_casimir_invariance_fails_without_inverse_factor(name):
    A = get_atlas(name)
    assert not all(casimir_invariance_check(A, a, b, 2, drop_inverse=True) for a, b in A.sigma)


@pytest.mark.parametrize("lam", [Fraction(0), Fraction(1, 2), Fraction(-3, 2), Fraction(2)])
def test_gm_reparametrization(lam):
    assert gm_reparam_failures(lam) == []


def test_gm_intertwiners():
    assert gm_intertwiner_exponents(Fraction(0)) == [0]
    assert gm_intertwiner_exponents(Fraction(1, 2)) == [1]
    assert gm_intertwiner_exponents(Fraction(1)) == [2]
    assert gm_intertwiner_exponents(Fraction(-1)) == [-2]
    assert gm_intertwiner_exponents(Fraction(1, 3)) == []


def test_pushed_module_is_an_av_module():
    A = get_atlas("gm")
    P = PushedModule(A, ChargedTwist(RingDModule(A.overlap[0]), Fraction(1, 3)), 0, 1)
    assert validate_smash(P, 2).passed


def test_section_matrix_cocycle():
    A = get_atlas("a2-shear")
    W = gln.sym(2, 2)
    f = A.overlap[0].var(0) + 1
    sec = (f, A.overlap[0].zero(), f * f)
    assert transform_section(A, W, 1, 0, transform_section(A, W, 0, 1, sec)) == sec
