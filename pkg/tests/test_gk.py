import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avmod.build import build_module
from avmod.gk import (WindowTooSmall, bernstein_check, d_frame, frame_from_spec, growth_exponent,
                      growth_series, jet_frame)


def series(expr, frame, lmax=12):
    M = build_module(expr)
    return growth_series(M, frame_from_spec(M, frame), [M.basis(0)[0]], lmax).dims


def test_exact_dimensions():
    assert series("ring(x)", "x,dx") == [l + 1 for l in range(13)]
    assert series("ring(x,y)", "x,y,dx,dy") == [(l + 1) * (l + 2) // 2 for l in range(13)]
    assert series("delta(0)", "x,dx") == [l + 1 for l in range(13)]
    assert series("laurent(t)", "t,dt") == [l + 1 for l in range(13)]


def test_jet_frame_growth_is_bounded_by_fibre_dimension():
    dims = series("tensor(ring(x), jetchain(3,1))", "x,dx,jets", 16)
    assert all(d <= 3 * (l + 1) for l, d in enumerate(dims))
    assert dims[-1] > dims[-2]


@settings(max_examples=10, deadline=None)
@given(st.sampled_from(["ring(x)", "ring(x,y)", "delta(0)", "charged(ring(x), 1/2)", "alpha(0)",
                        "tensor(ring(x), natural(1))"]))
def test_growth_is_monotone(expr):
    M = build_module(expr)
    dims = growth_series(M, d_frame(M), [M.basis(0)[0]], 8).dims
    assert all(a <= b for a, b in zip(dims, dims[1:]))


@pytest.mark.parametrize("power", [1, 2, 3])
def test_exponent_of_exact_powers(power):
    fit = growth_exponent([(l + 1) ** power for l in range(25)])
    assert fit.exponent == pytest.approx(power, abs=1e-9)


def test_exponent_of_binomial_growth():
    fit = growth_exponent([math.comb(l + 2, 2) for l in range(25)])
    assert abs(fit.exponent - 2) < 0.15


def test_exponent_needs_enough_points():
    with pytest.raises(ValueError):
        growth_exponent([1, 2, 3])


def test_window_too_small():
    M = build_module("ring(x)")
    with pytest.raises(WindowTooSmall):
        growth_series(M, d_frame(M), [M.basis(0)[0]], 6, window=3, degree=lambda k: sum(k[1][1]))


def test_csv_output():
    M = build_module("ring(x)")
    text = growth_series(M, d_frame(M), [M.basis(0)[0]], 3).to_csv()
    lines = text.splitlines()
    assert lines[0] == "l,dim,log_l1,log_dim"
    assert lines[1] == "0,1,0.000000,0.000000"
    assert len(lines) == 5


def test_frame_tokens():
    M = build_module("tensor(ring(x), jetchain(2,0))")
    assert [op.name for op in frame_from_spec(M, "x,dx")] == ["x", "dx"]
    assert len(jet_frame(M, 2)) == 3
    with pytest.raises(ValueError):
        frame_from_spec(M, "x,dz")


def test_bernstein_inequality():
    res = bernstein_check(build_module("tensor(ring(x,y), natural(2))"), 2)
    assert res.passed and res.exponent > 1.8
    res = bernstein_check(build_module("delta(0)"), 1)
    assert res.passed


@pytest.mark.parametrize("expr,small,big", [("ring(x,y)", "x,dx", "x,y,dx,dy"),
                                            ("tensor(ring(x), jetchain(3,1))", "x,dx", "x,dx,jets")])
def test_growth_monotone_under_frame_enlargement(expr, small, big):
    a = series(expr, small, 10)
    b = series(expr, big, 10)
    assert all(p <= q for p, q in zip(a, b))
