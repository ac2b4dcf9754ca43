"""Module-construction language used by the command line and scenario files.

::

    P := ring(x,...) | laurent(t,...) | delta(p1,...) | elliptic | circle(x) | circle(y)
    W := <representation expression> | jetchain(d,a)
    M := tensor(P,W) | gauge(elliptic[,W]) | charged(P,lam) | rudakov(p,W) | rudakov([p1,...],W)
       | alpha(a) | dual(M) | mtensor(M,M) | P

A bare ``P`` is the D-module itself (tensored with the trivial module).
"""
from __future__ import annotations

from fractions import Fraction

from . import gln
from .expr import Call, ParseError, as_int, need, parse
from .jets import JetRep
from .modules import (ChargedTwist, DeltaDModule, RingDModule, TensorModule, alpha_module,
                      av_dual, av_tensor, charged_twist, elliptic_gauge_data, gauge_module,
                      rudakov_module)
from .rings import circle_chart, elliptic, laurent, poly

MODULE_GRAMMAR = __doc__


def _names(c: Call, text: str) -> list:
    out = []
    for a in c.args:
        if not isinstance(a, Call) or not a.bare:
            raise ParseError(f"{c.name} expects variable names", text, c.pos)
        out.append(a.name)
    if not out:
        raise ParseError(f"{c.name} needs at least one variable", text, c.pos)
    return out


def handle_from_call(c: Call, text: str):
    if c.name == "ring":
        return RingDModule(poly(*_names(c, text)))
    if c.name == "laurent":
        return RingDModule(laurent(*_names(c, text)))
    if c.name == "elliptic":
        return RingDModule(elliptic())
    if c.name == "circle":
        names = _names(c, text)
        if names not in (["x"], ["y"]):
            raise ParseError("circle takes the parameter x or y", text, c.pos)
        return RingDModule(circle_chart(names[0]))
    if c.name == "delta":
        if not c.args or not all(isinstance(a, Fraction) for a in c.args):
            raise ParseError("delta expects the coordinates of a rational point", text, c.pos)
        return DeltaDModule(c.args)
    return None


def _jet_module(c: Call, text: str, n: int):
    if c.name == "jetchain":
        need(c, text, 2)
        return JetRep.jetchain(as_int(c.args[0], c, text), c.args[1])
    rep = gln.rep_from_call(c, text)
    if rep.n != n:
        raise ParseError(f"representation is for gl_{rep.n}, chart has {n} parameters", text, c.pos)
    return rep


def module_from_call(c: Call, text: str):
    P = handle_from_call(c, text)
    if P is not None:
        return TensorModule(P, gln.trivial(P.ring.nderivs))
    name = c.name
    if name == "tensor":
        need(c, text, 2)
        P = _handle(c.args[0], c, text)
        return TensorModule(P, _jet_module(_call(c.args[1], c, text), text, P.ring.nderivs))
    if name == "gauge":
        need(c, text, (1, 2))
        if _call(c.args[0], c, text).name != "elliptic":
            raise ParseError("gauge data is built in for elliptic only", text, c.pos)
        W = _jet_module(_call(c.args[1], c, text), text, 1) if len(c.args) == 2 else None
        return gauge_module(elliptic_gauge_data(), W)
    if name == "charged":
        need(c, text, 2)
        return charged_twist(_handle(c.args[0], c, text), _num(c.args[1], c, text))
    if name == "rudakov":
        need(c, text, 2)
        p = c.args[0]
        point = p if isinstance(p, list) else [_num(p, c, text)]
        rep = gln.rep_from_call(_call(c.args[1], c, text), text)
        return rudakov_module(point, rep)
    if name == "alpha":
        need(c, text, 1)
        return alpha_module(_num(c.args[0], c, text))
    if name == "dual":
        need(c, text, 1)
        return av_dual(module_from_call(_call(c.args[0], c, text), text))
    if name == "mtensor":
        need(c, text, 2)
        a, b = (module_from_call(_call(x, c, text), text) for x in c.args)
        return av_tensor(a, b)
    raise ParseError(f"unknown module constructor {name!r}", text, c.pos)


def _call(a, c: Call, text: str) -> Call:
    if not isinstance(a, Call):
        raise ParseError(f"{c.name} expects an expression argument", text, c.pos)
    return a


def _handle(a, c: Call, text: str):
    P = handle_from_call(_call(a, c, text), text)
    if P is None:
        raise ParseError(f"{c.name} expects a D-module (ring, laurent, delta, elliptic, circle)", text, c.pos)
    return P


def _num(a, c: Call, text: str) -> Fraction:
    if not isinstance(a, Fraction):
        raise ParseError(f"{c.name} expects a rational number", text, c.pos)
    return a


def build_module(text: str):
    return module_from_call(parse(text), text)
