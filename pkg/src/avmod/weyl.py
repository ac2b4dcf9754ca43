"""Differential operators, vector fields and delta-function modules on a chart.

Operators are written in the chart's basis derivations ``d_1, ..., d_n``
(the coordinate partials on polynomial and Laurent rings) with ring
coefficients on the left.  Basis derivations commute, so composition only
needs the Leibniz rule to move coefficients past derivatives.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Sequence

from .rings import RingElem, RingSpec, SpecMismatch, partial, _exps_upto


def _binom_multi(b, j) -> int:
    out = 1
    for x, y in zip(b, j):
        out *= comb(x, y)
    return out


def _below(b) -> list:
    """All multi-indices ``j <= b`` componentwise."""
    out = [()]
    for x in b:
        out = [e + (a,) for e in out for a in range(x + 1)]
    return out


class DiffOp:
    """Finite sum ``sum_b c_b d^b`` with coefficients in a chart ring."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: RingSpec, terms: dict | None = None):
        self.ring = ring
        self.terms = {}
        for b, c in (terms or {}).items():
            c = ring.coerce(c)
            if not c.is_zero():
                self.terms[tuple(b)] = c

    @classmethod
    def mult(cls, f: RingElem) -> "DiffOp":
        return cls(f.spec, {(0,) * f.spec.nderivs: f})

    @classmethod
    def d(cls, ring: RingSpec, i: int, power: int = 1) -> "DiffOp":
        b = [0] * ring.nderivs
        b[i] = power
        return cls(ring, {tuple(b): ring.one()})

    @classmethod
    def identity(cls, ring: RingSpec) -> "DiffOp":
        return cls.mult(ring.one())

    def order(self) -> int:
        return max((sum(b) for b in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def _same(self, other: "DiffOp"):
        if other.ring != self.ring:
            raise SpecMismatch(f"{self.ring.key} vs {other.ring.key}")

    def __add__(self, other):
        if isinstance(other, RingElem):
            other = DiffOp.mult(other)
        self._same(other)
        out = dict(self.terms)
        for b, c in other.terms.items():
            out[b] = out[b] + c if b in out else c
        return DiffOp(self.ring, out)

    def __neg__(self):
        return DiffOp(self.ring, {b: -c for b, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, RingElem):
            other = DiffOp.mult(other)
        return self + (-other)

    def scale(self, f) -> "DiffOp":
        """Left multiplication by a ring element or scalar."""
        return DiffOp(self.ring, {b: c * f for b, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, DiffOp):
            return compose(self, other)
        if isinstance(other, RingElem):
            return compose(self, DiffOp.mult(other))
        return self.scale(Fraction(other))

    def __rmul__(self, other):
        return self.scale(other if isinstance(other, RingElem) else Fraction(other))

    def __eq__(self, other):
        if isinstance(other, RingElem):
            other = DiffOp.mult(other)
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring.key, frozenset(self.terms.items())))

    def __call__(self, f: RingElem) -> RingElem:
        return apply(self, f)

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for b in sorted(self.terms, reverse=True):
            dpart = " ".join(
                (f"d{i + 1}" if a == 1 else f"d{i + 1}^{a}") for i, a in enumerate(b) if a)
            c = self.terms[b].to_text()
            if not dpart:
                parts.append(f"({c})")
            else:
                parts.append(f"({c}) {dpart}")
        return " + ".join(parts)

    __repr__ = to_text


def compose(a: DiffOp, b: DiffOp) -> DiffOp:
    """Normal-ordered product ``a * b``."""
    a._same(b)
    out: dict = {}
    for ba, ca in a.terms.items():
        for bb, cb in b.terms.items():
            for j in _below(ba):
                dc = partial(cb, j)
                if dc.is_zero():
                    continue
                coef = ca * dc * _binom_multi(ba, j)
                e = tuple(x - y + z for x, y, z in zip(ba, j, bb))
                out[e] = out[e] + coef if e in out else coef
    return DiffOp(a.ring, out)


def apply(op: DiffOp, f: RingElem) -> RingElem:
    if f.spec != op.ring:
        f = op.ring.coerce(f)
    acc = op.ring.zero()
    for b, c in op.terms.items():
        acc = acc + c * partial(f, b)
    return acc


def commutator(a: DiffOp, b: DiffOp) -> DiffOp:
    return compose(a, b) - compose(b, a)


class VecField:
    """``sum_i f_i d_i`` in the chart's basis derivations."""

    __slots__ = ("ring", "comps")

    def __init__(self, ring: RingSpec, comps: Sequence):
        if len(comps) != ring.nderivs:
            raise ValueError(f"expected {ring.nderivs} components")
        self.ring = ring
        self.comps = tuple(ring.coerce(c) for c in comps)

    @classmethod
    def basis(cls, ring: RingSpec, i: int, coeff=None) -> "VecField":
        comps = [ring.zero()] * ring.nderivs
        comps[i] = ring.one() if coeff is None else ring.coerce(coeff)
        return cls(ring, comps)

    def __call__(self, f: RingElem) -> RingElem:
        acc = self.ring.zero()
        for i, c in enumerate(self.comps):
            if not c.is_zero():
                acc = acc + c * partial(f, tuple(int(k == i) for k in range(len(self.comps))))
        return acc

    def as_op(self) -> DiffOp:
        return DiffOp(self.ring, {tuple(int(k == i) for k in range(len(self.comps))): c
                                  for i, c in enumerate(self.comps)})

    def __add__(self, other):
        return VecField(self.ring, [a + b for a, b in zip(self.comps, other.comps)])

    def __neg__(self):
        return VecField(self.ring, [-a for a in self.comps])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f) -> "VecField":
        return VecField(self.ring, [c * f for c in self.comps])

    def __rmul__(self, f):
        return self.scale(f)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def __eq__(self, other):
        return isinstance(other, VecField) and self.ring == other.ring and self.comps == other.comps

    def __hash__(self):
        return hash((self.ring.key, self.comps))

    def to_text(self) -> str:
        parts = [f"({c.to_text()}) d{i + 1}" for i, c in enumerate(self.comps) if not c.is_zero()]
        return " + ".join(parts) if parts else "0"

    __repr__ = to_text


def bracket(a: VecField, b: VecField) -> VecField:
    if a.ring != b.ring:
        raise SpecMismatch(f"{a.ring.key} vs {b.ring.key}")
    return VecField(a.ring, [a(bi) - b(ai) for ai, bi in zip(a.comps, b.comps)])


def monomial_fields(ring: RingSpec, d: int) -> list:
    """Fields ``m d_i`` for monomial basis elements ``m`` of degree at most ``d``."""
    return [VecField.basis(ring, i, m) for m in ring.monomials(d) for i in range(ring.nderivs)]


# ---------------------------------------------------------------- delta modules

class DeltaModule:
    """The module ``Q[d] delta_p`` over the polynomial ring in ``n`` variables.

    Elements are dicts from multi-index ``b`` to rationals, meaning
    ``sum c_b d^b delta_p``.
    """

    def __init__(self, point: Sequence, names: Sequence[str] | None = None):
        from .rings import poly
        self.point = tuple(Fraction(p) for p in point)
        self.n = len(self.point)
        if names is None:
            names = ("x",) if self.n == 1 else tuple(f"x{i + 1}" for i in range(self.n))
        self.ring = poly(*names)

    def delta(self) -> dict:
        return {(0,) * self.n: Fraction(1)}

    def basis(self, d: int) -> list:
        return [{b: Fraction(1)} for b in _exps_upto(self.n, d)]

    def mul_var(self, i: int, v: dict) -> dict:
        out: dict = {}
        p = self.point[i]
        for b, c in v.items():
            if p:
                out[b] = out.get(b, 0) + p * c
            if b[i]:
                e = list(b)
                e[i] -= 1
                e = tuple(e)
                out[e] = out.get(e, 0) - b[i] * c
        return {b: c for b, c in out.items() if c}

    def d(self, i: int, v: dict) -> dict:
        out = {}
        for b, c in v.items():
            e = list(b)
            e[i] += 1
            out[tuple(e)] = c
        return out

    def act_ring(self, f: RingElem, v: dict) -> dict:
        if f.spec != self.ring:
            raise SpecMismatch(f"{f.spec.key} does not act on delta functions in {self.ring.key}")
        out: dict = {}
        for e, c in f.terms.items():
            w = v
            for i, a in enumerate(e):
                for _ in range(a):
                    w = self.mul_var(i, w)
            for b, x in w.items():
                out[b] = out.get(b, 0) + c * x
        return {b: c for b, c in out.items() if c}

    def act_op(self, op: DiffOp, v: dict) -> dict:
        out: dict = {}
        for b, c in op.terms.items():
            w = v
            for i, a in enumerate(b):
                for _ in range(a):
                    w = self.d(i, w)
            w = self.act_ring(c, w)
            for k, x in w.items():
                out[k] = out.get(k, 0) + x
        return {b: c for b, c in out.items() if c}


def delta_act(op: DiffOp, v: dict, module: DeltaModule) -> dict:
    return module.act_op(op, v)
