"""The truncated isomorphism between ``A # U(V)`` and ``D (x) U(L^s)`` on a chart.

Elements of ``D (x) U(L^s)`` are :class:`JetPoly` objects whose coefficients
are :class:`DiffOp` values (the two tensor factors commute).

On the smash side, :class:`SmashWord` is an unevaluated product and
:func:`smash_normal_form` multiplies out in ``A # U(V)`` for polynomial
rings, using the coproduct of ``U(V)`` and PBW reordering of monomial fields.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

from .jets import JetGen, JetPoly, field_algebra, multi_indices
from .rings import RingElem, RingSpec, kfact, partial
from .weyl import DiffOp, VecField


@dataclass
class SmashWord:
    """``lead # a_1 a_2 ... a_r`` with ring elements or fields as factors."""
    lead: RingElem
    factors: list = field(default_factory=list)
    coeff: Fraction = Fraction(1)

    def __mul__(self, other: "SmashWord") -> "SmashWord":
        return SmashWord(self.lead, self.factors + [other.lead] + other.factors,
                         self.coeff * other.coeff)

    def to_text(self) -> str:
        body = " ".join(f"[{f.to_text()}]" for f in self.factors)
        c = "" if self.coeff == 1 else f"{self.coeff}*"
        return f"{c}({self.lead.to_text()}) # {body or '1'}"

    __repr__ = to_text

    def act(self, M, m):
        """Evaluate on an AV-module element, rightmost factor first."""
        for x in reversed(self.factors):
            m = M.act_field(x, m) if isinstance(x, VecField) else M.act_ring(x, m)
        return M.scale(self.coeff, M.act_ring(self.lead, m))


def _unit(n: int, i: int) -> tuple:
    return tuple(int(k == i) for k in range(n))


def phi_factor(x, s: int) -> JetPoly:
    if isinstance(x, RingElem):
        return JetPoly.one(s, DiffOp.mult(x))
    ring = x.ring
    n = ring.nderivs
    out: dict = {}
    for i, f in enumerate(x.comps):
        if f.is_zero():
            continue
        d = DiffOp(ring, {_unit(n, i): f})
        out[()] = out[()] + d if () in out else d
        for k in multi_indices(n, 1, s + 1):
            c = partial(f, k)
            if c.is_zero():
                continue
            g = (JetGen(k, i),)
            term = DiffOp.mult(c * Fraction(1, kfact(k)))
            out[g] = out[g] + term if g in out else term
    return JetPoly(s, out)


def phi(w, s: int) -> JetPoly:
    """Image of a smash word (or a list of words, summed) in ``D (x) U(L^s)``."""
    if isinstance(w, list):
        acc = None
        for x in w:
            y = phi(x, s)
            acc = y if acc is None else acc + y
        return acc
    out = phi_factor(w.lead, s)
    for x in w.factors:
        out = out * phi_factor(x, s)
    return out.scale(w.coeff) if w.coeff != 1 else out


def _param_power(ring: RingSpec, p) -> RingElem:
    out = ring.one()
    for x, a in zip(ring.params, p):
        for _ in range(a):
            out = out * x
    return out


def _below(p):
    out = [()]
    for x in p:
        out = [e + (a,) for e in out for a in range(x + 1)]
    return out


def psi(ring: RingSpec, g: RingElem, jet: JetGen | None = None, d: int | None = None) -> list:
    """Preimage of a generator of ``D (x) U(L^s)``.

    ``psi(g d_i (x) 1) = g # d_i`` (pass ``d=i``); ``psi(g (x) 1) = g # 1``;
    ``psi(g (x) X^m d_{X_i}) = sum_{k <= m} (-1)^{|m-k|} C(m, k) g x^{m-k} # x^k d_i``.
    Returns a list of smash words (a formal sum).
    """
    if ring.params is None:
        raise ValueError(f"{ring.key} has no uniformizing parameters")
    if jet is None:
        if d is None:
            return [SmashWord(g)]
        return [SmashWord(g, [VecField.basis(ring, d)])]
    m, i = jet.k, jet.i
    out = []
    for k in _below(m):
        c = 1
        for a, b in zip(m, k):
            c *= comb(a, b)
        if sum(m) - sum(k) & 1:
            c = -c
        rest = tuple(a - b for a, b in zip(m, k))
        out.append(SmashWord(g * _param_power(ring, rest),
                             [VecField.basis(ring, i, _param_power(ring, k))], Fraction(c)))
    return out


def jet_act(M, g: JetGen, m):
    """Action of ``X^p d_{X_i}`` on an AV-module element through ``psi``."""
    ring = M.ring
    acc = M.zero()
    for w in psi(ring, ring.one(), g):
        acc = M.add(acc, w.act(M, m))
    return acc


# ---------------------------------------------------------------- smash products

def _field_gens(eta: VecField) -> dict:
    """``eta`` as a combination of monomial fields ``x^k d_i`` (polynomial rings only)."""
    out = {}
    for i, f in enumerate(eta.comps):
        for e, c in f.terms.items():
            out[JetGen(e, i)] = c
    return out


def _apply_gen(ring: RingSpec, g: JetGen, f: RingElem) -> RingElem:
    return ring.monomial(g.k) * partial(f, _unit(ring.n, g.i))


class SmashAlgebra:
    """``A # U(V)`` for a polynomial ring ``A``; elements map (exponent, PBW monomial) -> Fraction."""

    def __init__(self, ring: RingSpec):
        if ring.kind != "poly":
            raise ValueError("smash normal forms are implemented for polynomial rings")
        self.ring = ring
        self.U = field_algebra()

    def from_factor(self, x) -> dict:
        if isinstance(x, RingElem):
            return {(e, ()): c for e, c in x.terms.items()}
        return {((0,) * self.ring.n, (g,)): c for g, c in _field_gens(x).items()}

    def from_word(self, w: SmashWord) -> dict:
        out = {(e, ()): c * w.coeff for e, c in w.lead.terms.items()}
        for x in w.factors:
            out = self.mul(out, self.from_factor(x))
        return out

    def _act_word(self, u: tuple, g: RingElem) -> RingElem:
        for h in reversed(u):
            g = _apply_gen(self.ring, h, g)
            if g.is_zero():
                break
        return g

    def mul(self, a: dict, b: dict) -> dict:
        """``(f # u)(g # v) = sum f u_(1)(g) # u_(2) v`` with the shuffle coproduct."""
        out: dict = {}
        for (ea, ua), ca in a.items():
            r = len(ua)
            for (eb, ub), cb in b.items():
                g = self.ring.monomial(eb)
                for mask in range(1 << r):
                    left = tuple(ua[j] for j in range(r) if mask >> j & 1)
                    right = tuple(ua[j] for j in range(r) if not mask >> j & 1)
                    ug = self._act_word(left, g)
                    if ug.is_zero():
                        continue
                    fg = self.ring.monomial(ea) * ug
                    for mono, c in self.U.mono_mul(right, ub).items():
                        for e, x in fg.terms.items():
                            key = (e, mono)
                            v = out.get(key, 0) + ca * cb * c * x
                            if v:
                                out[key] = v
                            else:
                                out.pop(key, None)
        return out

    def to_words(self, a: dict) -> list:
        out = []
        for (e, u), c in sorted(a.items(), key=lambda kv: (kv[0][0], [g.key() for g in kv[0][1]])):
            factors = [VecField.basis(self.ring, g.i, self.ring.monomial(g.k)) for g in u]
            out.append(SmashWord(self.ring.monomial(e), factors, c))
        return out


def smash_normal_form(w: SmashWord) -> list:
    alg = SmashAlgebra(w.lead.spec)
    return alg.to_words(alg.from_word(w))


# ---------------------------------------------------------------- random words

def random_element(rng: random.Random, ring: RingSpec, deg: int) -> RingElem:
    mons = ring.monomials(deg)
    picks = rng.sample(mons, min(len(mons), rng.randint(1, 3)))
    acc = ring.zero()
    for m in picks:
        acc = acc + m * Fraction(rng.randint(-3, 3) or 1, rng.randint(1, 2))
    return acc


def random_word(rng: random.Random, ring: RingSpec, deg: int = 3, length: int = 2) -> SmashWord:
    lead = random_element(rng, ring, deg)
    factors = []
    for _ in range(rng.randint(1, length)):
        if rng.random() < 0.35:
            factors.append(random_element(rng, ring, deg))
        else:
            comps = [random_element(rng, ring, deg) if rng.random() < 0.7 else ring.zero()
                     for _ in range(ring.nderivs)]
            if all(c.is_zero() for c in comps):
                comps[0] = ring.one()
            factors.append(VecField(ring, comps))
    return SmashWord(lead, factors)


def check_homomorphism(ring: RingSpec, pairs: int, s: int = 3, seed: int = 0, deg: int = 3) -> list:
    """Compare ``phi(NF(w1 w2))`` with ``phi(w1) phi(w2)`` on seeded random pairs.

    Returns a list of failing pair indices.
    """
    rng = random.Random(seed)
    bad = []
    for idx in range(pairs):
        w1 = random_word(rng, ring, deg, 2)
        w2 = random_word(rng, ring, deg, 1)
        lhs = phi(smash_normal_form(w1 * w2), s)
        rhs = phi(w1, s) * phi(w2, s)
        if lhs != rhs:
            bad.append(idx)
    return bad


def roundtrip_generators(ring: RingSpec, s: int) -> list:
    """Generators of ``D (x) U(L^s)`` paired with their images under ``phi . psi``."""
    n = ring.nderivs
    out = []
    coeffs = [ring.one()] + list(ring.params)
    for g in coeffs:
        e = JetPoly.one(s, DiffOp.mult(g))
        out.append((e, phi(psi(ring, g), s)))
        for i in range(n):
            e = JetPoly.one(s, DiffOp(ring, {_unit(n, i): g}))
            out.append((e, phi(psi(ring, g, d=i), s)))
        for k in multi_indices(n, 1, s + 1):
            for i in range(n):
                jg = JetGen(k, i)
                e = JetPoly.of(jg, s, DiffOp.mult(g))
                out.append((e, phi(psi(ring, g, jg), s)))
    return out
