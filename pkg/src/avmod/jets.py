"""Jets of vector fields and PBW arithmetic in their enveloping algebras.

A generator ``X^k d/dX_i`` is stored as ``JetGen(k, i)`` with ``i`` 0-based.
Its degree is ``|k| - 1``.  The same bracket describes polynomial vector
fields ``x^k d_i`` (``|k| >= 0``), so the PBW engine below serves both the
truncated algebras ``U(L^s)`` and the polynomial part of ``U(V)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import linalg
from .rings import multi_indices


class DegreeError(ValueError):
    pass


class TruncationMismatch(ValueError):
    pass


@dataclass(frozen=True, order=False)
class JetGen:
    k: tuple
    i: int

    @property
    def n(self) -> int:
        return len(self.k)

    @property
    def degree(self) -> int:
        return sum(self.k) - 1

    def key(self):
        return (self.degree, self.k, self.i)

    def to_text(self) -> str:
        mono = "*".join((f"X{j + 1}" if a == 1 else f"X{j + 1}^{a}")
                        for j, a in enumerate(self.k) if a)
        d = f"dX{self.i + 1}"
        return f"{mono}*{d}" if mono else d

    def __repr__(self):
        return self.to_text()


def gen(k, i: int) -> JetGen:
    return JetGen(tuple(k), i)


def raw_bracket(a: JetGen, b: JetGen) -> dict:
    """``[X^a d_i, X^b d_j] = b_i X^{a+b-e_i} d_j - a_j X^{a+b-e_j} d_i``."""
    out: dict = {}
    s = tuple(x + y for x, y in zip(a.k, b.k))
    if b.k[a.i]:
        e = list(s)
        e[a.i] -= 1
        g = JetGen(tuple(e), b.i)
        out[g] = out.get(g, 0) + b.k[a.i]
    if a.k[b.i]:
        e = list(s)
        e[b.i] -= 1
        g = JetGen(tuple(e), a.i)
        out[g] = out.get(g, 0) - a.k[b.i]
    return {g: Fraction(c) for g, c in out.items() if c}


def jet_bracket(a: JetGen, b: JetGen, s: int | None = None) -> dict:
    """Bracket in ``L^s``: terms of degree above ``s`` are dropped."""
    out = raw_bracket(a, b)
    if s is not None:
        out = {g: c for g, c in out.items() if g.degree <= s}
    return out


def generators(n: int, s: int, lo: int = 0) -> list:
    """Jet generators of degree ``lo..s`` in PBW order."""
    gens = [JetGen(k, i) for k in multi_indices(n, lo + 1, s + 1) for i in range(n)]
    return sorted(gens, key=JetGen.key)


def gl_embed(g: JetGen) -> tuple:
    """``X_j d/dX_i`` corresponds to ``E_{ji}``; returns ``(j, i)`` 0-based."""
    if sum(g.k) != 1:
        raise DegreeError(f"{g} is not a degree-0 generator")
    return (g.k.index(1), g.i)


def gl_gen(j: int, i: int, n: int) -> JetGen:
    """Inverse of :func:`gl_embed`."""
    k = [0] * n
    k[j] = 1
    return JetGen(tuple(k), i)


class PBW:
    """Enveloping algebra of a Lie algebra with a basis of hashable generators.

    ``bracket(a, b)`` returns a dict generator -> Fraction; ``key`` orders the
    basis; ``keep(g)`` is False for generators that vanish in the quotient.
    Monomials are nondecreasing tuples of generators.
    """

    def __init__(self, bracket: Callable, key: Callable, keep: Callable | None = None):
        self.bracket = bracket
        self.key = key
        self.keep = keep or (lambda g: True)
        self._cache: dict = {}

    def mono_gen(self, u: tuple, g) -> dict:
        """Normal form of ``u * g`` with Fraction coefficients."""
        if not self.keep(g):
            return {}
        ck = (u, g)
        hit = self._cache.get(ck)
        if hit is not None:
            return hit
        if not u or self.key(u[-1]) <= self.key(g):
            res = {u + (g,): Fraction(1)}
        else:
            head, last = u[:-1], u[-1]
            res: dict = {}
            for m, c in self.mono_gen(head, g).items():
                for mm, cc in self.mono_gen(m, last).items():
                    res[mm] = res.get(mm, 0) + c * cc
            for h, c in self.bracket(last, g).items():
                for mm, cc in self.mono_gen(head, h).items():
                    res[mm] = res.get(mm, 0) + c * cc
            res = {m: c for m, c in res.items() if c}
        self._cache[ck] = res
        return res

    def mono_mul(self, u: tuple, v: tuple) -> dict:
        cur = {u: Fraction(1)}
        for g in v:
            nxt: dict = {}
            for m, c in cur.items():
                for mm, cc in self.mono_gen(m, g).items():
                    nxt[mm] = nxt.get(mm, 0) + c * cc
            cur = {m: c for m, c in nxt.items() if c}
        return cur

    def mul(self, a: dict, b: dict, zero=0) -> dict:
        """Product of elements with arbitrary commuting coefficients."""
        out: dict = {}
        for ua, ca in a.items():
            for ub, cb in b.items():
                cab = ca * cb
                for m, c in self.mono_mul(ua, ub).items():
                    term = cab * c
                    out[m] = out[m] + term if m in out else term
        return {m: c for m, c in out.items() if not _is_zero(c)}


def _is_zero(c) -> bool:
    if hasattr(c, "is_zero"):
        return c.is_zero()
    return c == 0


_ALGEBRAS: dict = {}


def truncated_algebra(s: int) -> PBW:
    """PBW engine for ``U(L^s)`` (any number of variables)."""
    if s not in _ALGEBRAS:
        _ALGEBRAS[s] = PBW(lambda a, b: jet_bracket(a, b, s), JetGen.key,
                           lambda g: g.degree <= s)
    return _ALGEBRAS[s]


def field_algebra() -> PBW:
    """PBW engine for ``U`` of polynomial vector fields ``x^k d_i``."""
    if "fields" not in _ALGEBRAS:
        _ALGEBRAS["fields"] = PBW(raw_bracket, JetGen.key)
    return _ALGEBRAS["fields"]


class JetPoly:
    """Element of ``U(L^s)`` (or of ``C (x) U(L^s)`` for commuting coefficients)."""

    __slots__ = ("s", "terms")

    def __init__(self, s: int, terms: dict | None = None):
        self.s = s
        self.terms = {}
        for m, c in (terms or {}).items():
            if any(g.degree > s for g in m):
                continue
            if not _is_zero(c):
                self.terms[tuple(m)] = c

    @classmethod
    def one(cls, s: int, coeff=Fraction(1)) -> "JetPoly":
        return cls(s, {(): coeff})

    @classmethod
    def of(cls, g: JetGen, s: int, coeff=Fraction(1)) -> "JetPoly":
        return cls(s, {(g,): coeff})

    def _same(self, other):
        if other.s != self.s:
            raise TruncationMismatch(f"truncations {self.s} and {other.s}")

    def __add__(self, other: "JetPoly") -> "JetPoly":
        self._same(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return JetPoly(self.s, out)

    def __neg__(self):
        return JetPoly(self.s, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "JetPoly":
        return JetPoly(self.s, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, JetPoly):
            return pbw_mul(self, other)
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, JetPoly):
            return NotImplemented
        if self.s != other.s or set(self.terms) != set(other.terms):
            return False
        return all(self.terms[m] == other.terms[m] for m in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: [g.key() for g in m]):
            c = self.terms[m]
            ct = c.to_text() if hasattr(c, "to_text") else str(c)
            w = " ".join(g.to_text() for g in m) or "1"
            parts.append(f"({ct}) {w}")
        return " + ".join(parts)

    __repr__ = to_text


def pbw_mul(a: JetPoly, b: JetPoly) -> JetPoly:
    a._same(b)
    return JetPoly(a.s, truncated_algebra(a.s).mul(a.terms, b.terms))


# ---------------------------------------------------------------- jet representations

class JetRep:
    """Finite-dimensional module over ``L^s`` given by generator matrices.

    Generators not listed act by zero.  Construction checks all brackets
    among generators of degree ``0..s`` for ``n`` variables.
    """

    def __init__(self, n: int, s: int, dim: int, mats: dict, label: str = "", check: bool = True):
        self.n = n
        self.s = s
        self.dim = dim
        self.mats = {g: m for g, m in mats.items() if not linalg.is_zero(m)}
        self.label = label
        self.rep = None
        if check:
            self._check()

    def mat(self, g: JetGen) -> np.ndarray:
        m = self.mats.get(g)
        return m if m is not None else linalg.zeros(self.dim)

    def _check(self):
        gens = generators(self.n, self.s)
        for a in gens:
            for b in gens:
                if a.key() >= b.key():
                    continue
                lhs = self.mat(a) @ self.mat(b) - self.mat(b) @ self.mat(a)
                rhs = linalg.zeros(self.dim)
                for g, c in jet_bracket(a, b, self.s).items():
                    rhs = rhs + c * self.mat(g)
                if not (lhs == rhs).all():
                    raise ValueError(f"bracket [{a}, {b}] is not represented")

    def act(self, g: JetGen, w) -> list:
        m = self.mats.get(g)
        if m is None:
            return [Fraction(0)] * self.dim
        return list(m.dot(np.array(w, dtype=object)))

    def act_poly(self, p: JetPoly) -> np.ndarray:
        out = linalg.zeros(self.dim)
        for mono, c in p.terms.items():
            m = linalg.eye(self.dim)
            for g in mono:
                m = m @ self.mat(g)
            out = out + c * m
        return out

    def killed_from(self) -> int:
        """Least degree ``d`` such that all generators of degree ``>= d`` act by zero."""
        return max((g.degree for g in self.mats), default=-1) + 1

    @classmethod
    def from_gl(cls, rep, s: int = 1) -> "JetRep":
        mats = {}
        for j in range(rep.n):
            for i in range(rep.n):
                mats[gl_gen(j, i, rep.n)] = rep.E(j, i)
        out = cls(rep.n, s, rep.dim, mats, label=rep.label, check=False)
        out.rep = rep
        return out

    @classmethod
    def jetchain(cls, d: int, a, s: int | None = None) -> "JetRep":
        """One-variable module of dimension ``d``.

        ``X d/dX`` acts by ``diag(a, a+1, ...)`` and ``X^2 d/dX`` sends
        ``e_i`` to ``2 e_{i+1}``; higher jets act by zero.
        """
        a = Fraction(a)
        s = max(d, 2) if s is None else s
        D = linalg.zeros(d)
        R = linalg.zeros(d)
        for i in range(d):
            D[i, i] = a + i
            if i + 1 < d:
                R[i + 1, i] = Fraction(2)
        mats = {JetGen((1,), 0): D, JetGen((2,), 0): R}
        return cls(1, s, d, mats, label=f"jetchain({d},{a})")
