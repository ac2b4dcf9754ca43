"""Exact coordinate rings of the built-in charts.

Four kinds of ring are supported, all over the rationals:

* ``poly``: Q[x_1, ..., x_n]
* ``laurent``: Q[x_1^{+-1}, ..., x_n^{+-1}]
* ``quotient``: Q[x_1, ..., x_n] / (y^d - r) for one designated leading
  variable ``y``; normal forms have ``y``-degree below ``d``
* ``localized``: B_f for a base ring ``B`` (poly or quotient) and ``f != 0``;
  elements are stored as ``g / f^k`` with ``k`` minimal

Each ring carries a list of commuting basis derivations (the coordinate
partials on polynomial and Laurent rings, externally supplied images of the
generators otherwise) and, when available, uniformizing parameters.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, Sequence


class SpecMismatch(ValueError):
    """Raised when elements of different rings are combined."""


class NotAUnit(ValueError):
    pass


Exp = tuple  # fixed-length tuple of ints


def _add_exp(a: Exp, b: Exp) -> Exp:
    return tuple(x + y for x, y in zip(a, b))


def _sub_exp(a: Exp, b: Exp) -> Exp:
    return tuple(x - y for x, y in zip(a, b))


def _add_into(acc: dict, terms: dict, scale=1) -> None:
    for e, c in terms.items():
        v = acc.get(e, 0) + c * scale
        if v:
            acc[e] = v
        else:
            acc.pop(e, None)


def _mul_terms(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = _add_exp(ea, eb)
            v = out.get(e, 0) + ca * cb
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_terms(names: Sequence[str], terms: dict) -> str:
    """Canonical text: terms in descending lexicographic exponent order."""
    if not terms:
        return "0"
    parts = []
    for e in sorted(terms, reverse=True):
        c = terms[e]
        mono = "*".join(
            (n if a == 1 else f"{n}^{a}") for n, a in zip(names, e) if a != 0
        )
        sign = "-" if c < 0 else "+"
        mag = -c if c < 0 else c
        if mono:
            body = mono if mag == 1 else f"{_fmt_coeff(mag)}*{mono}"
        else:
            body = _fmt_coeff(mag)
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


class RingSpec:
    """Description of one coordinate ring.  Compared by its ``key``."""

    def __init__(self, kind: str, names: Sequence[str], key: str, *, base=None,
                 lead: int | None = None, rel_degree: int | None = None,
                 rel_tail: dict | None = None, denom: "RingElem | None" = None):
        if len(names) < 1:
            raise ValueError("a ring needs at least one variable")
        self.kind = kind
        self.names = tuple(names)
        self.n = len(self.names)
        self.key = key
        self.base = base
        self.lead = lead
        self.rel_degree = rel_degree
        self.rel_tail = rel_tail
        self.denom = denom
        self._derivs: tuple | None = None
        self._standard = kind in ("poly", "laurent")
        self.params: tuple | None = None
        self._fpow_cache: dict = {}

    def __eq__(self, other):
        return isinstance(other, RingSpec) and other.key == self.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"RingSpec({self.key})"

    # construction helpers
    def zero(self) -> "RingElem":
        return RingElem(self, {}, 0)

    def one(self) -> "RingElem":
        return self.const(1)

    def const(self, c) -> "RingElem":
        c = Fraction(c)
        nv = self.base.n if self.kind == "localized" else self.n
        return RingElem(self, {(0,) * nv: c} if c else {}, 0)

    def var(self, i: int | str) -> "RingElem":
        if isinstance(i, str):
            i = self.names.index(i)
        e = [0] * self.n
        e[i] = 1
        return self.from_terms({tuple(e): Fraction(1)})

    def gens(self) -> list:
        return [self.var(i) for i in range(self.n)]

    def monomial(self, e: Exp, c=1) -> "RingElem":
        return self.from_terms({tuple(e): Fraction(c)})

    def from_terms(self, terms: dict) -> "RingElem":
        """Build an element from an exponent map, normalizing as needed."""
        clean = {tuple(e): Fraction(c) for e, c in terms.items() if c}
        if self.kind == "poly":
            if any(x < 0 for e in clean for x in e):
                raise ValueError("negative exponent in a polynomial ring")
            return RingElem(self, clean, 0)
        if self.kind == "laurent":
            return RingElem(self, clean, 0)
        if self.kind == "quotient":
            return RingElem(self, self._reduce(clean), 0)
        # localized: terms are read in the base ring
        return self.fraction(self.base.from_terms(clean), 0)

    def fraction(self, num: "RingElem", k: int) -> "RingElem":
        """``num / f^k`` for the localizing element ``f``."""
        if self.kind != "localized":
            raise SpecMismatch("fraction() needs a localized ring")
        if num.spec != self.base:
            raise SpecMismatch(f"{num.spec} is not the base of {self}")
        return self._canon(num, k)

    # quotient normal form
    def _reduce(self, terms: dict) -> dict:
        L, d, tail = self.lead, self.rel_degree, self.rel_tail
        out: dict = {}
        todo = dict(terms)
        while todo:
            nxt: dict = {}
            for e, c in todo.items():
                if e[L] < d:
                    v = out.get(e, 0) + c
                    if v:
                        out[e] = v
                    else:
                        out.pop(e, None)
                    continue
                rest = list(e)
                rest[L] -= d
                rest = tuple(rest)
                for te, tc in tail.items():
                    ne = _add_exp(rest, te)
                    v = nxt.get(ne, 0) + c * tc
                    if v:
                        nxt[ne] = v
                    else:
                        nxt.pop(ne, None)
            todo = nxt
        return out

    # localization
    def _fpow(self, m: int) -> "RingElem":
        if m not in self._fpow_cache:
            self._fpow_cache[m] = self.denom ** m
        return self._fpow_cache[m]

    def _canon(self, num: "RingElem", k: int) -> "RingElem":
        if num.is_zero():
            return RingElem(self, {}, 0)
        while k > 0:
            q = divide_exact(num, self.denom)
            if q is None:
                break
            num, k = q, k - 1
        while k < 0:
            num, k = num * self.denom, k + 1
        return RingElem(self, num.terms, k)

    # derivations
    @property
    def nderivs(self) -> int:
        if self._derivs is not None:
            return len(self._derivs)
        if self._standard:
            return self.n
        if self.kind == "localized":
            return self.base.nderivs
        return 0

    def set_derivations(self, images: Sequence[Sequence["RingElem"]],
                        params: Sequence["RingElem"] | None = None) -> None:
        """Install basis derivations given by their values on the generators.

        For quotient rings each derivation must kill the relation.
        """
        imgs = tuple(tuple(self.coerce(v) for v in row) for row in images)
        for row in imgs:
            if len(row) != (self.n if self.kind != "localized" else self.base.n):
                raise ValueError("one image per generator is required")
        self._derivs = imgs
        self._standard = False
        if self.kind == "quotient":
            rel = {}
            e = [0] * self.n
            e[self.lead] = self.rel_degree
            rel[tuple(e)] = Fraction(1)
            _add_into(rel, self.rel_tail, -1)
            for i in range(len(imgs)):
                val = _derive_raw(self, rel, i)
                if not val.is_zero():
                    raise ValueError(f"derivation {i} does not preserve the relation: {val}")
        if params is not None:
            self.params = tuple(self.coerce(p) for p in params)

    def coerce(self, x) -> "RingElem":
        if isinstance(x, RingElem):
            if x.spec == self:
                return x
            if self.kind == "localized" and x.spec == self.base:
                return self.fraction(x, 0)
            raise SpecMismatch(f"cannot coerce element of {x.spec} into {self}")
        return self.const(x)

    # enumeration
    def monomials(self, d: int) -> list:
        """Monomial k-basis elements of degree at most ``d`` (deterministic order)."""
        if self.kind == "poly":
            exps = [e for e in _exps_upto(self.n, d)]
            return [self.monomial(e) for e in exps]
        if self.kind == "laurent":
            out = []
            for e in _signed_exps_upto(self.n, d):
                out.append(self.monomial(e))
            return out
        if self.kind == "quotient":
            return [self.monomial(e) for e in _exps_upto(self.n, d)
                    if e[self.lead] < self.rel_degree]
        out = []
        fdeg = self.base_degree(self.denom)
        for k in range(0, d + 1):
            for m in self.base.monomials(d - k * fdeg if fdeg else d):
                out.append(self.fraction(m, k))
            if fdeg == 0:
                break
        uniq = []
        seen = set()
        for m in out:
            if m not in seen:
                seen.add(m)
                uniq.append(m)
        return uniq

    def base_degree(self, x: "RingElem") -> int:
        return max((sum(abs(v) for v in e) for e in x.terms), default=0)


def _exps_upto(n: int, d: int) -> list:
    out = []

    def rec(prefix, left, slots):
        if slots == 0:
            out.append(tuple(prefix))
            return
        for a in range(left + 1):
            rec(prefix + [a], left - a, slots - 1)

    for total in range(d + 1):
        rec([], total, n)
    # rec yields all exponents with sum <= total; keep those with sum == total
    res = []
    seen = set()
    for e in out:
        if e not in seen:
            seen.add(e)
            res.append(e)
    res.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
    return res


def _signed_exps_upto(n: int, d: int) -> list:
    res = set()
    for e in _exps_upto(n, d):
        signs = [[1] if x == 0 else [1, -1] for x in e]
        from itertools import product
        for s in product(*signs):
            res.add(tuple(x * y for x, y in zip(e, s)))
    return sorted(res, key=lambda e: (sum(abs(x) for x in e), tuple(-x for x in e)))


class RingElem:
    """Immutable ring element in normal form.

    For localized rings ``terms`` hold the numerator (in the base ring) and
    ``den`` the power of the localizing element.
    """

    __slots__ = ("spec", "terms", "den", "_hash")

    def __init__(self, spec: RingSpec, terms: dict, den: int = 0):
        self.spec = spec
        self.terms = terms
        self.den = den
        self._hash = None

    # structure
    @property
    def num(self) -> "RingElem":
        if self.spec.kind != "localized":
            return self
        return RingElem(self.spec.base, self.terms, 0)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def _check(self, other) -> "RingElem":
        if not isinstance(other, RingElem):
            return self.spec.const(other)
        if other.spec != self.spec:
            if self.spec.kind == "localized" and other.spec == self.spec.base:
                return self.spec.fraction(other, 0)
            raise SpecMismatch(f"{self.spec.key} vs {other.spec.key}")
        return other

    def __eq__(self, other):
        if not isinstance(other, RingElem):
            try:
                other = self.spec.const(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.spec == other.spec and self.den == other.den and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.spec.key, self.den, frozenset(self.terms.items())))
        return self._hash

    # arithmetic
    def __add__(self, other):
        other = self._check(other)
        sp = self.spec
        if sp.kind == "localized":
            k = max(self.den, other.den)
            a = self.num * sp._fpow(k - self.den) if k > self.den else self.num
            b = other.num * sp._fpow(k - other.den) if k > other.den else other.num
            return sp._canon(a + b, k)
        out = dict(self.terms)
        _add_into(out, other.terms)
        return RingElem(sp, out, 0)

    __radd__ = __add__

    def __neg__(self):
        return RingElem(self.spec, {e: -c for e, c in self.terms.items()}, self.den)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        if not isinstance(other, RingElem):
            c = Fraction(other)
            if not c:
                return self.spec.zero()
            return RingElem(self.spec, {e: v * c for e, v in self.terms.items()}, self.den)
        other = self._check(other)
        sp = self.spec
        if sp.kind == "localized":
            return sp._canon(self.num * other.num, self.den + other.den)
        prod = _mul_terms(self.terms, other.terms)
        if sp.kind == "quotient":
            prod = sp._reduce(prod)
        return RingElem(sp, prod, 0)

    __rmul__ = __mul__

    def __pow__(self, m: int):
        if m < 0:
            return inverse(self) ** (-m)
        out = self.spec.one()
        base = self
        while m:
            if m & 1:
                out = out * base
            base = base * base
            m >>= 1
        return out

    def __truediv__(self, other):
        if isinstance(other, RingElem):
            return self * inverse(other)
        return self * (1 / Fraction(other))

    # calculus
    def derive(self, i: int) -> "RingElem":
        return derive(self, i)

    def degree(self) -> int:
        sp = self.spec
        top = max((sum(abs(v) for v in e) for e in self.terms), default=0)
        if sp.kind == "localized":
            return top + self.den * sp.base_degree(sp.denom)
        return top

    def constant(self) -> Fraction:
        """Constant coefficient of a polynomial-like element."""
        if self.spec.kind == "localized":
            raise ValueError("constant term is not defined on a localization")
        return self.terms.get((0,) * self.spec.n, Fraction(0))

    def __repr__(self):
        return self.to_text()

    def to_text(self) -> str:
        sp = self.spec
        if sp.kind == "localized":
            num = format_terms(sp.base.names, self.terms)
            if self.den == 0:
                return num
            f = format_terms(sp.base.names, sp.denom.terms)
            den = f"({f})" if self.den == 1 else f"({f})^{self.den}"
            return f"({num})/{den}"
        return format_terms(sp.names, self.terms)


# ---------------------------------------------------------------- factories

_SPECS: dict = {}


def poly(*names: str) -> RingSpec:
    key = f"Q[{','.join(names)}]"
    if key not in _SPECS:
        sp = RingSpec("poly", names, key)
        _SPECS[key] = sp
        sp.params = tuple(sp.gens())
    return _SPECS[key]


def laurent(*names: str) -> RingSpec:
    key = f"Q[{','.join(n + '^+-1' for n in names)}]"
    if key not in _SPECS:
        sp = RingSpec("laurent", names, key)
        _SPECS[key] = sp
        sp.params = tuple(sp.gens())
    return _SPECS[key]


def quotient_by(base: RingSpec, lead: str, degree: int, rhs: RingElem,
                tag: str | None = None) -> RingSpec:
    """Quotient by the single rewrite rule ``lead^degree -> rhs``."""
    if base.kind != "poly":
        raise ValueError("quotients are taken of polynomial rings")
    L = base.names.index(lead)
    if any(e[L] >= degree for e in rhs.terms):
        raise ValueError("rewrite rule does not terminate")
    key = tag or f"{base.key}/({lead}^{degree} = {rhs.to_text()})"
    if key not in _SPECS:
        _SPECS[key] = RingSpec("quotient", base.names, key, base=base, lead=L,
                               rel_degree=degree, rel_tail=dict(rhs.terms))
    return _SPECS[key]


def localized(base: RingSpec, f: RingElem, tag: str | None = None) -> RingSpec:
    if f.spec != base:
        raise SpecMismatch("localizing element must live in the base ring")
    if f.is_zero():
        raise ValueError("cannot localize at zero")
    if base.kind not in ("poly", "quotient"):
        raise ValueError("localization supports polynomial and quotient bases")
    key = tag or f"{base.key}_[{f.to_text()}]"
    if key not in _SPECS:
        sp = RingSpec("localized", base.names, key, base=base, denom=f)
        _SPECS[key] = sp
        if base.kind == "poly":
            sp.params = tuple(sp.coerce(g) for g in base.gens())
    return _SPECS[key]


def localize(f: RingElem, target: RingSpec) -> RingElem:
    """Canonical image of ``f`` in the localization ``target`` of its ring."""
    if target.kind != "localized" or target.base != f.spec:
        raise SpecMismatch(f"{target} is not a localization of {f.spec}")
    return target.fraction(f, 0)


# ---------------------------------------------------------------- division

def _lead(terms: dict) -> Exp:
    return max(terms)


def _poly_divide(g: dict, f: dict) -> dict | None:
    """Exact quotient ``g / f`` in a polynomial ring, or None."""
    if not f:
        raise ZeroDivisionError
    lf = _lead(f)
    cf = f[lf]
    r = dict(g)
    q: dict = {}
    while r:
        lr = _lead(r)
        e = _sub_exp(lr, lf)
        if any(x < 0 for x in e):
            return None
        c = r[lr] / cf
        q[e] = c
        for fe, fc in f.items():
            ne = _add_exp(e, fe)
            v = r.get(ne, 0) - c * fc
            if v:
                r[ne] = v
            else:
                r.pop(ne, None)
    return q


def _det(M: list, base: RingSpec) -> RingElem:
    n = len(M)
    if n == 1:
        return M[0][0]
    total = base.zero()
    for j in range(n):
        if M[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _det(minor, base)
        total = total + term if j % 2 == 0 else total - term
    return total


def divide_exact(g: RingElem, f: RingElem) -> RingElem | None:
    """Return ``q`` with ``f*q == g`` in the ring of ``g``, or None."""
    sp = g.spec
    if f.spec != sp:
        raise SpecMismatch("divide_exact needs elements of one ring")
    if g.is_zero():
        return sp.zero()
    if sp.kind == "poly":
        q = _poly_divide(g.terms, f.terms)
        return None if q is None else RingElem(sp, q, 0)
    if sp.kind == "laurent":
        if len(f.terms) == 1:
            return g * inverse(f)
        shift = tuple(-min(0, min(e[i] for e in g.terms)) for i in range(sp.n))
        fshift = tuple(-min(0, min(e[i] for e in f.terms)) for i in range(sp.n))
        gp = {_add_exp(e, shift): c for e, c in g.terms.items()}
        fp = {_add_exp(e, fshift): c for e, c in f.terms.items()}
        q = _poly_divide(gp, fp)
        if q is None:
            return None
        back = _sub_exp(fshift, shift)
        return RingElem(sp, {_add_exp(e, back): c for e, c in q.items()}, 0)
    if sp.kind == "quotient":
        return _quotient_divide(g, f)
    # localized: g/f' divided by u/f'^k
    num_q = None
    for extra in range(0, 6):
        num_q = divide_exact(g.num * sp._fpow(extra).num if extra else g.num, f.num)
        if num_q is not None:
            return sp._canon(num_q, g.den - f.den + extra)
    return None


def _quotient_divide(g: RingElem, f: RingElem) -> RingElem | None:
    sp = g.spec
    base = sp.base
    L, d = sp.lead, sp.rel_degree

    def split(x: RingElem) -> list:
        parts = [dict() for _ in range(d)]
        for e, c in x.terms.items():
            j = e[L]
            ee = list(e)
            ee[L] = 0
            parts[j][tuple(ee)] = c
        return [RingElem(base, p, 0) for p in parts]

    cols = []
    for j in range(d):
        e = [0] * sp.n
        e[L] = j
        cols.append(split(f * sp.monomial(tuple(e))))
    M = [[cols[j][i] for j in range(d)] for i in range(d)]
    det = _det(M, base)
    if det.is_zero():
        return None
    rhs = split(g)
    sol = []
    for i in range(d):
        Mi = [row[:i] + [rhs[r]] + row[i + 1:] for r, row in enumerate(M)]
        num = _det(Mi, base)
        q = _poly_divide(num.terms, det.terms) if num.terms else {}
        if q is None:
            return None
        sol.append(q)
    out: dict = {}
    for j, q in enumerate(sol):
        for e, c in q.items():
            ee = list(e)
            ee[L] += j
            out[tuple(ee)] = c
    res = RingElem(sp, sp._reduce(out), 0)
    return res if res * f == g else None


def inverse(x: RingElem) -> RingElem:
    """Multiplicative inverse of a unit."""
    sp = x.spec
    if x.is_zero():
        raise ZeroDivisionError("zero is not invertible")
    if sp.kind in ("poly", "quotient"):
        if len(x.terms) == 1 and x.constant():
            return sp.const(1 / x.constant())
        raise NotAUnit(f"{x} is not a unit in {sp.key}")
    if sp.kind == "laurent":
        if len(x.terms) != 1:
            raise NotAUnit(f"{x} is not a unit in {sp.key}")
        (e, c), = x.terms.items()
        return RingElem(sp, {tuple(-v for v in e): 1 / c}, 0)
    num = x.num
    for m in range(0, 9):
        q = divide_exact(sp._fpow(m).num if m else sp.base.one(), num)
        if q is not None:
            return sp._canon(q, m - x.den) if m >= x.den else sp._canon(q * sp._fpow(x.den - m).num, 0)
    raise NotAUnit(f"{x} is not a unit in {sp.key}")


# ---------------------------------------------------------------- calculus

def _derive_raw(sp: RingSpec, terms: dict, i: int) -> RingElem:
    """Chain rule over generator images for terms read in ``sp`` (or its base)."""
    imgs = sp._derivs[i]
    acc = sp.zero()
    nv = len(imgs)
    for j in range(nv):
        part: dict = {}
        for e, c in terms.items():
            a = e[j]
            if a == 0:
                continue
            ee = list(e)
            ee[j] -= 1
            part[tuple(ee)] = part.get(tuple(ee), 0) + c * a
        part = {e: c for e, c in part.items() if c}
        if not part:
            continue
        if sp.kind == "localized":
            pe = sp.fraction(RingElem(sp.base, sp.base._reduce(part) if sp.base.kind == "quotient" else part, 0), 0)
        elif sp.kind == "quotient":
            pe = RingElem(sp, sp._reduce(part), 0)
        else:
            pe = RingElem(sp, part, 0)
        acc = acc + pe * imgs[j]
    return acc


@lru_cache(maxsize=1 << 16)
def derive(f: RingElem, i: int) -> RingElem:
    """Apply the ``i``-th basis derivation of ``f``'s ring."""
    sp = f.spec
    if i < 0 or i >= sp.nderivs:
        raise IndexError(f"{sp.key} has {sp.nderivs} basis derivations")
    if sp._standard:
        out: dict = {}
        for e, c in f.terms.items():
            a = e[i]
            if a == 0:
                continue
            ee = list(e)
            ee[i] -= 1
            out[tuple(ee)] = c * a
        return RingElem(sp, out, 0)
    if sp.kind == "localized":
        if sp._derivs is None:
            # inherit the base derivations
            sp._derivs = tuple(
                tuple(sp.coerce(derive(g, k)) for g in sp.base.gens())
                for k in range(sp.base.nderivs))
        if f.den == 0:
            return _derive_raw(sp, f.terms, i)
        g = f.num
        dg = _derive_raw(sp, g.terms, i)
        df = _derive_raw(sp, sp.denom.terms, i)
        gl = sp.fraction(g, 0)
        return (dg * sp.fraction(sp.denom, 0) - gl * df * f.den) * sp.fraction(sp.base.one(), f.den + 1)
    if sp._derivs is None:
        raise ValueError(f"{sp.key} has no basis derivations installed")
    return _derive_raw(sp, f.terms, i)


@lru_cache(maxsize=1 << 16)
def partial(f: RingElem, k: tuple) -> RingElem:
    """Iterated basis derivation ``d^k f`` for a multi-index ``k``."""
    for i, a in enumerate(k):
        if a:
            kk = list(k)
            kk[i] -= 1
            return derive(partial(f, tuple(kk)), i)
    return f


def multi_indices(n: int, lo: int, hi: int) -> list:
    """All multi-indices of length ``n`` with ``lo <= |k| <= hi``."""
    return [e for e in _exps_upto(n, hi) if sum(e) >= lo]


def kfact(k: Iterable[int]) -> int:
    out = 1
    for a in k:
        out *= factorial(a)
    return out


@lru_cache(maxsize=1 << 14)
def taylor_shift(f: RingElem, s: int) -> dict:
    """Taylor expansion ``f(x + X)`` truncated at total ``X``-degree ``s``.

    Returns a map from multi-index ``k`` to the coefficient
    ``(1/k!) d^k f``; zero coefficients are omitted.
    """
    n = f.spec.nderivs
    out = {}
    for k in multi_indices(n, 0, s):
        c = partial(f, k)
        if not c.is_zero():
            out[k] = c * Fraction(1, kfact(k))
    return out


# ---------------------------------------------------------------- substitution

def substitute(f: RingElem, images: Sequence[RingElem], target: RingSpec) -> RingElem:
    """Ring map sending the ``j``-th generator of ``f``'s ring to ``images[j]``.

    Negative exponents and localization denominators are sent to inverses,
    so their images must be units in ``target``.
    """
    sp = f.spec
    imgs = [target.coerce(v) for v in images]
    cache: dict = {}

    def power(j, a):
        if (j, a) not in cache:
            cache[(j, a)] = imgs[j] ** a
        return cache[(j, a)]

    acc = target.zero()
    for e, c in f.terms.items():
        m = target.const(c)
        for j, a in enumerate(e):
            if a:
                m = m * power(j, a)
        acc = acc + m
    if sp.kind == "localized" and f.den:
        fden = substitute(sp.denom, images, target)
        acc = acc * inverse(fden) ** f.den
    return acc


def to_laurent(f: RingElem, target: RingSpec) -> RingElem:
    """Read an element of ``Q[x]_{monomial}`` in the matching Laurent ring."""
    return substitute(f, target.gens(), target)


# ---------------------------------------------------------------- built-in rings

def elliptic() -> RingSpec:
    """Q[t, y] / (y^2 - t^3 + t) with basis derivation 2y d_t + (3t^2 - 1) d_y."""
    key = "elliptic"
    if key in _SPECS:
        return _SPECS[key]
    base = poly("t", "y")
    t, y = base.gens()
    sp = quotient_by(base, "y", 2, t ** 3 - t, tag=key)
    t, y = sp.gens()
    sp.set_derivations([[2 * y, 3 * t * t - 1]])
    return sp


def circle_quotient() -> RingSpec:
    base = poly("x", "y")
    x, _ = base.gens()
    return quotient_by(base, "y", 2, 1 - x * x, tag="circle")


def circle_chart(param: str) -> RingSpec:
    """Chart of x^2 + y^2 = 1 where ``param`` is uniformizing.

    ``param == "x"`` gives D(y) with d_x; ``param == "y"`` gives D(x) with d_y.
    """
    key = f"circle[{param}]"
    if key in _SPECS:
        return _SPECS[key]
    Qr = circle_quotient()
    x, y = Qr.gens()
    other = y if param == "x" else x
    sp = localized(Qr, other, tag=key)
    X, Y = sp.gens()
    if param == "x":
        sp.set_derivations([[sp.one(), -X * inverse(Y)]], params=[X])
    else:
        sp.set_derivations([[-Y * inverse(X), sp.one()]], params=[Y])
    return sp


def circle_overlap(param: str) -> RingSpec:
    """The overlap D(xy) of the circle charts, with the ``param`` derivation."""
    key = f"circle[xy;{param}]"
    if key in _SPECS:
        return _SPECS[key]
    Qr = circle_quotient()
    x, y = Qr.gens()
    sp = localized(Qr, x * y, tag=key)
    X, Y = sp.gens()
    if param == "x":
        sp.set_derivations([[sp.one(), -X * inverse(Y)]], params=[X])
    else:
        sp.set_derivations([[-Y * inverse(X), sp.one()]], params=[Y])
    return sp
