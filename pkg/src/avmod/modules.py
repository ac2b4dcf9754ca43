"""AV-modules: modules over a coordinate ring with a compatible action of vector fields.

Every module here exposes the same small interface:

* ``ring``: the coordinate ring
* ``zero()``, ``add(a, b)``, ``scale(c, a)``, ``is_zero(a)``, ``eq(a, b)``
* ``act_ring(f, m)`` and ``act_field(eta, m)``
* ``basis(d)``: spanning elements of the carrier up to degree ``d``
* ``coords(m)``: sparse coordinates (only for carriers with a monomial basis)
* ``to_text(m)``

Elements are plain Python values (ring elements, dicts or tuples of those).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb
from typing import Sequence

from . import gln
from .jets import JetGen, JetRep
from .rings import RingElem, RingSpec, elliptic, localized, partial, kfact
from .weyl import DeltaModule, VecField, bracket, monomial_fields


class SyzygyViolation(ValueError):
    pass


class NotFree(ValueError):
    pass


class UnknownDifferentiability(ValueError):
    pass


# ---------------------------------------------------------------- D-module handles

class RingDModule:
    """The coordinate ring acting on itself."""

    kind = "ring"

    def __init__(self, ring: RingSpec):
        self.ring = ring
        self.label = ring.key

    def zero(self):
        return self.ring.zero()

    def add(self, a, b):
        return a + b

    def scale(self, c, a):
        return a * c

    def is_zero(self, a) -> bool:
        return a.is_zero()

    def eq(self, a, b) -> bool:
        return a == b

    def act_ring(self, f, a):
        return f * a

    def act_d(self, i, a):
        return partial(a, tuple(int(k == i) for k in range(self.ring.nderivs)))

    def basis(self, d):
        return self.ring.monomials(d)

    def coords(self, a) -> dict:
        return {(a.den, e): c for e, c in a.terms.items()}

    def to_text(self, a) -> str:
        return a.to_text()

    def zero_representatives(self, d):
        return []


class DeltaDModule:
    """Delta functions supported at a rational point."""

    kind = "delta"

    def __init__(self, point: Sequence, names=None):
        self.delta_module = DeltaModule(point, names)
        self.ring = self.delta_module.ring
        self.label = f"delta({','.join(str(p) for p in self.delta_module.point)})"

    def zero(self):
        return {}

    def add(self, a, b):
        out = dict(a)
        for k, c in b.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return out

    def scale(self, c, a):
        c = Fraction(c)
        return {k: v * c for k, v in a.items()} if c else {}

    def is_zero(self, a) -> bool:
        return not a

    def eq(self, a, b) -> bool:
        return a == b

    def act_ring(self, f, a):
        return self.delta_module.act_ring(f, a)

    def act_d(self, i, a):
        return self.delta_module.d(i, a)

    def basis(self, d):
        return self.delta_module.basis(d)

    def coords(self, a) -> dict:
        return dict(a)

    def to_text(self, a) -> str:
        if not a:
            return "0"
        parts = []
        for b in sorted(a):
            d = " ".join((f"d{i + 1}" if x == 1 else f"d{i + 1}^{x}") for i, x in enumerate(b) if x)
            parts.append(f"{a[b]}*{d + ' ' if d else ''}delta")
        return " + ".join(parts)

    def zero_representatives(self, d):
        return []


@dataclass
class GaugeData:
    """A projective module given by generators inside the ring, syzygies and gauge fields.

    ``embed[j]`` is the image of generator ``G_j`` in the ring; ``syzygies``
    are coefficient tuples ``s`` with ``sum s_j G_j = 0``; ``gauge[i][j]`` is
    the coefficient tuple of ``d_i(G_j)`` for the ``i``-th basis derivation.
    """
    ring: RingSpec
    names: tuple
    embed: tuple
    syzygies: list
    gauge: list
    normalizer: object = None
    label: str = "gauge"


class GaugeDModule:
    kind = "gauge"

    def __init__(self, data: GaugeData, check: bool = True):
        self.data = data
        self.ring = data.ring
        self.r = len(data.names)
        self.label = data.label
        for s in data.syzygies:
            if not self._embed(s).is_zero():
                raise SyzygyViolation(f"declared syzygy {self.to_text(s)} does not vanish")
        if check:
            for i in range(self.ring.nderivs):
                for s in data.syzygies:
                    val = self.act_d(i, s)
                    if not self.is_zero(val):
                        raise SyzygyViolation(
                            f"gauge field {i + 1} is not compatible with {self.to_text(s)} = 0: "
                            f"image {self.to_text(self.normal(val))}")

    def _embed(self, a) -> RingElem:
        acc = self.ring.zero()
        for c, g in zip(a, self.data.embed):
            acc = acc + c * g
        return acc

    def normal(self, a):
        if self.data.normalizer is None:
            return a
        return self.data.normalizer(a)

    def zero(self):
        return tuple(self.ring.zero() for _ in range(self.r))

    def gen(self, j, coeff=None):
        out = list(self.zero())
        out[j] = self.ring.one() if coeff is None else self.ring.coerce(coeff)
        return tuple(out)

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def scale(self, c, a):
        return tuple(x * c for x in a)

    def is_zero(self, a) -> bool:
        return self._embed(a).is_zero()

    def eq(self, a, b) -> bool:
        return self._embed(a) == self._embed(b)

    def act_ring(self, f, a):
        return tuple(f * x for x in a)

    def act_d(self, i, a):
        out = [self.ring.zero()] * self.r
        e = tuple(int(k == i) for k in range(self.ring.nderivs))
        for j, c in enumerate(a):
            if c.is_zero():
                continue
            out[j] = out[j] + partial(c, e)
            for k, g in enumerate(self.data.gauge[i][j]):
                out[k] = out[k] + c * g
        return tuple(out)

    def basis(self, d):
        return [self.gen(j, m) for m in self.ring.monomials(d) for j in range(self.r)]

    def coords(self, a) -> dict:
        e = self._embed(a)
        return {(0, k): c for k, c in e.terms.items()}

    def to_text(self, a) -> str:
        parts = [f"({c.to_text()})*{n}" for c, n in zip(a, self.data.names) if not c.is_zero()]
        return " + ".join(parts) if parts else "0"

    def zero_representatives(self, d):
        return [tuple(m * c for c in s) for s in self.data.syzygies for m in self.ring.monomials(d)]


def elliptic_gauge_data(tau_T=None, tau_Y=None) -> GaugeData:
    """The ideal ``(t, y)`` of the affine elliptic curve with gauge fields

    ``tau(T) = (t^2 + 1) Y`` and ``tau(Y) = (t^3 + t) T``.

    The optional arguments replace these images (used for negative controls).
    """
    A = elliptic()
    t, y = A.gens()
    zero = A.zero()
    tT = (zero, t * t + 1) if tau_T is None else tau_T
    tY = (t ** 3 + t, zero) if tau_Y is None else tau_Y

    def normalize(a):
        # yT -> tY, then (t^2 - 1)T -> yY; the result has T-coefficient of t-degree < 2
        cT, cY = a
        moved = {}
        keep = {}
        for e, c in cT.terms.items():
            (moved if e[1] else keep)[e] = c
        cY = cY + A.from_terms({(e[0] + 1, e[1] - 1): c for e, c in moved.items()})
        cT = A.from_terms(keep)
        q = {}
        r = dict(cT.terms)
        while r and max(e[0] for e in r) >= 2:
            top = max(e[0] for e in r)
            c = r.pop((top, 0))
            q[(top - 2, 0)] = q.get((top - 2, 0), 0) + c
            r[(top - 2, 0)] = r.get((top - 2, 0), 0) + c
            if not r[(top - 2, 0)]:
                r.pop((top - 2, 0))
        cY = cY + A.from_terms(q) * y
        return (A.from_terms(r), cY)

    return GaugeData(
        ring=A, names=("T", "Y"), embed=(t, y),
        syzygies=[(y, -t), (t * t - 1, -y)],
        gauge=[[tT, tY]],
        normalizer=normalize, label="elliptic-gauge")


# ---------------------------------------------------------------- AV-modules

class AVModule:
    """Base class; subclasses fill in the carrier operations and the actions."""

    label = "M"
    free_rank = None

    def zero_representatives(self, d):
        return []

    def sub(self, a, b):
        return self.add(a, self.scale(-1, b))

    def is_zero(self, a) -> bool:
        raise NotImplementedError

    def eq(self, a, b) -> bool:
        return self.is_zero(self.sub(a, b))

    def act_op_word(self, word, m):
        """Apply ring elements and fields right-to-left (``word[-1]`` acts first)."""
        for x in reversed(word):
            m = self.act_field(x, m) if isinstance(x, VecField) else self.act_ring(x, m)
        return m


class TensorModule(AVModule):
    """``P (x) W`` for a D-module handle ``P`` and a jet module ``W``.

    ``f d_i (p (x) w) = (f d_i p) (x) w + sum_{|k| >= 1} (1/k!) d^k(f) p (x) X^k d_{X_i} w``.
    """

    def __init__(self, P, W, drop_derivative: bool = False):
        if isinstance(W, gln.Rep):
            W = JetRep.from_gl(W)
        self.P = P
        self.W = W
        self.ring = P.ring
        n = self.ring.nderivs
        if W.n != n:
            raise ValueError(f"jet module has {W.n} variables, ring has {n} derivations")
        self.dim = W.dim
        self.label = f"T({P.label},{W.label})"
        self.drop_derivative = drop_derivative
        self.tails = [[] for _ in range(n)]
        for g, m in W.mats.items():
            self.tails[g.i].append((g.k, m, Fraction(1, kfact(g.k))))
        for row in self.tails:
            row.sort(key=lambda x: x[0])
        if P.kind == "ring":
            self.free_rank = self.dim

    # carrier
    def zero(self):
        return tuple(self.P.zero() for _ in range(self.dim))

    def add(self, a, b):
        return tuple(self.P.add(x, y) for x, y in zip(a, b))

    def scale(self, c, a):
        return tuple(self.P.scale(c, x) for x in a)

    def is_zero(self, a) -> bool:
        return all(self.P.is_zero(x) for x in a)

    def eq(self, a, b) -> bool:
        return all(self.P.eq(x, y) for x, y in zip(a, b))

    def elem(self, p, w: Sequence) -> tuple:
        """``p (x) w`` for a carrier element ``p`` and a coordinate vector ``w``."""
        return tuple(self.P.scale(c, p) if c else self.P.zero() for c in w)

    def unit(self, a: int, p=None) -> tuple:
        p = self.P.basis(0)[0] if p is None else p
        return self.elem(p, [int(b == a) for b in range(self.dim)])

    def basis(self, d):
        return [self.unit(a, p) for p in self.P.basis(d) for a in range(self.dim)]

    def coords(self, m) -> dict:
        out = {}
        for a, x in enumerate(m):
            for k, c in self.P.coords(x).items():
                out[(a, k)] = c
        return out

    def to_text(self, m) -> str:
        parts = [f"[{self.P.to_text(x)}](x){self.W_label(a)}" for a, x in enumerate(m)
                 if not self._blank(x)]
        return " + ".join(parts) if parts else "0"

    def W_label(self, a):
        rep = self.W.rep
        return rep.labels[a] if rep is not None else f"w{a + 1}"

    def zero_representatives(self, d):
        return [self.elem(z, [int(b == a) for b in range(self.dim)])
                for z in self.P.zero_representatives(d) for a in range(self.dim)]

    # actions
    def _blank(self, x) -> bool:
        # representatives that are zero only modulo syzygies must still be acted on
        if self.P.kind == "gauge":
            return all(c.is_zero() for c in x)
        return self.P.is_zero(x)

    def act_ring(self, f, m):
        return tuple(self.P.act_ring(f, x) for x in m)

    def act_field(self, eta: VecField, m):
        out = [self.P.zero() for _ in range(self.dim)]
        for i, f in enumerate(eta.comps):
            if f.is_zero():
                continue
            if not self.drop_derivative:
                for a, x in enumerate(m):
                    if not self._blank(x):
                        out[a] = self.P.add(out[a], self.P.act_ring(f, self.P.act_d(i, x)))
            for k, mat, w in self.tails[i]:
                df = partial(f, k)
                if df.is_zero():
                    continue
                df = df * w
                for b, x in enumerate(m):
                    if self._blank(x):
                        continue
                    fx = None
                    for a in range(self.dim):
                        c = mat[a, b]
                        if c:
                            if fx is None:
                                fx = self.P.act_ring(df, x)
                            out[a] = self.P.add(out[a], self.P.scale(c, fx))
        return tuple(out)

    # free structure (P is the ring itself)
    def free_basis(self, a):
        return self.unit(a)

    def free_coords(self, m):
        return tuple(m)


class ChargedTwist(AVModule):
    """``rho(sum f_i d_i) p = sum f_i d_i p + lam * (sum d_i f_i) p``."""

    def __init__(self, P, lam, second_order: bool = False):
        self.P = P
        self.lam = Fraction(lam)
        self.ring = P.ring
        self.second_order = second_order      # mutated variant: lam * f'' instead of lam * f'
        self.label = f"charged({P.label},{self.lam})"
        if P.kind == "ring":
            self.free_rank = 1

    def zero(self):
        return self.P.zero()

    def add(self, a, b):
        return self.P.add(a, b)

    def scale(self, c, a):
        return self.P.scale(c, a)

    def is_zero(self, a):
        return self.P.is_zero(a)

    def eq(self, a, b):
        return self.P.eq(a, b)

    def basis(self, d):
        return self.P.basis(d)

    def coords(self, a):
        return self.P.coords(a)

    def to_text(self, a):
        return self.P.to_text(a)

    def zero_representatives(self, d):
        return self.P.zero_representatives(d)

    def act_ring(self, f, m):
        return self.P.act_ring(f, m)

    def act_field(self, eta: VecField, m):
        out = self.P.zero()
        div = self.ring.zero()
        n = self.ring.nderivs
        for i, f in enumerate(eta.comps):
            if f.is_zero():
                continue
            out = self.P.add(out, self.P.act_ring(f, self.P.act_d(i, m)))
            e = tuple((2 if self.second_order else 1) * int(k == i) for k in range(n))
            div = div + partial(f, e)
        if not div.is_zero() and self.lam:
            out = self.P.add(out, self.P.act_ring(div * self.lam, m))
        return out

    def free_basis(self, a):
        return self.ring.one()

    def free_coords(self, m):
        return (m,)


class DualModule(AVModule):
    """``Hom_A(M, A)`` for a free module ``M``: ``(eta phi)(m) = eta(phi(m)) - phi(eta m)``."""

    def __init__(self, M):
        if M.free_rank is None:
            raise NotFree(f"{M.label} is not a finitely generated free module")
        self.M = M
        self.ring = M.ring
        self.free_rank = M.free_rank
        self.label = f"dual({M.label})"

    def zero(self):
        return tuple(self.ring.zero() for _ in range(self.free_rank))

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def scale(self, c, a):
        return tuple(x * c for x in a)

    def is_zero(self, a):
        return all(x.is_zero() for x in a)

    def eq(self, a, b):
        return tuple(a) == tuple(b)

    def free_basis(self, a):
        return tuple(self.ring.one() if b == a else self.ring.zero() for b in range(self.free_rank))

    def free_coords(self, m):
        return tuple(m)

    def basis(self, d):
        return [tuple(p if b == a else self.ring.zero() for b in range(self.free_rank))
                for p in self.ring.monomials(d) for a in range(self.free_rank)]

    def coords(self, m):
        return {(a, x.den, e): c for a, x in enumerate(m) for e, c in x.terms.items()}

    def to_text(self, m):
        parts = [f"[{x.to_text()}]*e{a + 1}^*" for a, x in enumerate(m) if not x.is_zero()]
        return " + ".join(parts) if parts else "0"

    def act_ring(self, f, m):
        return tuple(f * x for x in m)

    def act_field(self, eta, phi):
        out = []
        for b in range(self.free_rank):
            val = eta(phi[b])
            img = self.M.free_coords(self.M.act_field(eta, self.M.free_basis(b)))
            for a, c in enumerate(img):
                if not c.is_zero():
                    val = val - c * phi[a]
            out.append(val)
        return tuple(out)


class TensorProduct(AVModule):
    """``M (x)_A N`` for a free ``N``; elements are tuples of ``M``-elements (one per basis vector of ``N``)."""

    def __init__(self, M, N):
        if N.free_rank is None:
            raise NotFree(f"{N.label} must be free to form the tensor product")
        if M.ring != N.ring:
            raise ValueError("tensor factors over different rings")
        self.M = M
        self.N = N
        self.ring = M.ring
        self.r = N.free_rank
        self.label = f"mtensor({M.label},{N.label})"
        if M.free_rank is not None:
            self.free_rank = M.free_rank * self.r

    def zero(self):
        return tuple(self.M.zero() for _ in range(self.r))

    def add(self, a, b):
        return tuple(self.M.add(x, y) for x, y in zip(a, b))

    def scale(self, c, a):
        return tuple(self.M.scale(c, x) for x in a)

    def is_zero(self, a):
        return all(self.M.is_zero(x) for x in a)

    def eq(self, a, b):
        return all(self.M.eq(x, y) for x, y in zip(a, b))

    def pure(self, m, b: int):
        return tuple(m if c == b else self.M.zero() for c in range(self.r))

    def basis(self, d):
        return [self.pure(m, b) for m in self.M.basis(d) for b in range(self.r)]

    def coords(self, a):
        return {(b, k): c for b, x in enumerate(a) for k, c in self.M.coords(x).items()}

    def to_text(self, a):
        parts = [f"({self.M.to_text(x)})(x)f{b + 1}" for b, x in enumerate(a) if not self.M.is_zero(x)]
        return " + ".join(parts) if parts else "0"

    def zero_representatives(self, d):
        return [self.pure(z, b) for z in self.M.zero_representatives(d) for b in range(self.r)]

    def act_ring(self, f, a):
        return tuple(self.M.act_ring(f, x) for x in a)

    def act_field(self, eta, a):
        out = [self.M.act_field(eta, x) for x in a]
        for b, x in enumerate(a):
            if self.M.is_zero(x):
                continue
            img = self.N.free_coords(self.N.act_field(eta, self.N.free_basis(b)))
            for c, g in enumerate(img):
                if not g.is_zero():
                    out[c] = self.M.add(out[c], self.M.act_ring(g, x))
        return tuple(out)

    # free structure when M is free: index a * r + b for m_a (x) n_b
    def free_basis(self, k):
        a, b = divmod(k, self.r)
        return self.pure(self.M.free_basis(a), b)

    def free_coords(self, m):
        rows = [self.M.free_coords(x) for x in m]
        return tuple(rows[b][a] for a in range(self.M.free_rank) for b in range(self.r))


# ---------------------------------------------------------------- constructors

def tensor_module(P, W) -> TensorModule:
    return TensorModule(P, W)


def gauge_module(data: GaugeData, W=None, check: bool = True) -> TensorModule:
    P = GaugeDModule(data, check=check)
    if W is None:
        W = gln.trivial(data.ring.nderivs)
    return TensorModule(P, W)


def charged_twist(P, lam) -> ChargedTwist:
    return ChargedTwist(P, lam)


def rudakov_module(point: Sequence, W) -> TensorModule:
    n = len(point)
    if isinstance(W, JetRep):
        raise ValueError("rudakov_module takes a gl_n representation")
    return TensorModule(DeltaDModule(point), gln.tensor(W, gln.det(1, n)))


def alpha_module(alpha) -> TensorModule:
    """Rank-2 module on the affine elliptic curve.

    With ``W = jetchain(2, alpha)`` and basis ``v, u`` the action reads
    ``f tau . g v = f tau(g) v + alpha g tau(f) v + g tau(tau(f)) u``, an
    extension of two rank-one gauge-type modules.
    """
    return TensorModule(RingDModule(elliptic()), JetRep.jetchain(2, alpha))


def av_dual(M) -> DualModule:
    return DualModule(M)


def av_tensor(M, N) -> TensorProduct:
    return TensorProduct(M, N)


# ---------------------------------------------------------------- validators

@dataclass
class SmashReport:
    name: str
    passed: bool = True
    checks: int = 0
    witnesses: list = field(default_factory=list)

    def fail(self, msg: str):
        self.passed = False
        if len(self.witnesses) < 5:
            self.witnesses.append(msg)


def sample_fields(ring: RingSpec, d: int) -> list:
    return monomial_fields(ring, d)


def validate_smash(M, d: int, *, fields=None, functions=None, elements=None,
                   max_pairs: int | None = None) -> SmashReport:
    """Check the defining relations of an AV-module on monomial data of degree ``<= d``."""
    ring = M.ring
    fs = functions if functions is not None else ring.monomials(d)
    etas = fields if fields is not None else sample_fields(ring, d)
    elems = elements if elements is not None else M.basis(d)
    rep = SmashReport(M.label)
    one = ring.one()
    for b in elems:
        rep.checks += 1
        if not M.eq(M.act_ring(one, b), b):
            rep.fail(f"unit: 1.{M.to_text(b)} != {M.to_text(b)}")
        for f in fs:
            fb = M.act_ring(f, b)
            for g in fs[:6]:
                rep.checks += 1
                if not M.eq(M.act_ring(g, fb), M.act_ring(g * f, b)):
                    rep.fail(f"associativity: {g} * ({f} * {M.to_text(b)})")
    for eta in etas:
        for b in elems:
            eb = M.act_field(eta, b)
            for f in fs:
                rep.checks += 1
                lhs = M.sub(M.act_field(eta, M.act_ring(f, b)), M.act_ring(f, eb))
                rhs = M.act_ring(eta(f), b)
                if not M.eq(lhs, rhs):
                    rep.fail(f"[rho({eta}), {f}] on {M.to_text(b)}: got {M.to_text(lhs)}, "
                             f"expected {M.to_text(rhs)}")
    pairs = [(a, b) for a in range(len(etas)) for b in range(a + 1, len(etas))]
    if max_pairs is not None:
        pairs = pairs[:max_pairs]
    cache: dict = {}

    def act(ix, b_ix, b):
        key = (ix, b_ix)
        if key not in cache:
            cache[key] = M.act_field(etas[ix], b)
        return cache[key]

    for bi, b in enumerate(elems):
        for a, c in pairs:
            rep.checks += 1
            lhs = M.sub(M.act_field(etas[a], act(c, bi, b)), M.act_field(etas[c], act(a, bi, b)))
            rhs = M.act_field(bracket(etas[a], etas[c]), b)
            if not M.eq(lhs, rhs):
                rep.fail(f"[rho({etas[a]}), rho({etas[c]})] != rho([..]) on {M.to_text(b)}: "
                         f"{M.to_text(lhs)} vs {M.to_text(rhs)}")
    for z in M.zero_representatives(d):
        for eta in etas:
            rep.checks += 1
            val = M.act_field(eta, z)
            if not M.is_zero(val):
                rep.fail(f"rho({eta}) sends the zero element {M.to_text(z)} to {M.to_text(val)}")
    return rep


@dataclass(frozen=True)
class Unknown:
    n_max: int

    def __str__(self):
        return f"unknown(>{self.n_max})"


def _param_power(ring: RingSpec, p: tuple) -> RingElem:
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


def monomial_jet_operator(M, p: tuple, i: int, m):
    """``sum_{k <= p} (-1)^{|k|} C(p, k) x^{p-k} rho(x^k d_i)`` applied to ``m``."""
    ring = M.ring
    acc = M.zero()
    for k in _below(p):
        c = 1
        for a, b in zip(p, k):
            c *= comb(a, b)
        if sum(k) % 2:
            c = -c
        eta = VecField.basis(ring, i, _param_power(ring, k))
        rest = tuple(a - b for a, b in zip(p, k))
        term = M.act_ring(_param_power(ring, rest), M.act_field(eta, m))
        acc = M.add(acc, M.scale(c, term))
    return acc


def _multi(n: int, total: int) -> list:
    from .rings import _exps_upto
    return [e for e in _exps_upto(n, total) if sum(e) == total]


def differentiable_by_params(M, N: int, d: int) -> bool:
    ring = M.ring
    n = ring.nderivs
    elems = M.basis(d)
    for total in (N, N + 1):
        for p in _multi(n, total):
            for i in range(n):
                for m in elems:
                    if not M.is_zero(monomial_jet_operator(M, p, i, m)):
                        return False
    return True


def polarized_operator(M, fs: Sequence, i: int, h: RingElem, m):
    """``(ad f_1) ... (ad f_N) S_i`` at ``h`` applied to ``m``, where ``S_i(h) = rho(h d_i)``.

    ``(ad f) S (h) = f S(h) - S(f h)``.
    """
    ring = M.ring

    def rec(k: int, h, m):
        if k == len(fs):
            return M.act_field(VecField.basis(ring, i, h), m)
        f = fs[k]
        return M.sub(M.act_ring(f, rec(k + 1, h, m)), rec(k + 1, f * h, m))

    return rec(0, h, m)


def differentiable_by_generators(M, N: int, d: int) -> bool:
    ring = M.ring
    gens = ring.gens()
    elems = M.basis(d)
    hs = ring.monomials(d)
    for fs in combinations_with_replacement(gens, N):
        for i in range(ring.nderivs):
            for h in hs:
                for m in elems:
                    if not M.is_zero(polarized_operator(M, fs, i, h, m)):
                        return False
    return True


def minimal_differentiability(M, n_max: int, d: int, route: str = "auto"):
    """Least ``N <= n_max`` for which ``M`` is ``N``-differentiable up to degree ``d``.

    With uniformizing parameters the monomial jet operators with
    ``|p| = N, N + 1`` are tested; otherwise the polarized form of the
    definition is tested on ring generators.  Returns :class:`Unknown` if no
    ``N`` up to ``n_max`` passes.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if route == "auto":
        route = "params" if M.ring.params is not None else "generators"
    test = differentiable_by_params if route == "params" else differentiable_by_generators
    for N in range(1, n_max + 1):
        if test(M, N, d):
            return N
    return Unknown(n_max)


# ---------------------------------------------------------------- localization

class LocalizedModule(AVModule):
    """``M_f`` for an ``N``-differentiable ``M``; elements are pairs ``(m, j)`` meaning ``m / f^j``."""

    def __init__(self, M, f: RingElem, N: int | None = None, n_max: int = 4, d: int = 4):
        if N is None:
            N = minimal_differentiability(M, n_max, d)
            if isinstance(N, Unknown):
                raise UnknownDifferentiability(f"{M.label}: no differentiability order up to {n_max}")
        self.M = M
        self.f = f
        self.N = N
        self.ring = localized(M.ring, f)
        self.label = f"{M.label}_[{f}]"

    def _lift(self, a, e: int):
        """Multiply the numerator by ``f^e``."""
        m, j = a
        return (self.M.act_ring(self.f ** e, m), j + e) if e else a

    def zero(self):
        return (self.M.zero(), 0)

    def add(self, a, b):
        j = max(a[1], b[1])
        a, b = self._lift(a, j - a[1]), self._lift(b, j - b[1])
        return (self.M.add(a[0], b[0]), j)

    def scale(self, c, a):
        return (self.M.scale(c, a[0]), a[1])

    def is_zero(self, a):
        return self.M.is_zero(a[0])

    def eq(self, a, b):
        return self.is_zero(self.sub(a, b))

    def basis(self, d):
        return [(m, j) for j in range(2) for m in self.M.basis(d)]

    def to_text(self, a):
        m, j = a
        return self.M.to_text(m) if j == 0 else f"({self.M.to_text(m)})/({self.f})^{j}"

    def act_ring(self, g, a):
        g = self.ring.coerce(g)
        return (self.M.act_ring(g.num, a[0]), a[1] + g.den)

    def act_field(self, eta, a):
        return localized_action(self.M, self.f, eta, a[0], a[1], self.N)


def localized_action(M, f: RingElem, eta: VecField, m0, j: int = 0, N: int | None = None):
    """Action of a field over ``A_f`` on ``m / f^j`` for an ``N``-differentiable ``M``.

    With ``u = f^k`` a common denominator of the components ``h_i / u``,
    ``rho(h/u d_i) = sum_{l=1}^{N} (-1)^{l+1} C(N, l) u^{-l} rho(u^{l-1} h d_i)``,
    and ``rho(eta)(m / f^j) = f^{-j} rho(eta) m - j f^{-j-1} eta(f) m``.
    Returns ``(m', j')`` meaning ``m' / f^{j'}``.
    """
    if N is None:
        N = minimal_differentiability(M, 4, 4)
        if isinstance(N, Unknown):
            raise UnknownDifferentiability(f"{M.label}: no differentiability order up to 4")
    base = M.ring
    Af = localized(base, f)
    comps = [Af.coerce(c) for c in eta.comps]
    k = max((c.den for c in comps), default=0)
    fpow = [base.one()]
    for _ in range(k * N + j + 1):
        fpow.append(fpow[-1] * f)
    # terms: list of (exponent e, M-element) meaning f^{-e} m
    terms = []
    for i, c in enumerate(comps):
        if c.is_zero():
            continue
        h = c.num * fpow[k - c.den]
        u = fpow[k]
        for l in range(1, N + 1):
            coef = comb(N, l) * (1 if l % 2 else -1)
            field_l = VecField.basis(base, i, (u ** (l - 1)) * h)
            terms.append((k * l + j, M.scale(coef, M.act_field(field_l, m0))))
    if j:
        # eta(f) = (sum_i h_i d_i f) / f^k
        ef = base.zero()
        for i, c in enumerate(comps):
            if not c.is_zero():
                ef = ef + c.num * fpow[k - c.den] * partial(f, tuple(int(q == i) for q in range(base.nderivs)))
        terms.append((j + 1 + k, M.scale(-j, M.act_ring(ef, m0))))
    if not terms:
        return (M.zero(), j)
    top = max(e for e, _ in terms)
    acc = M.zero()
    for e, m in terms:
        acc = M.add(acc, M.act_ring(f ** (top - e), m) if top > e else m)
    return (acc, top)
