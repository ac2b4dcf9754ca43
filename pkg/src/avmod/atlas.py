"""Two-chart atlases and the transformation laws between their charts.

Each atlas lists its charts with their coordinate rings, and for each chart
the ring of the overlap written in that chart's own coordinates.  The
transition ``sigma[a, b]`` sends the generators of the overlap ring of chart
``a`` to elements of the overlap ring of chart ``b``, so ``x_i = G_i(y)``
reads ``G_i = sigma[a, b](x_i)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from . import gln
from .gln import NotIntegrable
from .jets import JetGen, gl_gen
from .modules import AVModule, ChargedTwist, RingDModule, TensorModule
from .rings import (RingElem, RingSpec, circle_chart, circle_overlap, elliptic, laurent,
                    multi_indices, partial, poly, substitute, taylor_shift, inverse)
from .jets import generators
from .weyl import DiffOp, VecField, bracket, commutator, monomial_fields


class NoOverlap(ValueError):
    pass


@dataclass
class Chart:
    name: str
    ring: RingSpec
    params: tuple


@dataclass
class Atlas:
    name: str
    charts: list
    overlap: dict = field(default_factory=dict)     # chart index -> overlap ring
    sigma: dict = field(default_factory=dict)       # (a, b) -> images of overlap generators

    def __post_init__(self):
        for (a, b) in list(self.sigma):
            if (b, a) not in self.sigma:
                raise ValueError("transitions must be given in both directions")
            Oa = self.overlap[a]
            for g in Oa.gens():
                back = self.map(b, a, self.map(a, b, g))
                if back != g:
                    raise ValueError(f"{self.name}: transition {a}->{b}->{a} moves {g} to {back}")
            for p in Oa.params:
                if self.map(b, a, self.map(a, b, p)) != p:
                    raise ValueError(f"{self.name}: G(H(x)) != x")

    @property
    def n(self) -> int:
        return self.charts[0].ring.nderivs

    def check_pair(self, a: int, b: int):
        if (a, b) not in self.sigma:
            raise NoOverlap(f"{self.name}: charts {a} and {b} do not overlap")

    def restrict(self, a: int, f: RingElem) -> RingElem:
        """Image of a chart function in the overlap ring of chart ``a``."""
        O = self.overlap[a]
        if f.spec == O:
            return f
        return substitute(f, O.gens(), O)

    def map(self, a: int, b: int, f: RingElem) -> RingElem:
        if a == b:
            return self.restrict(a, f)
        self.check_pair(a, b)
        return substitute(self.restrict(a, f), self.sigma[(a, b)], self.overlap[b])

    def params(self, a: int) -> tuple:
        return self.overlap[a].params


def _p1() -> Atlas:
    X, Y = poly("x"), poly("y")
    Lx, Ly = laurent("x"), laurent("y")
    (x,), (y,) = Lx.gens(), Ly.gens()
    return Atlas("p1", [Chart("U0", X, ("x",)), Chart("U1", Y, ("y",))],
                 overlap={0: Lx, 1: Ly},
                 sigma={(0, 1): [inverse(y)], (1, 0): [inverse(x)]})


def _gm() -> Atlas:
    Lt, Ls = laurent("t"), laurent("s")
    (t,), (s,) = Lt.gens(), Ls.gens()
    return Atlas("gm", [Chart("t", Lt, ("t",)), Chart("s", Ls, ("s",))],
                 overlap={0: Lt, 1: Ls},
                 sigma={(0, 1): [inverse(s)], (1, 0): [inverse(t)]})


def _circle() -> Atlas:
    A, B = circle_chart("x"), circle_chart("y")
    Oa, Ob = circle_overlap("x"), circle_overlap("y")
    return Atlas("circle", [Chart("D(y)", A, ("x",)), Chart("D(x)", B, ("y",))],
                 overlap={0: Oa, 1: Ob},
                 sigma={(0, 1): Ob.gens(), (1, 0): Oa.gens()})


def _a2_shear() -> Atlas:
    X, Y = poly("x1", "x2"), poly("y1", "y2")
    x1, x2 = X.gens()
    y1, y2 = Y.gens()
    return Atlas("a2-shear", [Chart("x", X, ("x1", "x2")), Chart("y", Y, ("y1", "y2"))],
                 overlap={0: X, 1: Y},
                 sigma={(0, 1): [y1, y2 - y1 * y1], (1, 0): [x1, x2 + x1 * x1]})


def _elliptic_affine() -> Atlas:
    A = elliptic()
    return Atlas("elliptic-affine", [Chart("affine", A, ())], overlap={0: A})


_BUILDERS = {"p1": _p1, "gm": _gm, "circle": _circle, "a2-shear": _a2_shear,
             "elliptic-affine": _elliptic_affine}
_CACHE: dict = {}


def get_atlas(name: str) -> Atlas:
    if name not in _BUILDERS:
        raise KeyError(f"unknown atlas {name!r}; choose from {', '.join(_BUILDERS)}")
    if name not in _CACHE:
        _CACHE[name] = _BUILDERS[name]()
    return _CACHE[name]


ATLAS_NAMES = tuple(_BUILDERS)


# ---------------------------------------------------------------- Jacobians

def _unit(n, i):
    return tuple(int(k == i) for k in range(n))


def jacobian(atlas: Atlas, a: int, b: int) -> list:
    """``J[i][j] = dx_i / dy_j`` over the overlap, in chart ``b``'s ring."""
    atlas.check_pair(a, b)
    n = atlas.n
    G = [atlas.map(a, b, p) for p in atlas.params(a)]
    return [[partial(G[i], _unit(n, j)) for j in range(n)] for i in range(n)]


def inverse_jacobian(atlas: Atlas, a: int, b: int) -> list:
    """``K[j][i] = dy_j / dx_i`` written in chart ``b``'s ring."""
    J = jacobian(atlas, b, a)     # dy_j/dx_i in chart a
    return [[atlas.map(a, b, c) for c in row] for row in J]


def pushforward(atlas: Atlas, a: int, b: int, eta: VecField) -> VecField:
    """A field over chart ``a`` rewritten in chart ``b``: ``d_{x_i} = sum_j (dy_j/dx_i) d_{y_j}``."""
    K = inverse_jacobian(atlas, a, b)
    Ob = atlas.overlap[b]
    comps = [atlas.map(a, b, atlas.restrict(a, c)) for c in eta.comps]
    out = [Ob.zero() for _ in range(atlas.n)]
    for i, c in enumerate(comps):
        for j in range(atlas.n):
            out[j] = out[j] + c * K[j][i]
    return VecField(Ob, out)


# ---------------------------------------------------------------- sections

@dataclass
class TransitionRule:
    kind: str          # section, tensor, det, charged, jet
    rep: object = None
    lam: Fraction = Fraction(0)
    s: int = 0
    label: str = ""


def rule_for(atlas: Atlas, text: str) -> TransitionRule:
    """Parse ``section``, ``tensor:<rep>``, ``det:<lam>``, ``charged:<lam>``, ``jet:<s>``."""
    kind, _, arg = text.partition(":")
    if kind == "section":
        return TransitionRule("section", label=text)
    if kind == "tensor":
        return TransitionRule("tensor", rep=gln.rep_build(arg), label=text)
    if kind == "det":
        lam = Fraction(arg)
        return TransitionRule("det", rep=gln.det(lam, atlas.n), lam=lam, label=text)
    if kind == "charged":
        return TransitionRule("charged", lam=Fraction(arg), label=text)
    if kind == "jet":
        return TransitionRule("jet", s=int(arg), label=text)
    raise ValueError(f"unknown transition rule {text!r}")


def section_matrix(atlas: Atlas, rep, a: int, b: int) -> list:
    """Matrix of the group action on fibres from chart ``a`` to chart ``b``.

    The group element is the transpose of ``dx/dy``: with ``X_j d/dX_i -> E_ji``
    the natural module transforms like the differentials ``dx_i``.
    """
    if not rep.integrable:
        raise NotIntegrable(f"{rep.label} is not integrable; it does not glue across charts")
    J = jacobian(atlas, a, b)
    Jt = [list(col) for col in zip(*J)]
    return gln.group_action(rep, Jt)


def transform_section(atlas: Atlas, rep, a: int, b: int, sec) -> tuple:
    """``g w -> sigma(g) rho(J) w`` for a section given as coefficient tuple over chart ``a``."""
    M = section_matrix(atlas, rep, a, b)
    g = [atlas.map(a, b, atlas.restrict(a, c)) for c in sec]
    Ob = atlas.overlap[b]
    out = []
    for r in range(len(M)):
        acc = Ob.zero()
        for c in range(len(g)):
            if not g[c].is_zero():
                acc = acc + M[r][c] * g[c]
        out.append(acc)
    return tuple(out)


# ---------------------------------------------------------------- charged operators

def transform_operator_charged(atlas: Atlas, lam, a: int, b: int, op) -> DiffOp:
    """Rewrite an operator of order at most one on a ``lam``-charged module in chart ``b``.

    ``f d_{x_i} -> sum_j f (dy_j/dx_i) d_{y_j}
                  + lam f sum_{j,k} (d^2 y_j / dx_k dx_i) (dx_k / dy_j)``.
    """
    lam = Fraction(lam)
    atlas.check_pair(a, b)
    n = atlas.n
    Oa, Ob = atlas.overlap[a], atlas.overlap[b]
    if isinstance(op, VecField):
        op = op.as_op()
    if op.order() > 1:
        raise ValueError("only operators of order at most one transform by this law")
    H = [atlas.map(b, a, p) for p in atlas.params(b)]          # y_j as functions of x
    J = jacobian(atlas, a, b)                                   # dx_k/dy_j in chart b
    K = inverse_jacobian(atlas, a, b)                           # dy_j/dx_i in chart b
    out = DiffOp(Ob)
    for m, c in op.terms.items():
        f = atlas.map(a, b, atlas.restrict(a, c))
        if sum(m) == 0:
            out = out + DiffOp.mult(f)
            continue
        i = m.index(1)
        comps = [f * K[j][i] for j in range(n)]
        out = out + VecField(Ob, comps).as_op()
        corr = Ob.zero()
        for j in range(n):
            for k in range(n):
                second = partial(H[j], tuple(x + y for x, y in zip(_unit(n, k), _unit(n, i))))
                corr = corr + atlas.map(a, b, second) * J[k][j]
        if lam and not corr.is_zero():
            out = out + DiffOp.mult(f * corr * lam)
    return out


class PushedModule(AVModule):
    """An AV-module on chart ``a`` viewed through the coordinates of chart ``b``.

    Elements stay in the original module's representation; functions and
    fields written in chart ``b`` are transported back before acting.
    """

    def __init__(self, atlas: Atlas, M, a: int, b: int):
        atlas.check_pair(a, b)
        self.atlas, self.M, self.a, self.b = atlas, M, a, b
        self.ring = atlas.overlap[b]
        self.label = f"{M.label}@{atlas.charts[b].name}"

    def zero(self):
        return self.M.zero()

    def add(self, x, y):
        return self.M.add(x, y)

    def scale(self, c, x):
        return self.M.scale(c, x)

    def is_zero(self, x):
        return self.M.is_zero(x)

    def eq(self, x, y):
        return self.M.eq(x, y)

    def to_text(self, x):
        return self.M.to_text(x)

    def basis(self, d):
        return self.M.basis(d)

    def pull(self, f: RingElem) -> RingElem:
        return self.atlas.map(self.b, self.a, f)

    def act_ring(self, f, m):
        return self.M.act_ring(self.pull(self.ring.coerce(f)), m)

    def act_field(self, eta, m):
        return self.M.act_field(pushforward(self.atlas, self.b, self.a, eta), m)


# ---------------------------------------------------------------- jets

def _series_mul(a: dict, b: dict, D: int, zero) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            if sum(e) > D:
                continue
            v = out[e] + ca * cb if e in out else ca * cb
            out[e] = v
    return {e: c for e, c in out.items() if not c.is_zero()}


def _series_compose(coeffs: dict, deltas: list, D: int, ring: RingSpec) -> dict:
    """``sum_k c_k prod_j delta_j^{k_j}`` truncated at total degree ``D``."""
    n = len(deltas)
    powers = [[{(0,) * n: ring.one()}] for _ in range(n)]
    out: dict = {}
    for k, c in coeffs.items():
        term = {(0,) * n: c}
        for j, a in enumerate(k):
            while len(powers[j]) <= a:
                powers[j].append(_series_mul(powers[j][-1], deltas[j], D, ring.zero()))
            if a:
                term = _series_mul(term, powers[j][a], D, ring.zero())
        for e, x in term.items():
            out[e] = out[e] + x if e in out else x
    return {e: c for e, c in out.items() if not c.is_zero()}


def transform_jet(atlas: Atlas, a: int, b: int, elem: dict, s: int) -> dict:
    """Rewrite a jet element ``sum c_g g`` (``g = X^k d_{X_p}``) in chart ``b``.

    ``g(X) d_{X_p} -> sum_q g(G(y+Y) - G(y)) (dH_q/dx_p)(G(y+Y)) d_{Y_q}``,
    truncated at total ``Y``-degree ``s + 1``.
    """
    atlas.check_pair(a, b)
    n = atlas.n
    D = s + 1
    Ob = atlas.overlap[b]
    G = [atlas.map(a, b, p) for p in atlas.params(a)]
    H = [atlas.map(b, a, p) for p in atlas.params(b)]
    deltas = []
    for g in G:
        t = dict(taylor_shift(g, D))
        t.pop((0,) * n, None)
        deltas.append(t)
    out: dict = {}
    for jg, c in elem.items():
        if jg.degree > s:
            continue
        coef = atlas.map(a, b, c) if isinstance(c, RingElem) else Ob.const(c)
        gpart = _series_compose({jg.k: Ob.one()}, deltas, D, Ob)
        for q in range(n):
            h = partial(H[q], _unit(n, jg.i))
            ht = {k: atlas.map(a, b, v) for k, v in taylor_shift(h, D).items()}
            hser = _series_compose(ht, deltas, D, Ob)
            prod = _series_mul(gpart, hser, D, Ob.zero())
            for e, x in prod.items():
                key = JetGen(e, q)
                v = coef * x
                out[key] = out[key] + v if key in out else v
    return {g: c for g, c in out.items() if not c.is_zero() and g.degree <= s}


def jet_degree_zero_conjugation(atlas: Atlas, a: int, b: int, j: int, i: int) -> dict:
    """``E_ji = X_j d_{X_i} -> sum_{c,d} J_jd K_ci E_dc`` as a jet element."""
    J = jacobian(atlas, a, b)
    K = inverse_jacobian(atlas, a, b)
    n = atlas.n
    out = {}
    for c in range(n):
        for d in range(n):
            v = J[j][d] * K[c][i]
            if not v.is_zero():
                out[gl_gen(d, c, n)] = v
    return out


# ---------------------------------------------------------------- Casimir invariance

def transform_E(atlas: Atlas, a: int, b: int, i: int, j: int, drop_inverse: bool = False) -> dict:
    """``E_ij -> sum_{a,b} (dy_a/dx_j)(dx_i/dy_b) E_ba``; returns {(b, a): coefficient}."""
    J = jacobian(atlas, a, b)
    K = inverse_jacobian(atlas, a, b)
    n = atlas.n
    Ob = atlas.overlap[b]
    out = {}
    for p in range(n):
        for q in range(n):
            v = J[i][q] if drop_inverse else K[p][j] * J[i][q]
            if not v.is_zero():
                out[(q, p)] = v
    return out


def casimir_words(n: int, k: int, ring: RingSpec) -> dict:
    out = {}
    for idx in product(range(n), repeat=k):
        word = tuple((idx[m], idx[(m + 1) % k]) for m in range(k))
        out[word] = out[word] + 1 if word in out else ring.one()
    return out


def casimir_invariance_check(atlas: Atlas, a: int, b: int, k: int, drop_inverse: bool = False) -> bool:
    """Transform ``1 (x) Omega_k`` letter by letter and compare with ``1 (x) Omega_k``.

    The comparison is made in the free algebra on the ``E_ij``, which is
    stronger than comparing in the enveloping algebra.
    """
    n = atlas.n
    Ob = atlas.overlap[b]
    images = {(i, j): transform_E(atlas, a, b, i, j, drop_inverse) for i in range(n) for j in range(n)}
    total: dict = {}
    for word, c in casimir_words(n, k, Ob).items():
        cur = {(): c}
        for letter in word:
            nxt = {}
            for w, x in cur.items():
                for e, y in images[letter].items():
                    key = w + (e,)
                    nxt[key] = nxt[key] + x * y if key in nxt else x * y
            cur = nxt
        for w, x in cur.items():
            total[w] = total[w] + x if w in total else x
    total = {w: c for w, c in total.items() if not c.is_zero()}
    return total == casimir_words(n, k, Ob)


# ---------------------------------------------------------------- glue checks

@dataclass
class GlueReport:
    atlas: str
    rule: str
    passed: bool = True
    entries: list = field(default_factory=list)

    def record(self, check: str, ok: bool, witness: str = ""):
        self.entries.append({"check": check, "status": "pass" if ok else "fail", "witness": witness})
        if not ok:
            self.passed = False


def gm_intertwiner_exponents(lam, window=range(-4, 5), kl: int = 3) -> list:
    """Exponents ``c`` for which ``s^l v_2 -> s^{l+c} v_1`` intertwines the two charged modules on G_m.

    ``v_1``: ``charged(Q[t^+-1], lam)`` seen in the ``s = 1/t`` chart;
    ``v_2``: ``charged(Q[s^+-1], lam)`` built directly on the ``s`` chart.
    """
    atlas = get_atlas("gm")
    Lt, Ls = atlas.overlap[0], atlas.overlap[1]
    pushed = PushedModule(atlas, ChargedTwist(RingDModule(Lt), lam), 0, 1)
    native = ChargedTwist(RingDModule(Ls), lam)
    (s,) = Ls.gens()
    good = []
    for c in window:
        ok = True
        for k in range(-kl, kl + 1):
            eta = VecField.basis(Ls, 0, s ** k)
            for l in range(-kl, kl + 1):
                lhs = atlas.map(1, 0, s ** c * native.act_field(eta, s ** l))
                rhs = pushed.act_field(eta, atlas.map(1, 0, s ** (l + c)))
                if lhs != rhs:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            good.append(c)
    return good


def glue_check(atlas: Atlas, rule: TransitionRule, bound: int = 3) -> GlueReport:
    rep = GlueReport(atlas.name, rule.label)
    pairs = [p for p in atlas.sigma]
    if not pairs:
        rep.record("overlap", True, "single chart: no transitions to check")
        return rep
    for a, b in pairs:
        Oa = atlas.overlap[a]
        mons = Oa.monomials(bound)
        if rule.kind == "section":
            for f in mons:
                back = atlas.map(b, a, atlas.map(a, b, f))
                if back != f:
                    rep.record(f"roundtrip {a}->{b}", False, f"{f} -> {back}")
                    break
            else:
                rep.record(f"roundtrip {a}->{b}", True)
        elif rule.kind in ("tensor", "det"):
            W = rule.rep
            try:
                Mab = section_matrix(atlas, W, a, b)
            except NotIntegrable as e:
                rep.record(f"integrable {a}->{b}", False, str(e))
                return rep
            ok = True
            for f in mons:
                for c in range(W.dim):
                    sec = tuple(f if r == c else Oa.zero() for r in range(W.dim))
                    there = transform_section(atlas, W, a, b, sec)
                    back = transform_section(atlas, W, b, a, there)
                    if back != sec:
                        ok = False
                        rep.record(f"roundtrip {a}->{b}", False, f"{sec} -> {back}")
                        break
                if not ok:
                    break
            if ok:
                rep.record(f"roundtrip {a}->{b}", True)
            Ma = TensorModule(RingDModule(Oa), W)
            Mb = TensorModule(RingDModule(atlas.overlap[b]), W)
            ok = True
            for eta in monomial_fields(Oa, min(bound, 2)):
                for f in Oa.monomials(min(bound, 2)):
                    for c in range(W.dim):
                        sec = Ma.unit(c, f)
                        lhs = transform_section(atlas, W, a, b, Ma.act_field(eta, sec))
                        rhs = Mb.act_field(pushforward(atlas, a, b, eta), transform_section(atlas, W, a, b, sec))
                        if not Mb.eq(lhs, rhs):
                            ok = False
                            rep.record(f"act/transform {a}->{b}", False,
                                       f"field {eta} on {Ma.to_text(sec)}")
                            break
                    if not ok:
                        break
                if not ok:
                    break
            if ok:
                rep.record(f"act/transform {a}->{b}", True)
        elif rule.kind == "charged":
            ok = True
            for eta in monomial_fields(Oa, bound):
                there = transform_operator_charged(atlas, rule.lam, a, b, eta)
                back = transform_operator_charged(atlas, rule.lam, b, a, there)
                if back != eta.as_op():
                    ok = False
                    rep.record(f"roundtrip {a}->{b}", False, f"{eta} -> {back}")
                    break
            if ok:
                rep.record(f"roundtrip {a}->{b}", True)
            fields = monomial_fields(Oa, min(bound, 2))
            ok = True
            for e1 in fields:
                for e2 in fields:
                    lhs = transform_operator_charged(atlas, rule.lam, a, b, bracket(e1, e2))
                    t1 = transform_operator_charged(atlas, rule.lam, a, b, e1)
                    t2 = transform_operator_charged(atlas, rule.lam, a, b, e2)
                    if commutator(t1, t2) != lhs:
                        ok = False
                        rep.record(f"brackets {a}->{b}", False, f"[{e1}, {e2}]")
                        break
                if not ok:
                    break
            if ok:
                rep.record(f"brackets {a}->{b}", True)
        elif rule.kind == "jet":
            ok = True
            for g in generators(atlas.n, rule.s):
                there = transform_jet(atlas, a, b, {g: Fraction(1)}, rule.s)
                back = transform_jet(atlas, b, a, there, rule.s)
                if back != {g: Oa.one()}:
                    ok = False
                    rep.record(f"roundtrip {a}->{b}", False, f"{g} -> {back}")
                    break
            if ok:
                rep.record(f"roundtrip {a}->{b}", True)
    if rule.kind == "charged" and atlas.name == "gm":
        good = gm_intertwiner_exponents(rule.lam)
        rep.record("intertwiner s^c, c in -4..4", bool(good),
                   f"c = {good}" if good else "no exponent matches")
    return rep



def gm_reparam_failures(lam, kl: int = 3) -> list:
    """Pairs ``(k, l)`` where ``(s^k d_s) s^l v != (l + (k - 2) lam) s^{k+l-1} v`` fails.

    ``v`` is the generator of ``charged(Q[t^+-1], lam)`` read in the ``s = 1/t`` chart.
    """
    atlas = get_atlas("gm")
    Lt, Ls = atlas.overlap[0], atlas.overlap[1]
    pushed = PushedModule(atlas, ChargedTwist(RingDModule(Lt), lam), 0, 1)
    (s,) = Ls.gens()
    bad = []
    for k in range(-kl, kl + 1):
        eta = VecField.basis(Ls, 0, s ** k)
        for l in range(-kl, kl + 1):
            got = pushed.act_field(eta, atlas.map(1, 0, s ** l))
            want = atlas.map(1, 0, (l + (k - 2) * lam) * s ** (k + l - 1))
            if got != want:
                bad.append((k, l))
    return bad
