"""Finite-dimensional gl_n representations, Casimir elements and central characters.

A :class:`Rep` stores the matrices of the elementary matrices ``E_ij``
(0-based indices internally) acting on a fixed basis.  Each rep also
remembers how it was built, so that the matching group action on
invertible matrices (used for chart gluing) can be evaluated exactly.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product

import numpy as np

from . import linalg
from .expr import Call, ParseError, as_int, need, parse


class InvalidWeight(ValueError):
    pass


class NotScalar(ValueError):
    pass


class NotIntegrable(ValueError):
    pass


class Rep:
    def __init__(self, n: int, mats: dict, labels: list, label: str, *,
                 builder=None, weight=None, integrable: bool = True, check: bool = True):
        self.n = n
        self.mats = mats
        self.labels = list(labels)
        self.dim = len(self.labels)
        self.label = label
        self.builder = builder       # (kind, payload) for the group action
        self.weight = weight
        self.integrable = integrable
        if check:
            check_commutation(self)

    def E(self, i: int, j: int) -> np.ndarray:
        return self.mats[(i, j)]

    def __repr__(self):
        return f"Rep({self.label}, dim={self.dim})"


def check_commutation(rep: Rep) -> None:
    """``[E_ij, E_kl] = d_jk E_il - d_li E_kj`` for all index quadruples."""
    n = rep.n
    for i, j, k, l in product(range(n), repeat=4):
        lhs = rep.E(i, j) @ rep.E(k, l) - rep.E(k, l) @ rep.E(i, j)
        rhs = linalg.zeros(rep.dim)
        if j == k:
            rhs = rhs + rep.E(i, l)
        if l == i:
            rhs = rhs - rep.E(k, j)
        if not (lhs == rhs).all():
            raise ValueError(f"{rep.label}: commutation fails for E{i + 1}{j + 1}, E{k + 1}{l + 1}")


# ---------------------------------------------------------------- constructions

def natural(n: int) -> Rep:
    mats = {}
    for i in range(n):
        for j in range(n):
            m = linalg.zeros(n)
            m[i, j] = Fraction(1)
            mats[(i, j)] = m
    return Rep(n, mats, [f"e{i + 1}" for i in range(n)], f"natural({n})",
               builder=("natural", None), weight=[1] + [0] * (n - 1))


def trivial(n: int) -> Rep:
    mats = {(i, j): linalg.zeros(1) for i in range(n) for j in range(n)}
    return Rep(n, mats, ["1"], f"trivial({n})", builder=("trivial", None), weight=[0] * n)


def dual(r: Rep) -> Rep:
    mats = {(i, j): -r.E(i, j).T.copy() for i in range(r.n) for j in range(r.n)}
    w = None if r.weight is None else [-x for x in reversed(r.weight)]
    return Rep(r.n, mats, [f"{b}*" for b in r.labels], f"dual({r.label})",
               builder=("dual", r), weight=w, integrable=r.integrable)


def _wedge_apply(S: tuple, i: int, j: int):
    """``E_ij`` on ``e_S``: returns (sign, T) or None."""
    if j not in S:
        return None
    if i != j and i in S:
        return None
    T = [i if x == j else x for x in S]
    # sort T, counting transpositions
    sign = 1
    T = list(T)
    for a in range(len(T)):
        for b in range(len(T) - 1 - a):
            if T[b] > T[b + 1]:
                T[b], T[b + 1] = T[b + 1], T[b]
                sign = -sign
    return sign, tuple(T)


def ext(k: int, n: int) -> Rep:
    if not 0 <= k <= n:
        raise ValueError("ext(k, n) needs 0 <= k <= n")
    basis = list(combinations(range(n), k))
    index = {S: a for a, S in enumerate(basis)}
    mats = {}
    for i in range(n):
        for j in range(n):
            m = linalg.zeros(len(basis))
            for S in basis:
                r = _wedge_apply(S, i, j)
                if r:
                    m[index[r[1]], index[S]] += r[0]
            mats[(i, j)] = m
    labels = ["^".join(f"e{x + 1}" for x in S) or "1" for S in basis]
    return Rep(n, mats, labels, f"ext({k},{n})", builder=("ext", k),
               weight=[1] * k + [0] * (n - k))


def sym_basis(k: int, n: int) -> list:
    out = [e for e in product(range(k + 1), repeat=n) if sum(e) == k]
    return sorted(out, reverse=True)


def sym(k: int, n: int) -> Rep:
    basis = sym_basis(k, n)
    index = {e: a for a, e in enumerate(basis)}
    mats = {}
    for i in range(n):
        for j in range(n):
            m = linalg.zeros(len(basis))
            for e in basis:
                if e[j] == 0:
                    continue
                f = list(e)
                f[j] -= 1
                f[i] += 1
                m[index[tuple(f)], index[e]] += e[j]
            mats[(i, j)] = m
    labels = ["*".join(f"x{i + 1}^{a}" if a > 1 else f"x{i + 1}" for i, a in enumerate(e) if a) or "1"
              for e in basis]
    return Rep(n, mats, labels, f"sym({k},{n})", builder=("sym", k),
               weight=[k] + [0] * (n - 1))


def det(lam, n: int = 1) -> Rep:
    """The one-dimensional module ``T v = lam tr(T) v``."""
    lam = Fraction(lam)
    mats = {(i, j): linalg.as_matrix([[lam if i == j else 0]]) for i in range(n) for j in range(n)}
    return Rep(n, mats, ["v"], f"det({lam},{n})", builder=("det", lam),
               weight=[lam] * n, integrable=lam.denominator == 1)


def tensor(a: Rep, b: Rep) -> Rep:
    if a.n != b.n:
        raise ValueError("tensor factors must have the same n")
    ia, ib = linalg.eye(a.dim), linalg.eye(b.dim)
    mats = {key: linalg.kron(a.mats[key], ib) + linalg.kron(ia, b.mats[key]) for key in a.mats}
    labels = [f"{x}(x){y}" for x in a.labels for y in b.labels]
    w = None
    if a.weight is not None and b.weight is not None:
        w = [x + y for x, y in zip(a.weight, b.weight)]
    return Rep(a.n, mats, labels, f"tensor({a.label},{b.label})", builder=("tensor", (a, b)),
               weight=w, integrable=a.integrable and b.integrable)


def direct_sum(a: Rep, b: Rep) -> Rep:
    if a.n != b.n:
        raise ValueError("summands must have the same n")
    mats = {key: linalg.block_diag(a.mats[key], b.mats[key]) for key in a.mats}
    return Rep(a.n, mats, a.labels + b.labels, f"sum({a.label},{b.label})",
               builder=("sum", (a, b)), integrable=a.integrable and b.integrable)


def _nullspace(rows: list, ncols: int) -> list:
    red, piv = linalg.rref(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in piv]
    out = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, p in zip(red, piv):
            v[p] = -r[f]
        out.append(v)
    return out


def highest_weight_vectors(r: Rep, weight) -> list:
    d = r.dim
    rows = []
    for i in range(r.n):
        m = r.E(i, i) - Fraction(weight[i]) * linalg.eye(d)
        rows += [list(row) for row in m]
        for j in range(i + 1, r.n):
            rows += [list(row) for row in r.E(i, j)]
    return _nullspace(rows, d)


def hwc(r: Rep, weight) -> Rep:
    """Submodule generated by a highest-weight vector of the given weight."""
    weight = [Fraction(w) for w in weight]
    if len(weight) != r.n:
        raise InvalidWeight(f"weight needs {r.n} entries")
    for a, b in zip(weight, weight[1:]):
        if a - b < 0 or (a - b).denominator != 1:
            raise InvalidWeight(f"weight {[str(w) for w in weight]} is not dominant")
    vecs = highest_weight_vectors(r, weight)
    if not vecs:
        raise InvalidWeight(f"no highest-weight vector of weight {[str(w) for w in weight]} in {r.label}")
    ech = linalg.Echelon()
    span = []
    todo = [vecs[0]]
    while todo:
        v = todo.pop(0)
        if ech.add(dict(enumerate(v))):
            span.append(v)
            for i in range(r.n):
                for j in range(i):
                    todo.append(list(r.E(i, j).dot(np.array(v, dtype=object))))
    B = linalg.as_matrix(span).T            # columns span the submodule
    # rows of B at the pivots of B^T form an invertible square block
    _, sel = linalg.rref([list(col) for col in B.T])
    Bsq = B[sel, :]
    Binv = linalg.inverse(Bsq)
    mats = {key: Binv @ (m @ B)[sel, :] for key, m in r.mats.items()}
    labels = [f"v{a}" for a in range(len(span))]
    wtxt = ",".join(str(w) for w in weight)
    return Rep(r.n, mats, labels, f"hwc({r.label},[{wtxt}])", builder=("hwc", (r, B, sel)),
               weight=weight, integrable=r.integrable)


# ---------------------------------------------------------------- Casimirs

def casimir(k: int, rep: Rep) -> np.ndarray:
    """Matrix of ``sum E_{i1 i2} E_{i2 i3} ... E_{ik i1}``.

    Any ``k >= 1`` is allowed; ``k <= n`` already generate the centre.
    """
    n = rep.n
    if k < 1:
        raise ValueError("Casimir index must be at least 1")
    P = {(a, c): rep.E(a, c) for a in range(n) for c in range(n)}
    for _ in range(k - 1):
        P = {(a, c): sum((P[(a, b)] @ rep.E(b, c) for b in range(n)), linalg.zeros(rep.dim))
             for a in range(n) for c in range(n)}
    return sum((P[(a, a)] for a in range(n)), linalg.zeros(rep.dim))


def central_character(rep: Rep, kmax: int | None = None) -> list:
    """Scalars of the Casimirs ``1..kmax`` (default ``n``); raises :class:`NotScalar`."""
    out = []
    for k in range(1, (kmax or rep.n) + 1):
        c = linalg.is_scalar(casimir(k, rep))
        if c is None:
            raise NotScalar(f"Casimir {k} is not scalar on {rep.label}")
        out.append(c)
    return out


def obstruction_operator(rep: Rep, i: int, j: int, l: int) -> np.ndarray:
    """``d_il E_lj - E_li E_lj`` (0-based indices)."""
    m = -(rep.E(l, i) @ rep.E(l, j))
    if i == l:
        m = m + rep.E(l, j)
    return m


def is_exterior_type(rep: Rep):
    """``k`` if every obstruction operator vanishes and the central character is that of ``ext(k, n)``, else None."""
    chi = central_character(rep)
    n = rep.n
    for i, j, l in product(range(n), repeat=3):
        if not linalg.is_zero(obstruction_operator(rep, i, j, l)):
            return None
    for k in range(n + 1):
        if central_character(ext(k, n)) == chi:
            return k
    return None


def catalog(n: int) -> list:
    """Built-in simple reps for ``gl_n`` with pairwise distinct highest weights.

    Candidates isomorphic to an earlier entry (same central character, which
    separates finite-dimensional simple modules) are skipped; this matters for
    small ``n``, where for example ``det(-1) (x) natural(1)`` is trivial.
    """
    cands = [ext(k, n) for k in range(n + 1)]
    cands.append(sym(2, n))
    if n >= 2:
        cands.append(hwc(tensor(natural(n), dual(natural(n))), [1] + [0] * (n - 2) + [-1]))
    cands.append(tensor(det(1, n), natural(n)))
    cands.append(tensor(det(-1, n), natural(n)))
    cands.append(det(2, n))
    out, seen = [], set()
    for r in cands:
        cc = tuple(central_character(r))
        if cc not in seen:
            seen.add(cc)
            out.append(r)
    return out


# ---------------------------------------------------------------- group action

def _zero_like(x):
    return x * 0


def _inv_scalar(x):
    if isinstance(x, Fraction) or isinstance(x, int):
        return 1 / Fraction(x)
    from .rings import inverse
    return inverse(x)


def mat_mul(a: list, b: list) -> list:
    z = _zero_like(a[0][0])
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), z) for j in range(len(b[0]))]
            for i in range(len(a))]


def mat_det(a: list):
    n = len(a)
    if n == 1:
        return a[0][0]
    total = _zero_like(a[0][0])
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        term = a[0][j] * mat_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def mat_inverse(a: list) -> list:
    n = len(a)
    d_inv = _inv_scalar(mat_det(a))
    if n == 1:
        return [[d_inv]]
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = [r[:i] + r[i + 1:] for k, r in enumerate(a) if k != j]
            c = mat_det(minor)
            row.append(c * d_inv if (i + j) % 2 == 0 else -c * d_inv)
        out.append(row)
    return out


def _kron_lists(a: list, b: list) -> list:
    return [[x * y for x in ra for y in rb] for ra in a for rb in b]


def group_action(rep: Rep, g: list) -> list:
    """Matrix of the group element ``g`` (a list of rows) acting on ``rep``.

    Entries of ``g`` may be Fractions or ring elements; the determinant must
    be invertible where inverses are needed.
    """
    if not rep.integrable:
        raise NotIntegrable(f"{rep.label} does not integrate to the group")
    kind, payload = rep.builder
    n = rep.n
    z = _zero_like(g[0][0])
    one = z + 1
    if kind == "natural":
        return [list(row) for row in g]
    if kind == "trivial":
        return [[one]]
    if kind == "dual":
        inner = group_action(payload, mat_inverse(g))
        return [list(col) for col in zip(*inner)]
    if kind == "det":
        lam = payload
        dg = mat_det(g)
        p = int(lam)
        if p >= 0:
            val = one
            for _ in range(p):
                val = val * dg
        else:
            inv = _inv_scalar(dg)
            val = one
            for _ in range(-p):
                val = val * inv
        return [[val]]
    if kind == "ext":
        k = payload
        basis = list(combinations(range(n), k))
        if k == 0:
            return [[one]]
        return [[mat_det([[g[a][b] for b in T] for a in S]) for T in basis] for S in basis]
    if kind == "sym":
        k = payload
        basis = sym_basis(k, n)
        index = {e: a for a, e in enumerate(basis)}
        out = [[z for _ in basis] for _ in basis]
        for col, e in enumerate(basis):
            # image of x^e with x_j -> sum_i g_ij x_i
            poly = {(0,) * n: one}
            for j, a in enumerate(e):
                for _ in range(a):
                    nxt: dict = {}
                    for m, c in poly.items():
                        for i in range(n):
                            if g[i][j] == 0:
                                continue
                            mm = list(m)
                            mm[i] += 1
                            mm = tuple(mm)
                            nxt[mm] = nxt[mm] + c * g[i][j] if mm in nxt else c * g[i][j]
                    poly = nxt
            for m, c in poly.items():
                out[index[m]][col] = out[index[m]][col] + c
        return out
    if kind == "tensor":
        a, b = payload
        return _kron_lists(group_action(a, g), group_action(b, g))
    if kind == "sum":
        a, b = payload
        ga, gb = group_action(a, g), group_action(b, g)
        out = [row + [z] * b.dim for row in ga] + [[z] * a.dim + row for row in gb]
        return out
    if kind == "hwc":
        parent, B, sel = payload
        big = group_action(parent, g)
        Bl = [[z + B[i, j] for j in range(B.shape[1])] for i in range(B.shape[0])]
        img = mat_mul(big, Bl)
        Binv = linalg.inverse(B[sel, :])
        Binv_l = [[z + Binv[i, j] for j in range(Binv.shape[1])] for i in range(Binv.shape[0])]
        return mat_mul(Binv_l, [img[r] for r in sel])
    raise ValueError(f"no group action for {rep.label}")


# ---------------------------------------------------------------- expression language

REP_GRAMMAR = """natural(n)      the defining module Q^n
dual(R)         contragredient module
ext(k,n)        k-th exterior power of Q^n
sym(k,n)        k-th symmetric power of Q^n
det(l[,n])      one-dimensional, E_ij -> l * delta_ij (n defaults to 1)
trivial(n)      one-dimensional, every E_ij -> 0
tensor(R1,R2)   tensor product
sum(R1,R2)      direct sum
hwc(R,[w1,...]) submodule of R generated by a highest-weight vector of weight w"""


def rep_from_call(c: Call, text: str) -> Rep:
    name = c.name
    if name == "natural":
        need(c, text, 1)
        return natural(as_int(c.args[0], c, text))
    if name == "trivial":
        need(c, text, 1)
        return trivial(as_int(c.args[0], c, text))
    if name == "dual":
        need(c, text, 1)
        return dual(_sub(c.args[0], c, text))
    if name in ("ext", "sym"):
        need(c, text, 2)
        k, n = (as_int(a, c, text) for a in c.args)
        return ext(k, n) if name == "ext" else sym(k, n)
    if name == "det":
        need(c, text, (1, 2))
        lam = c.args[0]
        if not isinstance(lam, Fraction):
            raise ParseError("det needs a rational weight", text, c.pos)
        n = as_int(c.args[1], c, text) if len(c.args) == 2 else 1
        return det(lam, n)
    if name in ("tensor", "sum"):
        need(c, text, 2)
        a, b = (_sub(x, c, text) for x in c.args)
        return tensor(a, b) if name == "tensor" else direct_sum(a, b)
    if name == "hwc":
        need(c, text, 2)
        if not isinstance(c.args[1], list):
            raise ParseError("hwc needs a weight list", text, c.pos)
        return hwc(_sub(c.args[0], c, text), c.args[1])
    raise ParseError(f"unknown representation {name!r}", text, c.pos)


def _sub(a, c: Call, text: str) -> Rep:
    if not isinstance(a, Call):
        raise ParseError(f"{c.name} expects a representation argument", text, c.pos)
    return rep_from_call(a, text)


def rep_build(text: str) -> Rep:
    return rep_from_call(parse(text), text)
