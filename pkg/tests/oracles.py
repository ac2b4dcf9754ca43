"""Independent reference computations used to pin derived values."""
from itertools import combinations, product

import numpy as np


def wedge_matrix(n, k, i, j):
    basis = list(combinations(range(n), k))
    index = {S: a for a, S in enumerate(basis)}
    M = np.zeros((len(basis), len(basis)), dtype=object)
    M[:] = 0
    for col, S in enumerate(basis):
        if j not in S:
            continue
        T = [i if s == j else s for s in S]
        if len(set(T)) < k:
            continue
        # sign of the permutation sorting T
        sign = 1
        for a in range(k):
            for b in range(a + 1, k):
                if T[a] > T[b]:
                    sign = -sign
        M[index[tuple(sorted(T))], col] += sign
    return M


def oracle_casimir(n, k, power):
    E = {(i, j): wedge_matrix(n, k, i, j) for i in range(n) for j in range(n)}
    dim = E[(0, 0)].shape[0]
    total = np.zeros((dim, dim), dtype=object)
    total[:] = 0
    for idx in product(range(n), repeat=power):
        M = np.identity(dim, dtype=object)
        for a in range(power):
            M = M.dot(E[(idx[a], idx[(a + 1) % power])])
        total = total + M
    return total


def elliptic_gauge_oracle():
    """Coefficients c with tau(y Y) = c Y and tau((t^2 - 1) T) = c Y, computed inside the ring.

    The module with generators T, Y and relations y T = t Y, (t^2 - 1) T = y Y
    embeds into Q[t, y]/(y^2 - t^3 + t) by T -> t, Y -> y.  Both sides are
    pushed through the embedding, reduced modulo the curve, and divided by y.
    """
    import sympy

    t, y = sympy.symbols("t y")
    curve = sympy.groebner([y ** 2 - t ** 3 + t], y, t, order="lex")
    tau = {t: 2 * y, y: 3 * t ** 2 - 1}

    def d(f):
        return sympy.expand(sum(sympy.diff(f, v) * tau[v] for v in (t, y)))

    tau_T = (t ** 2 + 1) * y          # (t^2 + 1) Y, embedded
    tau_Y = (t ** 3 + t) * t          # (t^3 + t) T, embedded
    lhs = d(y) * y + y * tau_Y        # tau(y . Y)
    rhs = d(t ** 2 - 1) * t + (t ** 2 - 1) * tau_T
    out = []
    for e in (lhs, rhs):
        r = curve.reduce(sympy.expand(e))[1]
        out.append(sympy.expand(sympy.cancel(r / y)))
    return out
