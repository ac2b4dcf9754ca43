"""Small exact linear-algebra helpers over numpy object arrays of Fractions."""
from __future__ import annotations

from fractions import Fraction

import numpy as np


def zeros(r: int, c: int | None = None) -> np.ndarray:
    c = r if c is None else c
    out = np.empty((r, c), dtype=object)
    out.fill(Fraction(0))
    return out


def eye(d: int) -> np.ndarray:
    out = zeros(d)
    for i in range(d):
        out[i, i] = Fraction(1)
    return out


def as_matrix(rows) -> np.ndarray:
    rows = [[Fraction(x) for x in row] for row in rows]
    out = zeros(len(rows), len(rows[0]) if rows else 0)
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            out[i, j] = x
    return out


def is_zero(m: np.ndarray) -> bool:
    return not any(x != 0 for x in m.flat)


def is_scalar(m: np.ndarray):
    """Return the scalar ``c`` if ``m == c * I``, else None."""
    d = m.shape[0]
    if d == 0:
        return None
    c = m[0, 0]
    for i in range(d):
        for j in range(d):
            if m[i, j] != (c if i == j else 0):
                return None
    return c


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ra, ca = a.shape
    rb, cb = b.shape
    out = zeros(ra * rb, ca * cb)
    for i in range(ra):
        for j in range(ca):
            if a[i, j] != 0:
                out[i * rb:(i + 1) * rb, j * cb:(j + 1) * cb] = a[i, j] * b
    return out


def block_diag(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = zeros(a.shape[0] + b.shape[0], a.shape[1] + b.shape[1])
    out[:a.shape[0], :a.shape[1]] = a
    out[a.shape[0]:, a.shape[1]:] = b
    return out


def rref(rows: list) -> tuple:
    """Reduced row echelon form of a list of Fraction lists; returns (rows, pivots)."""
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(m: np.ndarray) -> int:
    return len(rref([list(row) for row in m])[1])


def inverse(m: np.ndarray) -> np.ndarray:
    d = m.shape[0]
    aug = [list(m[i]) + [Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    red, piv = rref(aug)
    if piv[:d] != list(range(d)):
        raise ZeroDivisionError("singular matrix")
    return as_matrix([row[d:] for row in red])


class Echelon:
    """Incrementally maintained echelon basis of a subspace of ``Q^N``.

    Vectors are sparse dicts from coordinate key to Fraction.
    """

    def __init__(self):
        self.rows: dict = {}   # pivot key -> row with leading 1 at pivot

    def __len__(self):
        return len(self.rows)

    def reduce(self, v: dict) -> dict:
        v = {k: c for k, c in v.items() if c}
        # rows are fully reduced, so one pass over the pivots suffices
        for p in [k for k in v if k in self.rows]:
            c = v.get(p)
            if not c:
                continue
            for kk, x in self.rows[p].items():
                nv = v.get(kk, 0) - c * x
                if nv:
                    v[kk] = nv
                else:
                    v.pop(kk, None)
        return v

    def add(self, v: dict) -> bool:
        """Insert ``v``; return True if it enlarged the span."""
        r = self.reduce(v)
        if not r:
            return False
        piv = next(iter(r))
        inv = 1 / r[piv]
        r = {k: c * inv for k, c in r.items()}
        for key, row in self.rows.items():
            if piv in row:
                c = row[piv]
                for kk, x in r.items():
                    nv = row.get(kk, 0) - c * x
                    if nv:
                        row[kk] = nv
                    else:
                        row.pop(kk, None)
        self.rows[piv] = r
        return True
