"""Growth series of modules under finite frames and growth-exponent estimates."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .jets import generators
from .linalg import Echelon
from .local_iso import jet_act
from .weyl import VecField


class WindowTooSmall(ValueError):
    pass


@dataclass
class FrameOp:
    name: str
    fn: Callable


@dataclass
class GrowthSeries:
    dims: list
    seed: list = field(default_factory=list)

    def rows(self) -> list:
        return [(l, d, math.log(l + 1), math.log(d)) for l, d in enumerate(self.dims)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["l", "dim", "log_l1", "log_dim"])
        for l, d, a, b in self.rows():
            w.writerow([l, d, f"{a:.6f}", f"{b:.6f}"])
        return buf.getvalue()


def growth_series(M, frame: Sequence[FrameOp], seed: Sequence, l_max: int,
                  window: int | None = None, degree: Callable | None = None) -> GrowthSeries:
    """``d_l = dim F^l M_0`` with ``F = span(1, frame)``, computed exactly.

    Operators are applied only to the vectors that entered at the previous
    step, which is enough because ``F^l M_0 = F^{l-1} M_0 + frame(F^{l-1} M_0)``.
    With ``window`` and ``degree`` set, a coordinate of degree above the
    window raises :class:`WindowTooSmall`.
    """
    ech = Echelon()

    def admit(v) -> bool:
        c = M.coords(v)
        if window is not None and degree is not None:
            for k in c:
                if degree(k) > window:
                    raise WindowTooSmall(f"coordinate {k} lies outside the degree window {window}")
        return ech.add(c)

    fresh = [v for v in seed if admit(v)]
    if not fresh:
        raise ValueError("seed spans the zero space")
    dims = [len(ech)]
    for _ in range(l_max):
        new = []
        for v in fresh:
            for op in frame:
                w = op.fn(v)
                if admit(w):
                    new.append(w)
        fresh = new
        dims.append(len(ech))
    return GrowthSeries(dims, list(seed))


@dataclass
class ExponentFit:
    exponent: float
    residual: float
    points: int


def growth_exponent(dims: Sequence[int], tail: float = 0.5) -> ExponentFit:
    """Least-squares slope of ``log d_l`` against ``log(l + 1)`` over the tail of the series."""
    L = len(dims) - 1
    if L < 8:
        raise ValueError("growth_exponent needs l_max >= 8")
    start = max(1, int(math.floor((1 - tail) * L)))
    xs = np.array([math.log(l + 1) for l in range(start, L + 1)])
    ys = np.array([math.log(dims[l]) for l in range(start, L + 1)])
    A = np.vstack([xs, np.ones_like(xs)]).T
    (slope, icpt), *_ = np.linalg.lstsq(A, ys, rcond=None)
    resid = float(np.sqrt(np.mean((A @ np.array([slope, icpt]) - ys) ** 2)))
    return ExponentFit(float(slope), resid, len(xs))


# ---------------------------------------------------------------- frames

def d_frame(M) -> list:
    """``{x_i, d_i}`` acting through the module's ring and field actions."""
    ring = M.ring
    ops = []
    for i, x in enumerate(ring.gens()):
        ops.append(FrameOp(ring.names[i], lambda v, x=x: M.act_ring(x, v)))
    for i in range(ring.nderivs):
        eta = VecField.basis(ring, i)
        name = f"d{ring.names[i]}" if ring.nderivs == ring.n else f"d{i + 1}"
        ops.append(FrameOp(name, lambda v, eta=eta: M.act_field(eta, v)))
    return ops


def jet_frame(M, s: int = 2) -> list:
    return [FrameOp(g.to_text(), lambda v, g=g: jet_act(M, g, v)) for g in generators(M.ring.nderivs, s)]


def frame_from_spec(M, spec: str) -> list:
    """Comma-separated tokens: a variable name (multiplication), ``d<name>`` (field), ``jets`` or ``jets<s>``."""
    ring = M.ring
    ops = []
    for tok in (t.strip() for t in spec.split(",")):
        if not tok or tok == "1":
            continue
        if tok.startswith("jets"):
            ops += jet_frame(M, int(tok[4:]) if tok[4:] else 2)
        elif tok in ring.names:
            x = ring.var(tok)
            ops.append(FrameOp(tok, lambda v, x=x: M.act_ring(x, v)))
        elif tok.startswith("d") and tok[1:] in ring.names:
            eta = VecField.basis(ring, ring.names.index(tok[1:]))
            ops.append(FrameOp(tok, lambda v, eta=eta: M.act_field(eta, v)))
        else:
            raise ValueError(f"unknown frame token {tok!r}")
    return ops


@dataclass
class BernsteinResult:
    passed: bool
    exponent: float
    residual: float
    dims: list


def bernstein_check(M, n: int, l_max: int = 24, seed=None, extra: Sequence[FrameOp] = (),
                    tol: float = 0.2) -> BernsteinResult:
    """Measured growth of the cyclic submodule generated by ``seed`` must be at least ``n - tol``."""
    if seed is None:
        seed = M.basis(0)[0]
    series = growth_series(M, d_frame(M) + list(extra), [seed], l_max)
    fit = growth_exponent(series.dims)
    return BernsteinResult(fit.exponent >= n - tol, fit.exponent, fit.residual, series.dims)
