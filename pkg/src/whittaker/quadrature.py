"""Tensor-grid trapezoid quadrature over R^d and R_+^d.

Integrals over R_+ with the measure dt/t are handled by the substitution
t = e^u, after which the integrands met in this package decay double
exponentially in u and the plain trapezoid rule converges geometrically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import Unconverged


@dataclass(frozen=True)
class QuadResult:
    value: complex | np.ndarray
    error_estimate: float | np.ndarray
    step: float


def _grid(lo: float, hi: float, h: float) -> np.ndarray:
    # nodes anchored at 0 so that halving the step reuses every old node
    k0 = int(np.floor(lo / h))
    k1 = int(np.ceil(hi / h))
    return h * np.arange(k0, k1 + 1)


def trapezoid(fn: Callable, windows: Sequence[tuple], h: float) -> complex | np.ndarray:
    """Trapezoid sum of ``fn`` over a box in R^d with uniform step ``h``.

    ``fn`` receives d broadcastable coordinate arrays (axis j varies along
    array axis j) and may append trailing batch axes to its output.
    """
    d = len(windows)
    axes = []
    for j, (lo, hi) in enumerate(windows):
        shape = [1] * d
        g = _grid(lo, hi, h)
        shape[j] = len(g)
        axes.append(g.reshape(shape))
    vals = np.asarray(fn(*axes))
    return vals.sum(axis=tuple(range(d))) * h**d


def integrate(fn: Callable, windows: Sequence[tuple], h: float = 0.1, tol: float = 1e-10,
              budget: int = 4, grow: float = 0.25) -> QuadResult:
    """Trapezoid rule refined until two successive levels agree to ``tol``.

    Each refinement halves the step and widens every window by ``grow`` of
    its length on both sides.  The error estimate is the last change.
    """
    windows = [tuple(map(float, w)) for w in windows]
    prev = trapezoid(fn, windows, h)
    for _ in range(budget):
        h /= 2.0
        windows = [(lo - grow * (hi - lo), hi + grow * (hi - lo)) for lo, hi in windows]
        cur = trapezoid(fn, windows, h)
        err = np.abs(cur - prev)
        scale = np.maximum(np.abs(cur), np.finfo(float).tiny)
        if np.all(err <= tol * scale):
            return QuadResult(cur, err if np.ndim(err) else float(err), h)
        prev = cur
    raise Unconverged(f"trapezoid rule did not reach relative tolerance {tol:.1e}")


def integrate_multiplicative(fn: Callable, windows: Sequence[tuple], h: float = 0.1,
                             tol: float = 1e-10, budget: int = 4) -> QuadResult:
    """Integral over R_+^d against prod dt_j/t_j; ``windows`` are log-ranges.

    ``fn`` is called with the positive coordinates t = exp(u).
    """
    return integrate(lambda *us: fn(*(np.exp(u) for u in us)), windows, h, tol, budget)
