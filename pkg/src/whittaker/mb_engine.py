"""Mellin-Barnes integrands and their evaluation on vertical lines.

An ``MBIntegrand`` is a product of Gamma-type factors with affine arguments
and of real powers ``base**(c + sum_i k_i s_i)``, integrated against
``ds_1/(2 pi i) ... ds_n/(2 pi i)`` over vertical lines ``Re s_i = sigma_i``.

Evaluation is an iterated trapezoid rule on the tensor grid
``sigma_j + i k h, |k h| <= T``.  Every factor is tabulated once in log
scale on the grid of the variables it depends on; the variables are then
summed out one at a time (innermost first), each partial sum being rescaled
by its own maximum before exponentiation.  This is the plain nested
quadrature, organised so that a factor coupling only two variables never
forces a full tensor product over all of them.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import linprog

from . import special_fn as sf
from .errors import InfeasibleContour, PoleOnContour, Unconverged
from .special_fn import LogComplex

DEFAULT_STEP = 0.1
DEFAULT_HEIGHT = 40.0
DEFAULT_MARGIN = 0.5
DEFAULT_START = 10.0
REFINE_BUDGET = 3
MAX_DIM = 6
POLE_GUARD = 1e-10


class Kind(str, Enum):
    PLAIN = "PLAIN"
    R = "R"
    C = "C"


class Position(str, Enum):
    NUMERATOR = "NUMERATOR"
    DENOMINATOR = "DENOMINATOR"


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**6)
    return Fraction(x)


@dataclass(frozen=True)
class GammaFactor:
    """Gamma_kind(constant + sum coeffs[i] * s_i), in numerator or denominator."""

    kind: Kind
    constant: complex
    coeffs: tuple
    position: Position = Position.NUMERATOR

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "position", Position(self.position))
        object.__setattr__(self, "constant", complex(self.constant))
        object.__setattr__(self, "coeffs", tuple(_frac(c) for c in self.coeffs))

    @property
    def variables(self) -> tuple:
        return tuple(i for i, c in enumerate(self.coeffs) if c != 0)

    @property
    def numerator(self) -> bool:
        return self.position is Position.NUMERATOR

    def slack(self, sigma: Sequence[float]) -> float:
        """Real part of the underlying Gamma argument on the contour."""
        re = self.constant.real + sum(float(c) * s for c, s in zip(self.coeffs, sigma))
        return re / 2.0 if self.kind is Kind.R else re

    def log_kernel(self, arg: np.ndarray) -> np.ndarray:
        if self.kind is Kind.PLAIN:
            return sf.loggamma(arg)
        if self.kind is Kind.R:
            return sf.loggamma_r(arg)
        return sf.loggamma_c(arg)

    def gamma_argument(self, arg: np.ndarray) -> np.ndarray:
        return arg / 2.0 if self.kind is Kind.R else arg

    def conjugate(self) -> "GammaFactor":
        return replace(self, constant=self.constant.conjugate())


@dataclass(frozen=True)
class PowerFactor:
    """base ** (exponent_constant + sum exponent_coeffs[i] * s_i), base > 0.

    ``base`` may be a 1-d array of positive reals; the factor then carries
    its own batch axis and ``eval_mb`` returns one value per base.
    """

    base: object
    exponent_constant: complex
    exponent_coeffs: tuple

    def __post_init__(self):
        b = np.asarray(self.base, dtype=float)
        if np.any(~(b > 0)):
            raise ValueError("PowerFactor base must be positive")
        object.__setattr__(self, "base", float(b) if b.ndim == 0 else b)
        object.__setattr__(self, "exponent_constant", complex(self.exponent_constant))
        object.__setattr__(self, "exponent_coeffs", tuple(_frac(c) for c in self.exponent_coeffs))

    @property
    def batched(self) -> bool:
        return isinstance(self.base, np.ndarray)

    @property
    def variables(self) -> tuple:
        return tuple(i for i, c in enumerate(self.exponent_coeffs) if c != 0)


@dataclass(frozen=True)
class TabulatedFactor:
    """A factor given by a callable returning log values on grids of its
    variables (used for numerically computed Mellin transforms).

    ``fn`` receives one complex array per variable (already broadcast) and
    returns log values.  ``constraints`` are pairs (coeffs, constant) meaning
    ``constant + coeffs . Re(s) >= margin`` on admissible contours.
    """

    variables: tuple
    fn: Callable = field(compare=False)
    constraints: tuple = ()
    label: str = "tabulated"


@dataclass(frozen=True)
class MBIntegrand:
    nvars: int
    prefactor: LogComplex = LogComplex(0.0, 0.0)
    gammas: tuple = ()
    powers: tuple = ()
    tabulated: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "gammas", tuple(self.gammas))
        object.__setattr__(self, "powers", tuple(self.powers))
        object.__setattr__(self, "tabulated", tuple(self.tabulated))
        for g in self.gammas:
            if len(g.coeffs) != self.nvars:
                raise ValueError("GammaFactor coefficient length != nvars")
        for p in self.powers:
            if len(p.exponent_coeffs) != self.nvars:
                raise ValueError("PowerFactor coefficient length != nvars")
        if self.nvars > MAX_DIM:
            raise ValueError(f"at most {MAX_DIM} integration variables supported")
        for i in range(self.nvars):
            net = sum(1 if g.numerator else -1 for g in self.gammas if g.coeffs[i] != 0)
            net += sum(1 for t in self.tabulated if i in t.variables)
            if net < 1:
                raise ValueError(f"variable {i} lacks net Gamma decay (count {net})")

    def conjugate(self) -> "MBIntegrand":
        if self.tabulated:
            raise ValueError("cannot conjugate tabulated factors")
        return replace(
            self,
            prefactor=LogComplex(self.prefactor.log_modulus, -self.prefactor.phase),
            gammas=tuple(g.conjugate() for g in self.gammas),
            powers=tuple(replace(p, exponent_constant=p.exponent_constant.conjugate())
                         for p in self.powers),
        )

    def shifted(self, shifts: Sequence[complex]) -> "MBIntegrand":
        """The integrand after the substitution s_i -> s_i + shifts[i]."""
        def moved(const, coeffs):
            return const + sum(complex(c) * d for c, d in zip(coeffs, shifts))
        if self.tabulated:
            raise ValueError("cannot shift tabulated factors")
        return replace(
            self,
            gammas=tuple(replace(g, constant=moved(g.constant, g.coeffs)) for g in self.gammas),
            powers=tuple(replace(p, exponent_constant=moved(p.exponent_constant, p.exponent_coeffs))
                         for p in self.powers),
        )

    def permuted(self, order: Sequence[int]) -> "MBIntegrand":
        """Same integral with variable ``order[j]`` renamed to j.

        Variables are summed out last-first, so placing a variable without
        batched powers last keeps the intermediate tables batch-free.
        """
        order = tuple(order)
        if sorted(order) != list(range(self.nvars)):
            raise ValueError("order must be a permutation of the variables")
        if self.tabulated:
            raise ValueError("cannot permute tabulated factors")
        return replace(
            self,
            gammas=tuple(replace(g, coeffs=tuple(g.coeffs[i] for i in order)) for g in self.gammas),
            powers=tuple(replace(p, exponent_coeffs=tuple(p.exponent_coeffs[i] for i in order))
                         for p in self.powers),
        )

    def constraints(self):
        """Linear numerator-pole constraints as (coeffs, constant) pairs."""
        out = []
        for g in self.gammas:
            if not g.numerator:
                continue
            scale = 0.5 if g.kind is Kind.R else 1.0
            out.append(([scale * float(c) for c in g.coeffs], scale * g.constant.real))
        for t in self.tabulated:
            out.extend((list(c), float(k)) for c, k in t.constraints)
        return out

    # -- serialization -------------------------------------------------

    def to_json(self) -> dict:
        if self.tabulated:
            raise ValueError("tabulated factors are not serializable")

        def cplx(z):
            return {"re": z.real, "im": z.imag}

        def fr(c):
            return f"{c.numerator}/{c.denominator}"

        return {
            "nvars": self.nvars,
            "prefactor": {"log_modulus": self.prefactor.log_modulus, "phase": self.prefactor.phase},
            "gammas": [
                {"kind": g.kind.value, "constant": cplx(g.constant),
                 "coeffs": [fr(c) for c in g.coeffs], "position": g.position.value}
                for g in self.gammas
            ],
            "powers": [
                {"base": p.base if not p.batched else p.base.tolist(),
                 "exponent_constant": cplx(p.exponent_constant),
                 "exponent_coeffs": [fr(c) for c in p.exponent_coeffs]}
                for p in self.powers
            ],
        }

    @classmethod
    def from_json(cls, doc) -> "MBIntegrand":
        if isinstance(doc, str):
            doc = json.loads(doc)

        def cplx(d):
            return complex(d["re"], d.get("im", 0.0))

        return cls(
            nvars=int(doc["nvars"]),
            prefactor=LogComplex(doc["prefactor"]["log_modulus"], doc["prefactor"]["phase"]),
            gammas=[GammaFactor(g["kind"], cplx(g["constant"]), [Fraction(c) for c in g["coeffs"]],
                                g.get("position", "NUMERATOR")) for g in doc["gammas"]],
            powers=[PowerFactor(p["base"], cplx(p["exponent_constant"]),
                                [Fraction(c) for c in p["exponent_coeffs"]])
                    for p in doc.get("powers", [])],
        )


@dataclass(frozen=True)
class ContourSpec:
    sigma: tuple
    height: float = DEFAULT_HEIGHT
    step: float = DEFAULT_STEP

    def __post_init__(self):
        object.__setattr__(self, "sigma", tuple(float(s) for s in self.sigma))
        if not (self.height > 0 and self.step > 0):
            raise ValueError("contour height and step must be positive")

    def refined(self) -> "ContourSpec":
        return replace(self, height=2 * self.height, step=self.step / 2)

    def shifted(self, delta: Sequence[float]) -> "ContourSpec":
        return replace(self, sigma=tuple(s + d for s, d in zip(self.sigma, delta)))


class MBResult(NamedTuple):
    value: complex
    error_estimate: float


# --------------------------------------------------------------------------
# contours


def min_slack(integrand: MBIntegrand, sigma: Sequence[float]) -> float:
    cons = integrand.constraints()
    if not cons:
        return math.inf
    return min(k + sum(c * s for c, s in zip(cs, sigma)) for cs, k in cons)


def max_slack(integrand: MBIntegrand, bound: float = 200.0) -> float:
    """Largest achievable minimum slack over all contours (capped at 10)."""
    n = integrand.nvars
    cons = integrand.constraints()
    if not cons:
        return math.inf
    # variables: sigma (n), tau; maximize tau
    a_ub = [[-c for c in cs] + [1.0] for cs, _ in cons]
    b_ub = [k for _, k in cons]
    res = linprog([0.0] * n + [-1.0], A_ub=a_ub, b_ub=b_ub,
                  bounds=[(-bound, bound)] * n + [(None, 10.0)], method="highs")
    if res.status != 0:
        raise InfeasibleContour(f"contour LP failed: {res.message}")
    return float(res.x[-1])


def find_contour(integrand: MBIntegrand, margin: float = DEFAULT_MARGIN,
                 height: float = DEFAULT_HEIGHT, step: float = DEFAULT_STEP,
                 start: float = DEFAULT_START, strategy: str = "poles") -> ContourSpec:
    """Vertical lines keeping every numerator pole at least ``margin`` to the left.

    ``strategy="poles"`` picks the admissible contour closest to the poles
    (total slack minimised, ties broken towards ``start``).  ``"saddle"``
    then moves, inside the admissible polytope, to the minimum of the
    integrand modulus on the real axis; for exponentially small values this
    avoids the cancellation a line near the poles would suffer.
    """
    if margin <= 0:
        raise ValueError("margin must be positive")
    n = integrand.nvars
    cons = integrand.constraints()
    if not cons:
        return ContourSpec((start,) * n, height, step)
    if max_slack(integrand) < margin - 1e-12:
        raise InfeasibleContour("no contour satisfies all numerator-pole constraints")
    # variables: sigma (n), d (n) with d_i >= |sigma_i - start|
    reg = 1e-6
    obj = [sum(cs[i] for cs, _ in cons) for i in range(n)] + [reg] * n
    a_ub, b_ub = [], []
    for cs, k in cons:
        a_ub.append([-c for c in cs] + [0.0] * n)
        b_ub.append(k - margin)
    for i in range(n):
        row = [0.0] * (2 * n)
        row[i], row[n + i] = 1.0, -1.0
        a_ub.append(row)
        b_ub.append(start)
        row = [0.0] * (2 * n)
        row[i], row[n + i] = -1.0, -1.0
        a_ub.append(row)
        b_ub.append(-start)
    res = linprog(obj, A_ub=a_ub, b_ub=b_ub,
                  bounds=[(-200.0, 200.0)] * n + [(0, None)] * n, method="highs")
    if res.status != 0:
        raise InfeasibleContour(f"contour LP failed: {res.message}")
    sigma = [round(float(x), 12) for x in res.x[:n]]
    # guard against LP round-off on the binding constraints
    deficit = margin - min_slack(integrand, sigma)
    if deficit > 0:
        sigma = _nudge(integrand, sigma, margin)
    if strategy == "saddle":
        sigma = _saddle(integrand, sigma, margin)
    elif strategy != "poles":
        raise ValueError(f"unknown contour strategy {strategy!r}")
    return ContourSpec(tuple(sigma), height, step)


def real_axis_log_modulus(integrand: MBIntegrand, sigma: Sequence[float]) -> float:
    """log |integrand| at the real point ``sigma`` (batched bases averaged in log)."""
    total = integrand.prefactor.log_modulus
    for g in integrand.gammas:
        arg = g.constant.real + sum(float(c) * x for c, x in zip(g.coeffs, sigma))
        val = float(np.real(g.log_kernel(np.array(complex(arg, g.constant.imag)))))
        total += val if g.numerator else -val
    for p in integrand.powers:
        e = p.exponent_constant.real + sum(float(c) * x for c, x in zip(p.exponent_coeffs, sigma))
        total += e * float(np.mean(np.log(p.base)))
    for t in integrand.tabulated:
        pts = [np.array(complex(sigma[v], 0.0)) for v in t.variables]
        total += float(np.real(t.fn(*pts)))
    return total


def _saddle(integrand, sigma0, margin):
    from scipy.optimize import minimize

    cons = integrand.constraints()
    lin = [{"type": "ineq", "fun": (lambda x, cs=cs, k=k: k + np.dot(cs, x) - margin),
            "jac": (lambda x, cs=cs: np.asarray(cs, dtype=float))} for cs, k in cons]

    def obj(x):
        try:
            return real_axis_log_modulus(integrand, x)
        except Exception:
            return 1e6

    res = minimize(obj, np.asarray(sigma0, dtype=float), method="SLSQP", constraints=lin,
                   options={"ftol": 1e-10, "maxiter": 200})
    x = [round(float(v), 9) for v in res.x]
    if min_slack(integrand, x) < margin - 1e-9 or obj(x) > obj(sigma0):
        return list(sigma0)
    if min_slack(integrand, x) < margin:
        x = _nudge(integrand, x, margin)
    return x


def _nudge(integrand, sigma, margin):
    # a few projection sweeps onto violated half-spaces
    sigma = list(sigma)
    for _ in range(50):
        worst = None
        for cs, k in integrand.constraints():
            s = k + sum(c * x for c, x in zip(cs, sigma))
            if s < margin and (worst is None or s < worst[0]):
                worst = (s, cs)
        if worst is None:
            return sigma
        s, cs = worst
        nrm = sum(c * c for c in cs)
        sigma = [x + (margin - s + 1e-12) * c / nrm for x, c in zip(sigma, cs)]
    return sigma


def check_contour(integrand: MBIntegrand, contour: ContourSpec) -> None:
    if len(contour.sigma) != integrand.nvars:
        raise ValueError("contour dimension does not match integrand")
    if min_slack(integrand, contour.sigma) <= 0:
        raise InfeasibleContour("contour does not keep the numerator poles on its left")


# --------------------------------------------------------------------------
# evaluation


def _nodes(contour: ContourSpec):
    k = int(math.floor(contour.height / contour.step + 1e-9))
    t = contour.step * np.arange(-k, k + 1)
    return [s + 1j * t for s in contour.sigma], t


def _factor_tables(integrand: MBIntegrand, grids: list):
    """Log tables keyed by sorted axis tuples (variables, then batch axes)."""
    n = integrand.nvars
    tables: dict = {}

    def add(axes, values):
        axes = tuple(axes)
        if axes in tables:
            tables[axes] = tables[axes] + values
        else:
            tables[axes] = values

    def mesh(vars_):
        shape = [len(grids[v]) for v in vars_]
        out = []
        for j, v in enumerate(vars_):
            sh = [1] * len(vars_)
            sh[j] = shape[j]
            out.append(grids[v].reshape(sh))
        return out

    for g in integrand.gammas:
        vs = g.variables
        arg = np.asarray(g.constant, dtype=complex)
        for v, m in zip(vs, mesh(vs)):
            arg = arg + float(g.coeffs[v]) * m
        arg = np.broadcast_to(arg, tuple(len(grids[v]) for v in vs)).copy() if vs else arg
        under = g.gamma_argument(arg)
        near = sf.pole_distance(under) < POLE_GUARD
        if g.numerator:
            if np.any(near):
                raise PoleOnContour("numerator Gamma argument hits a pole on the contour")
            add(vs, g.log_kernel(arg))
        else:
            vals = np.full(arg.shape, -np.inf + 0j) if np.ndim(arg) else None
            if vals is None:
                add(vs, -g.log_kernel(arg) if not near else np.array(-np.inf + 0j))
                continue
            ok = ~near
            vals[ok] = -g.log_kernel(arg[ok])
            add(vs, vals)
    batch_axis = n
    for p in integrand.powers:
        vs = p.variables
        expo = np.asarray(p.exponent_constant, dtype=complex)
        for v, m in zip(vs, mesh(vs)):
            expo = expo + float(p.exponent_coeffs[v]) * m
        if p.batched:
            logb = np.log(p.base).reshape((1,) * len(vs) + (-1,))
            vals = expo[..., None] * logb if vs else expo * logb.reshape(-1)
            add(vs + (batch_axis,), vals)
            grids.append(np.arange(len(p.base)))
            batch_axis += 1
        else:
            add(vs, expo * math.log(p.base))
    for t in integrand.tabulated:
        vs = tuple(t.variables)
        add(vs, np.asarray(t.fn(*mesh(vs)), dtype=complex))
    return tables, batch_axis - n


def _eliminate(tables: dict, nvars: int, nbatch: int, weight: float, slices):
    """Sum out variables nvars-1, ..., 0; returns log of the result over batch axes."""
    factors = []
    for axes, vals in tables.items():
        idx = tuple(slices[a] if a < nvars else slice(None) for a in axes)
        factors.append((axes, vals[idx] if axes else vals))
    for v in range(nvars - 1, -1, -1):
        touching = [f for f in factors if v in f[0]]
        rest = [f for f in factors if v not in f[0]]
        axes = tuple(sorted(set().union(*(f[0] for f in touching))))
        total = 0
        for fa, fv in touching:
            shape = [1] * len(axes)
            for j, a in enumerate(fa):
                shape[axes.index(a)] = fv.shape[j]
            total = total + fv.reshape(shape)
        pos = axes.index(v)
        with np.errstate(invalid="ignore", over="ignore"):
            re = total.real
            m = np.max(re, axis=pos, keepdims=True)
            m = np.where(np.isfinite(m), m, 0.0)
            s = np.sum(np.exp(total - m), axis=pos) * weight
        with np.errstate(divide="ignore"):
            new = np.log(s) + np.squeeze(m, axis=pos)
        factors = rest + [(tuple(a for a in axes if a != v), new)]
    out = 0
    for fa, fv in factors:
        if not fa:
            out = out + fv
    batch_axes = tuple(range(nvars, nvars + nbatch))
    for fa, fv in factors:
        if fa:
            shape = [1] * nbatch
            for j, a in enumerate(fa):
                shape[batch_axes.index(a)] = fv.shape[j]
            out = out + fv.reshape(shape)
    return out


def _evaluate(integrand: MBIntegrand, contour: ContourSpec):
    grids, t = _nodes(contour)
    tables, nbatch = _factor_tables(integrand, list(grids))
    n = integrand.nvars
    weight = contour.step / (2.0 * math.pi)
    full = [slice(None)] * n
    k = (len(t) - 1) // 2
    log_v = _eliminate(tables, n, nbatch, weight, full)
    # coarser step on the same nodes (every other node, centre kept)
    start = k % 2
    coarse = [slice(start, None, 2)] * n
    log_c = _eliminate(tables, n, nbatch, 2 * weight, coarse)
    half = k // 2
    short = [slice(k - half, k + half + 1)] * n
    log_s = _eliminate(tables, n, nbatch, weight, short)
    pre = integrand.prefactor.log
    v = np.exp(log_v + pre)
    # the trapezoid error decays geometrically in 1/h and the truncation
    # error geometrically in T, so each error is about the square of the
    # relative change seen from the coarser (2h) or shorter (T/2) grid
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(np.abs(v) > 0, np.abs(v), 1.0)
        d_step = np.abs(v - np.exp(log_c + pre))
        e_step = np.minimum(d_step, 10.0 * d_step**2 / scale)
        d_tail = np.abs(v - np.exp(log_s + pre))
        e_tail = np.minimum(d_tail, 10.0 * d_tail**2 / scale)
    abs_tables = {a: x.real + 0j for a, x in tables.items()}
    mass = np.exp(_eliminate(abs_tables, n, nbatch, weight, full).real + pre.real)
    err = e_step + e_tail + 1e-15 * mass
    return v, err


def eval_mb(integrand: MBIntegrand, contour: ContourSpec | None = None,
            tol: float | None = None, budget: int = REFINE_BUDGET):
    """Evaluate the integrand on its contour; returns ``MBResult(value, error)``.

    The error estimate combines the changes obtained by doubling the step
    and by halving the height on the same nodes (each squared relative to
    the value, as befits geometric convergence) with a rounding floor.  With ``tol`` given
    the grid is refined (step/2, height*2) until ``error <= tol*|value|``,
    at most ``budget`` times; otherwise Unconverged is raised.
    """
    if contour is None:
        contour = find_contour(integrand)
    check_contour(integrand, contour)
    for attempt in range(budget + 1):
        v, err = _evaluate(integrand, contour)
        if tol is None or np.all(err <= tol * np.abs(v)):
            break
        if attempt == budget:
            raise Unconverged(
                f"MB quadrature error {float(np.max(err)):.3e} above tolerance {tol:.1e}")
        contour = contour.refined()
    if np.ndim(v) == 0:
        return MBResult(complex(v), float(err))
    return MBResult(v, err)


def contour_integral(integrand: MBIntegrand, margin: float = DEFAULT_MARGIN,
                     tol: float | None = None, **kw) -> MBResult:
    return eval_mb(integrand, find_contour(integrand, margin, **kw), tol=tol)


# --------------------------------------------------------------------------
# Barnes' first lemma


def barnes_integrand(a, b, c, d) -> MBIntegrand:
    h = Fraction(1, 2)
    return MBIntegrand(1, gammas=[
        GammaFactor(Kind.C, a, [h]), GammaFactor(Kind.C, b, [h]),
        GammaFactor(Kind.C, c, [-h]), GammaFactor(Kind.C, d, [-h]),
    ])


def barnes_rhs(a, b, c, d) -> complex:
    g = sf.gamma_C
    val = g(a + c) * g(a + d) * g(b + c) * g(b + d) / g(a + b + c + d)
    return 4.0 * val.to_complex()


def barnes_check(a, b, c, d, step: float = DEFAULT_STEP, height: float = DEFAULT_HEIGHT):
    """Both sides of Barnes' first lemma in Gamma_C form, contour Re z = 0."""
    a, b, c, d = (complex(x) for x in (a, b, c, d))
    if min(a.real, b.real, c.real, d.real) <= 0:
        raise InfeasibleContour("Barnes check needs positive real parts")
    integrand = barnes_integrand(a, b, c, d)
    lhs = eval_mb(integrand, ContourSpec((0.0,), height, step))
    return lhs.value, barnes_rhs(a, b, c, d)
