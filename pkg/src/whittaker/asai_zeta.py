"""Asai local L-factors of principal series [nu, kappa] of GL_n(C) and the
closed form of the corresponding local zeta integral.

The zeta integral reduces to a Gaussian integral times the Mellin transform
of the minimal K-type Whittaker function f_{[nu,kappa],(0,...,0,kappa)} on
the diagonal line (s, 2s, ..., (n-1)s).  ``asai_lhs_mellin`` computes that
Mellin transform numerically from the Whittaker function itself; ``asai_rhs``
is the Gamma-factor closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .arch_whittaker import (MinimalTypeParamsC, WeightIndexC, evaluate_direct,
                             whittaker_c_integrand)
from .errors import DomainError, InvalidWeight, LengthMismatch, PoleError, UnsupportedRank
from .mb_engine import ContourSpec, Kind, eval_mb
from .special_fn import loggamma_c, loggamma_r, pole_distance

LOG_2 = math.log(2.0)
LOG_PI = math.log(math.pi)

# distance (in the Gamma variable) below which an evaluation counts as a pole
POLE_TOL = 1e-8

# coarse Mellin-Barnes grid for the batched rank-3 Whittaker values
N3_STEP = 0.15
N3_HEIGHT = 15.0


@dataclass(frozen=True)
class AsaiInput:
    """Representation [nu, (kappa, 0, ..., 0)] of GL_n(C) and the point s."""

    nu: tuple
    kappa: int
    s: complex

    def __post_init__(self):
        nu = tuple(complex(x) for x in self.nu)
        if not nu:
            raise DomainError("nu must be nonempty")
        if int(self.kappa) != self.kappa or self.kappa < 0:
            raise InvalidWeight("kappa must be a nonnegative integer")
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "kappa", int(self.kappa))
        object.__setattr__(self, "s", complex(self.s))

    @property
    def n(self) -> int:
        return len(self.nu)

    @property
    def epsilon(self) -> int:
        return self.kappa % 2

    @property
    def abs_nu(self) -> complex:
        return sum(self.nu)

    def at(self, s: complex) -> "AsaiInput":
        return AsaiInput(self.nu, self.kappa, s)


@dataclass(frozen=True)
class GammaTerm:
    """Gamma_R or Gamma_C of the argument s_coeff * s + constant."""

    kind: Kind
    constant: complex
    s_coeff: float = 1.0

    def argument(self, s: complex) -> complex:
        return self.s_coeff * complex(s) + self.constant


@dataclass(frozen=True)
class LFactor:
    """2^{e_2(s)} pi^{e_pi(s)} times a product of Gamma_R / Gamma_C terms.

    The exponents are affine in s, stored as (constant, s-coefficient).
    """

    gamma_terms: tuple
    power_prefactor: tuple = field(default=((0.0, 0.0), (0.0, 0.0)))

    def counts(self) -> dict:
        return {k: sum(1 for g in self.gamma_terms if g.kind is k) for k in (Kind.R, Kind.C)}

    def log_value(self, s: complex, pole_tol: float = POLE_TOL) -> complex:
        s = complex(s)
        (c2, d2), (cp, dp) = self.power_prefactor
        out = (c2 + d2 * s) * LOG_2 + (cp + dp * s) * LOG_PI
        for g in self.gamma_terms:
            x = g.argument(s)
            # Gamma_R(x) is singular where x/2 is a pole of Gamma
            var = x / 2 if g.kind is Kind.R else x
            if pole_distance(var) < pole_tol:
                raise PoleError(f"Gamma_{g.kind.value}({x}) is at or next to a pole")
            out += complex(loggamma_r(x) if g.kind is Kind.R else loggamma_c(x))
        return out

    def evaluate(self, s: complex, pole_tol: float = POLE_TOL) -> complex:
        return complex(np.exp(self.log_value(s, pole_tol)))

    def min_real_argument(self, s: complex) -> float:
        return min(g.argument(s).real for g in self.gamma_terms)


def asai_l_factor(inp: AsaiInput) -> LFactor:
    """L(s, pi_{[nu,kappa]}, As) as a product of n Gamma_R and n(n-1)/2 Gamma_C terms."""
    nu, k = inp.nu, inp.kappa
    terms = [GammaTerm(Kind.R, 2 * nu[0] + inp.epsilon)]
    terms += [GammaTerm(Kind.R, 2 * x) for x in nu[1:]]
    terms += [GammaTerm(Kind.C, nu[0] + x + k / 2) for x in nu[1:]]
    n = inp.n
    terms += [GammaTerm(Kind.C, nu[i] + nu[j]) for i in range(1, n) for j in range(i + 1, n)]
    return LFactor(tuple(terms))


def rhs_power_of_two(n: int, printed: bool = False) -> int:
    """Exponent c in the closed form 2^c Gamma_R(..)/Gamma_R(..) L(s, As).

    The usual statement has c = n(n-2).  With the rank-2 spherical function
    in its K-Bessel normalization, whose Mellin transform carries 2^{-4},
    every n >= 3 picks up that 2^{-4} through the inner Mellin transform;
    ``printed=True`` returns the uncorrected n(n-2).
    """
    c = n * (n - 2)
    if n >= 3 and not printed:
        c -= 4
    return c


def asai_rhs(inp: AsaiInput, pole_tol: float = POLE_TOL, printed: bool = False) -> complex:
    """2^c Gamma_R(s+2nu_1+kappa)/Gamma_R(s+2nu_1+eps) L(s, As), c from rhs_power_of_two."""
    n, nu1 = inp.n, inp.nu[0]
    ratio = LFactor((GammaTerm(Kind.R, 2 * nu1 + inp.kappa),),
                    ((float(rhs_power_of_two(n, printed)), 0.0), (0.0, 0.0)))
    log_val = ratio.log_value(inp.s, pole_tol) + asai_l_factor(inp).log_value(inp.s, pole_tol)
    log_val -= complex(loggamma_r(inp.s + 2 * nu1 + inp.epsilon))
    return complex(np.exp(log_val))


def gaussian_factor(inp: AsaiInput) -> complex:
    """2^{-2+x/2} Gamma_C(x/2) with x = ns+kappa+2|nu|, the integral of a^x e^{-pi a^2} d*a."""
    x = inp.n * inp.s + inp.kappa + 2 * inp.abs_nu
    return complex(np.exp((-2 + x / 2) * LOG_2 + loggamma_c(x / 2)))


@dataclass(frozen=True)
class MellinResult:
    value: complex
    error_estimate: float
    step: float
    window: tuple


def _decay_rate(inp: AsaiInput) -> float:
    rate = asai_l_factor(inp).min_real_argument(inp.s)
    if rate <= 0:
        raise DomainError("Re s is too small for the zeta integral to converge")
    return rate


def _mellin_n2(inp: AsaiInput, params: MinimalTypeParamsC, ell: WeightIndexC,
               h: float, tol: float, window: float | None = None) -> MellinResult:
    lo = -window if window else -min(36.0 / _decay_rate(inp), 80.0)
    hi = 2.5
    k0, k1 = math.floor(lo / h), math.ceil(hi / h)
    u = h * np.arange(2 * k0, 2 * k1 + 1) / 2  # fine grid; the coarse one is every other node
    f = np.empty(u.shape, dtype=complex)
    err = np.empty(u.shape)
    # chunks of neighbouring points keep each batched inner window compact
    for start in range(0, len(u), 64):
        sl = slice(start, start + 64)
        res = evaluate_direct(params, ell, [np.exp(u[sl])], tol=tol)
        f[sl], err[sl] = res.value, res.error_estimate
    w = np.exp(inp.s * u)
    fine = np.sum(f * w) * h / 2
    coarse = np.sum(f[::2] * w[::2]) * h
    error = abs(fine - coarse) + float(np.sum(err * np.abs(w))) * h / 2
    return MellinResult(complex(fine), error, h / 2, (lo, hi))


def _pinned_contour(integrand, fixed: dict, step: float, height: float) -> ContourSpec:
    """Contour with the given variables at prescribed real parts.

    The remaining variables (at most one here) go to the middle of their
    admissible interval, or one unit inside it when it is unbounded.
    """
    free = [j for j in range(integrand.nvars) if j not in fixed]
    if len(free) > 1:
        raise UnsupportedRank("only one free contour variable is supported")
    sigma = [fixed.get(j, 0.0) for j in range(integrand.nvars)]
    if free:
        j = free[0]
        lo, hi = -math.inf, math.inf
        for cs, k in integrand.constraints():
            rest = k + sum(c * x for i, (c, x) in enumerate(zip(cs, sigma)) if i != j)
            if cs[j] > 0:
                lo = max(lo, -rest / cs[j])
            elif cs[j] < 0:
                hi = min(hi, -rest / cs[j])
            elif rest <= 0:
                raise DomainError("the Mellin point lies outside the convergence tube")
        if not lo < hi:
            raise DomainError("the Mellin point lies outside the convergence tube")
        if math.isinf(lo) and math.isinf(hi):
            sigma[j] = 0.0
        elif math.isinf(hi):
            sigma[j] = lo + 1.0
        elif math.isinf(lo):
            sigma[j] = hi - 1.0
        else:
            sigma[j] = 0.5 * (lo + hi)
    return ContourSpec(tuple(sigma), height=height, step=step)


def _mellin_n3(inp: AsaiInput, params: MinimalTypeParamsC, ell: WeightIndexC,
               h: float, step: float, height: float, window: float | None = None) -> MellinResult:
    lo = -window if window else -min(24.0 / _decay_rate(inp), 24.0)
    hi = 2.5
    u = h * np.arange(math.floor(lo / h), math.ceil(hi / h) + 1)
    # separate batch axes for a_1 and a_2 give the whole tensor grid at once;
    # moving z_1 to the end sums it out before any batch axis appears
    integrand = whittaker_c_integrand(params, ell, [np.exp(u), np.exp(u)]).permuted((1, 2, 0))
    # the s-lines sit at (Re s, 2 Re s) so a^{s} f(a) is evaluated without cancellation
    contour = _pinned_contour(integrand, {0: inp.s.real, 1: 2 * inp.s.real}, step, height)
    w = np.exp(inp.s * u)[:, None] * np.exp(2 * inp.s * u)[None, :]

    def total(c: ContourSpec):
        vals = np.asarray(eval_mb(integrand, c, tol=None).value) * w
        return vals.sum() * h * h, vals[::2, ::2].sum() * 4 * h * h

    fine, coarse = total(contour)
    # pointwise MB errors largely cancel in the sum, so the MB error is
    # judged on the total.  Doubling the step is not an option: the alias
    # period 2 pi / step must stay longer than the log-window.
    error = abs(fine - coarse)
    for other in (replace(contour, step=step * 4 / 3), replace(contour, height=height * 2 / 3)):
        error += abs(fine - total(other)[0])
    return MellinResult(complex(fine), error, h, (lo, hi))


def mellin_on_diagonal(inp: AsaiInput, tol: float = 1e-11, h: float | None = None,
                       mb_step: float = N3_STEP, mb_height: float = N3_HEIGHT,
                       window: float | None = None) -> MellinResult:
    """Mellin transform of f_{[nu,kappa],(0,..,0,kappa)} at (s, 2s, ..., (n-1)s).

    n = 2 integrates the direct (propagation) evaluation over a log grid;
    n = 3 integrates batched Mellin-Barnes values over a 2D log grid.
    ``window`` overrides the automatic lower cutoff -window of each log a_i.
    """
    n = inp.n
    if n not in (2, 3):
        raise UnsupportedRank("the zeta integral is implemented for n in {2, 3}")
    params = MinimalTypeParamsC(inp.nu, inp.kappa)
    ell = WeightIndexC((0,) * (n - 1) + (inp.kappa,))
    if n == 3 and 2 * math.pi / mb_step < 30.0:
        raise DomainError("MB step too coarse for the log-window (alias period below 30)")
    if n == 2:
        return _mellin_n2(inp, params, ell, h or 0.1, tol, window)
    return _mellin_n3(inp, params, ell, h or 0.1, mb_step, mb_height, window)


def asai_lhs_mellin(inp: AsaiInput, tol: float = 1e-11, **kw) -> MellinResult:
    """The zeta integral from the numerical Mellin transform, with error estimate."""
    m = mellin_on_diagonal(inp, tol, **kw)
    g = gaussian_factor(inp)
    return MellinResult(g * m.value, abs(g) * m.error_estimate, m.step, m.window)


@dataclass(frozen=True)
class AsaiReport:
    inp: AsaiInput
    lhs: complex
    rhs: complex
    lhs_error: float
    rel_err: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.rel_err <= self.tol

    def row(self) -> dict:
        return {"n": self.inp.n, "kappa": self.inp.kappa, "nu": list(self.inp.nu),
                "s": self.inp.s, "lhs": self.lhs, "rhs": self.rhs,
                "rel_err": self.rel_err, "pass": self.passed}


def verify_asai(inp: AsaiInput, tol: float = 1e-8, **kw) -> AsaiReport:
    """Compare the numerical zeta integral with the closed form.

    The closed form is evaluated first so that a pole surfaces as PoleError
    before any quadrature is attempted.
    """
    rhs = asai_rhs(inp)
    lhs = asai_lhs_mellin(inp, **kw)
    rel = abs(lhs.value - rhs) / abs(rhs)
    return AsaiReport(inp, lhs.value, rhs, lhs.error_estimate, rel, tol)


def asai_sweep(nus: Sequence, kappas: Sequence[int], ss: Sequence[complex],
               tol: float = 1e-8) -> list:
    """verify_asai over a product grid, in the given order."""
    return [verify_asai(AsaiInput(nu, k, s), tol) for nu in nus for k in kappas for s in ss]
