"""Archimedean Whittaker functions.

Two computational paths are kept for every formula:

* the Mellin-Barnes path, which builds an ``MBIntegrand`` from the
  displayed Gamma products and hands it to ``mb_engine``;
* the direct path, which integrates the reduced propagation integrals
  over R_+^{n-1} with the exp-substituted trapezoid rule.

Functions on GL_n(C) are the normalized f-values
``f(a) = delta_B(t(a))^{-1/2} W(t(a))`` with
``t(a) = diag(a_1...a_{n-1}, a_2...a_{n-1}, ..., a_{n-1}, 1)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import special_fn as sf
from .errors import DomainError, InvalidWeight, LengthMismatch, UnsupportedRank
from .mb_engine import (
    ContourSpec, GammaFactor, Kind, MBIntegrand, MBResult, PowerFactor, Position,
    eval_mb, find_contour, max_slack,
)
from .quadrature import integrate, trapezoid
from .special_fn import LogComplex, bessel_k, hermite

HALF = Fraction(1, 2)
LOG_2 = math.log(2.0)

# coarse grid for the six-variable n=4 spherical integrand
N4_STEP = 0.2
N4_HEIGHT = 20.0


# --------------------------------------------------------------------------
# parameter types


def _complex_tuple(xs) -> tuple:
    return tuple(complex(x) for x in xs)


@dataclass(frozen=True)
class SphericalParamsC:
    """Spectral parameter nu of a spherical principal series of GL_n(C)."""

    nu: tuple

    def __post_init__(self):
        nu = _complex_tuple(self.nu)
        if not nu:
            raise DomainError("nu must be nonempty")
        object.__setattr__(self, "nu", nu)

    @property
    def n(self) -> int:
        return len(self.nu)

    @property
    def abs_nu(self) -> complex:
        return sum(self.nu)

    @property
    def tilde(self) -> "SphericalParamsC":
        return SphericalParamsC(tuple(x - self.nu[0] for x in self.nu[1:]))


@dataclass(frozen=True)
class MinimalTypeParamsC:
    """Principal series [nu, kappa] with kappa = (kappa, 0, ..., 0)."""

    nu: tuple
    kappa: int = 0

    def __post_init__(self):
        object.__setattr__(self, "nu", _complex_tuple(self.nu))
        if len(self.nu) < 2:
            raise DomainError("minimal-type parameters need n >= 2")
        if int(self.kappa) != self.kappa or self.kappa < 0:
            raise InvalidWeight("kappa must be a nonnegative integer")
        object.__setattr__(self, "kappa", int(self.kappa))

    @property
    def n(self) -> int:
        return len(self.nu)

    @property
    def abs_nu(self) -> complex:
        return sum(self.nu)

    @property
    def tilde(self) -> SphericalParamsC:
        return SphericalParamsC(self.nu).tilde

    @property
    def epsilon(self) -> int:
        return self.kappa % 2


@dataclass(frozen=True)
class WeightIndexC:
    """Weight index ell with nonnegative entries summing to kappa."""

    ell: tuple

    def __post_init__(self):
        ell = tuple(self.ell)
        if any(int(x) != x or x < 0 for x in ell):
            raise InvalidWeight("weight index entries must be nonnegative integers")
        object.__setattr__(self, "ell", tuple(int(x) for x in ell))

    @property
    def kappa(self) -> int:
        return sum(self.ell)

    @property
    def partial_sums(self) -> tuple:
        """(l_1, l_1+l_2, ..., l_1+...+l_{n-1})."""
        return tuple(itertools.accumulate(self.ell))[:-1]

    @staticmethod
    def all_for(n: int, kappa: int) -> list:
        """Every weight index of length n and total kappa, in lexicographic order."""
        out = [WeightIndexC(c) for c in itertools.product(range(kappa + 1), repeat=n)
               if sum(c) == kappa]
        return sorted(out, key=lambda w: w.ell, reverse=True)


@dataclass(frozen=True)
class TorusPointC:
    """The point a = (a_1, ..., a_{n-1}) of R_+^{n-1}."""

    a: tuple

    def __post_init__(self):
        a = tuple(float(x) for x in self.a)
        if any(not (x > 0) for x in a):
            raise DomainError("torus coordinates must be positive")
        object.__setattr__(self, "a", a)

    @property
    def n(self) -> int:
        return len(self.a) + 1

    @property
    def diagonal(self) -> tuple:
        """Entries of t(a)."""
        return tuple(math.prod(self.a[i:]) for i in range(self.n - 1)) + (1.0,)

    alphas = diagonal

    def delta_half(self) -> float:
        """delta_{B_n(C)}(t(a))^{1/2} = prod_i t_i^{n-2i+1}."""
        n = self.n
        return math.prod(t ** (n - 2 * i - 1) for i, t in enumerate(self.diagonal))


@dataclass(frozen=True)
class MiyazakiParams:
    """Discrete series weight kappa >= 2 and character exponent w."""

    kappa: int
    w: complex = 0.0

    def __post_init__(self):
        if int(self.kappa) != self.kappa or self.kappa < 2:
            raise InvalidWeight("Miyazaki's formula needs an integer kappa >= 2")
        object.__setattr__(self, "kappa", int(self.kappa))
        object.__setattr__(self, "w", complex(self.w))

    def monomials(self) -> list:
        k = self.kappa
        return [(n1, n2, k - n1 - n2) for n1 in range(k, -1, -1) for n2 in range(k - n1, -1, -1)]


def _check_ell(params: MinimalTypeParamsC, ell: WeightIndexC):
    if len(ell.ell) != params.n:
        raise LengthMismatch("weight index length must equal n")
    if ell.kappa != params.kappa:
        raise InvalidWeight("weight index must sum to kappa")


def _check_torus(n: int, a: TorusPointC):
    if a.n != n:
        raise LengthMismatch(f"torus point needs {n - 1} coordinates")


# --------------------------------------------------------------------------
# integrand construction
#
# Affine forms are pairs (constant, {variable: coeff}); factors are collected
# in that form and only materialised once the total variable count is known.


def _lin(constant=0.0, coeffs=None):
    return (complex(constant), {k: Fraction(v) for k, v in (coeffs or {}).items()})


def _comb(*terms):
    """Linear combination of affine forms given as (form, scale) pairs."""
    const = 0j
    out: dict = {}
    for (c, d), scale in terms:
        const += complex(c) * float(scale)
        for k, v in d.items():
            out[k] = out.get(k, Fraction(0)) + Fraction(scale) * v
    return (const, {k: v for k, v in out.items() if v != 0})


class _Builder:
    def __init__(self):
        self.nvars = 0
        self.gammas = []
        self.powers = []
        self.log_prefactor = 0.0

    def new_var(self) -> int:
        self.nvars += 1
        return self.nvars - 1

    def gamma(self, kind, form, position=Position.NUMERATOR):
        self.gammas.append((kind, form, position))

    def power(self, base, form):
        self.powers.append((base, form))

    def build(self) -> MBIntegrand:
        def vec(d):
            v = [Fraction(0)] * self.nvars
            for k, c in d.items():
                v[k] += c
            return v
        return MBIntegrand(
            self.nvars,
            prefactor=LogComplex(self.log_prefactor, 0.0),
            gammas=[GammaFactor(k, f[0], vec(f[1]), p) for k, f, p in self.gammas],
            powers=[PowerFactor(b, f[0], vec(f[1])) for b, f in self.powers],
        )


def _mellin_spherical_into(b: _Builder, mu: tuple, w: list) -> None:
    """Add the factors of (M f_mu)(w_1, ..., w_{r-1}) for rank r = len(mu).

    ``w`` holds affine forms in existing variables.  Rank 1 is the constant
    1, rank 2 the closed form 2^{-4} Gamma_C(w/2+mu_1) Gamma_C(w/2+mu_2), and
    higher ranks the Mellin inversion of the recursion: its s-integral
    collapses to the integrand at s = w, leaving the z-integral.
    """
    r = len(mu)
    if r == 1:
        return
    if r == 2:
        b.log_prefactor -= 4 * LOG_2
        for m in mu:
            b.gamma(Kind.C, _comb((w[0], HALF), (_lin(m), 1)))
        return
    mu1 = mu[0]
    mu_t = tuple(x - mu1 for x in mu[1:])
    z = [_lin(0, {b.new_var(): 1}) for _ in range(r - 2)]
    _mellin_spherical_into(b, mu_t, z)
    _recursion_into(b, w, z, mu1, sum(mu_t), kappa=0, partial=(0,) * (r - 1))


def _recursion_into(b: _Builder, s: list, z: list, nu1: complex, abs_tilde: complex,
                    kappa: int, partial: Sequence[int]) -> None:
    """The s-dependent Gamma_C pairs shared by the spherical and minimal-type formulas."""
    m = len(s)
    zprev = _lin()
    for i in range(1, m + 1):
        c = i * nu1
        lt = partial[i - 1]
        b.gamma(Kind.C, _comb((s[i - 1], HALF), (zprev, -HALF), (_lin((kappa - lt) / 2 + c), 1)))
        if i < m:
            b.gamma(Kind.C, _comb((s[i - 1], HALF), (z[i - 1], -HALF), (_lin(lt / 2 + c), 1)))
            zprev = z[i - 1]
        else:
            b.gamma(Kind.C, _comb((s[i - 1], HALF), (_lin(lt / 2 + abs_tilde + c), 1)))


def _as_bases(a) -> list:
    """Torus coordinates as floats, or 1-d arrays for batched evaluation."""
    if isinstance(a, TorusPointC):
        return list(a.a)
    return [np.asarray(x, dtype=float) if np.ndim(x) else float(x) for x in a]


def ishii_stade_integrand(params: SphericalParamsC, a) -> MBIntegrand:
    """The recursive Mellin-Barnes integrand of the spherical f_nu, n >= 3.

    Variables: z_1..z_{n-2} of the Mellin transform (then any variables it
    needs internally), then s_1..s_{n-1}.
    """
    n = params.n
    if n < 3:
        raise UnsupportedRank("the recursive integrand needs n >= 3")
    bases = _as_bases(a)
    if len(bases) != n - 1:
        raise LengthMismatch(f"torus point needs {n - 1} coordinates")
    nu1 = params.nu[0]
    b = _Builder()
    z = [_lin(0, {b.new_var(): 1}) for _ in range(n - 2)]
    _mellin_spherical_into(b, params.tilde.nu, z)
    s = [_lin(0, {b.new_var(): 1}) for _ in range(n - 1)]
    for base, si in zip(bases, s):
        b.power(base, _comb((si, -1)))
    # the display: Gamma_C((s_i - z_{i-1})/2 + i nu_1) Gamma_C((s_i - z_i)/2 + i nu_1),
    # last pair Gamma_C((s - z_{n-2})/2 + (n-1) nu_1) Gamma_C(s/2 + |nu~| + (n-1) nu_1)
    abs_t = params.tilde.abs_nu
    zprev = _lin()
    for i in range(1, n):
        first = _comb((s[i - 1], HALF), (zprev, -HALF), (_lin(i * nu1), 1))
        b.gamma(Kind.C, first)
        if i < n - 1:
            b.gamma(Kind.C, _comb((s[i - 1], HALF), (z[i - 1], -HALF), (_lin(i * nu1), 1)))
            zprev = z[i - 1]
        else:
            b.gamma(Kind.C, _comb((s[i - 1], HALF), (_lin(abs_t + i * nu1), 1)))
    return b.build()


def whittaker_c_integrand(params: MinimalTypeParamsC, ell: WeightIndexC, a,
                          twist: bool = True) -> MBIntegrand:
    """Mellin-Barnes integrand of f_{[nu,kappa],ell} on GL_n(C).

    With ``twist=False`` the shifts i*nu_1 are left out, giving the integrand
    of the function before the central twist by chi_{[nu_1,kappa]}; the
    substitution s_i -> s_i + 2 i nu_1 turns one into the other up to the
    powers a_i^{-2 i nu_1}.
    """
    _check_ell(params, ell)
    n = params.n
    bases = _as_bases(a)
    if len(bases) != n - 1:
        raise LengthMismatch(f"torus point needs {n - 1} coordinates")
    b = _Builder()
    z = [_lin(0, {b.new_var(): 1}) for _ in range(n - 2)]
    _mellin_spherical_into(b, params.tilde.nu, z)
    s = [_lin(0, {b.new_var(): 1}) for _ in range(n - 1)]
    for base, si in zip(bases, s):
        b.power(base, _comb((si, -1)))
    nu1 = params.nu[0] if twist else 0.0
    _recursion_into(b, s, z, nu1, params.tilde.abs_nu, params.kappa, ell.partial_sums)
    return b.build()


def _factor_key(g: GammaFactor, digits: int = 12):
    c = complex(round(g.constant.real, digits) + 0.0, round(g.constant.imag, digits) + 0.0)
    return (g.kind.value, c, g.coeffs, g.position.value)


def same_structure(first: MBIntegrand, second: MBIntegrand, compare_powers: bool = True) -> bool:
    """Equality of two integrands up to factor ordering (exponent by exponent)."""
    if first.nvars != second.nvars:
        return False
    if sorted(map(_factor_key, first.gammas), key=repr) != sorted(map(_factor_key, second.gammas), key=repr):
        return False
    if abs(first.prefactor.log - second.prefactor.log) > 1e-12:
        return False
    if compare_powers:
        def pk(p):
            return (repr(np.asarray(p.base).tolist()), p.exponent_coeffs,
                    complex(round(p.exponent_constant.real, 12), round(p.exponent_constant.imag, 12)))
        if sorted(map(pk, first.powers), key=repr) != sorted(map(pk, second.powers), key=repr):
            return False
    return True


# --------------------------------------------------------------------------
# Mellin-Barnes evaluation


def _mb_budget(integrand: MBIntegrand) -> int:
    # each refinement multiplies the node count per axis by four
    return {1: 3, 2: 2, 3: 1}.get(integrand.nvars, 0)


def _run(integrand: MBIntegrand, tol, strategy="saddle", step=None, height=None, margin=None):
    kw = {}
    if step is not None:
        kw["step"] = step
    if height is not None:
        kw["height"] = height
    if margin is not None:
        kw["margin"] = margin
    contour = find_contour(integrand, strategy=strategy, **kw)
    return eval_mb(integrand, contour, tol=tol, budget=_mb_budget(integrand))


def f_spherical_n2(nu: Sequence[complex], a):
    """f_nu(a) = a^{nu_1+nu_2} K_{nu_1-nu_2}(4 pi a)."""
    nu1, nu2 = (complex(x) for x in nu)
    a = np.asarray(a, dtype=float)
    val = a ** (nu1 + nu2) * bessel_k(nu1 - nu2, 4 * math.pi * a)
    return complex(val) if val.ndim == 0 else val


def evaluate_spherical(params: SphericalParamsC, a: TorusPointC, tol: float | None = None,
                       step: float | None = None, height: float | None = None) -> MBResult:
    """f_nu(a) with an error estimate (Bessel closed form for n = 2)."""
    n = params.n
    if n < 2:
        raise DomainError("spherical Whittaker functions need n >= 2")
    if n > 4:
        raise UnsupportedRank("spherical evaluation is implemented for n <= 4")
    _check_torus(n, a)
    if n == 2:
        return MBResult(f_spherical_n2(params.nu, a.a[0]), 0.0)
    integrand = ishii_stade_integrand(params, a)
    if n == 4:
        step = step or N4_STEP
        height = height or N4_HEIGHT
        tol = None
    return _run(integrand, tol, step=step, height=height)


def f_spherical(params: SphericalParamsC, a: TorusPointC, tol: float | None = None) -> complex:
    """Spherical Whittaker function f_nu(a) on GL_n(C), n in {2, 3, 4}."""
    return evaluate_spherical(params, a, tol).value


def mellin_f_spherical(params: SphericalParamsC, z: Sequence[complex] = ()) -> complex:
    """(M f_mu)(z) for mu = params.nu of rank 1, 2 or 3.

    Rank 1 is the constant 1.  Rank 2 uses the closed form
    2^{-4} Gamma_C(z/2+mu_1) Gamma_C(z/2+mu_2).  Rank 3 is the Mellin
    inversion of the recursion, a single contour integral in one variable.
    """
    mu = params.nu
    r = len(mu)
    z = _complex_tuple(np.atleast_1d(np.asarray(z, dtype=complex)).ravel())
    if len(z) != r - 1:
        raise LengthMismatch(f"rank {r} Mellin transform takes {r - 1} arguments")
    for c, k in mellin_tube(mu):
        if k + sum(ci * zi.real for ci, zi in zip(c, z)) <= 0:
            raise DomainError("Mellin argument outside the convergence tube")
    if r == 1:
        return 1.0 + 0j
    if r == 2:
        val = sf.gamma_C(z[0] / 2 + mu[0]) * sf.gamma_C(z[0] / 2 + mu[1])
        return val.to_complex() / 16.0
    if r == 3:
        integrand = mellin_integrand(mu, z)
        return _run(integrand, None, strategy="poles", margin=_auto_margin(integrand)).value
    raise UnsupportedRank("Mellin transforms are implemented up to rank 3")


def mellin_integrand(mu: Sequence[complex], z: Sequence[complex]) -> MBIntegrand:
    """One-variable contour integrand whose integral is (M f_mu)(z) at rank 3."""
    mu = _complex_tuple(mu)
    if len(mu) != 3:
        raise UnsupportedRank("the Mellin integrand is built for rank 3")
    b = _Builder()
    _mellin_spherical_into(b, mu, [_lin(complex(zi)) for zi in z])
    return b.build()


def mellin_tube(mu: Sequence[complex]) -> list:
    """Convergence tube of (M f_mu) as constraints (coeffs, constant) > 0 on Re z."""
    mu = _complex_tuple(mu)
    r = len(mu)
    out = []
    if r == 2:
        out = [([0.5], m.real) for m in mu]
    elif r == 3:
        for m in mu:
            out.append(([0.5, 0.0], m.real))
        for i, j in itertools.combinations(range(3), 2):
            out.append(([0.0, 0.5], (mu[i] + mu[j]).real))
    return out


def _auto_margin(integrand: MBIntegrand) -> float:
    return min(0.5, 0.8 * max_slack(integrand))


# --------------------------------------------------------------------------
# minimal K-type functions on GL_n(C)


def evaluate_minimal(params: MinimalTypeParamsC, ell: WeightIndexC, a: TorusPointC,
                     tol: float | None = None, step: float | None = None,
                     height: float | None = None) -> MBResult:
    """f_{[nu,kappa],ell}(a) by the Mellin-Barnes formula, with error estimate."""
    if params.n not in (2, 3):
        raise UnsupportedRank("minimal-type functions are implemented for n in {2, 3}")
    _check_torus(params.n, a)
    return _run(whittaker_c_integrand(params, ell, a), tol, step=step, height=height)


def whittaker_c_mb(params: MinimalTypeParamsC, ell: WeightIndexC, a: TorusPointC,
                   tol: float | None = None) -> complex:
    return evaluate_minimal(params, ell, a, tol).value


def _rank2_on_log_ratio(mu, d: np.ndarray) -> np.ndarray:
    """f_mu(e^d) for rank-2 mu on an array of log-arguments (few distinct values)."""
    # on a uniform grid the differences repeat up to rounding noise
    key = np.round(d, 12)
    _, first, inv = np.unique(key, return_index=True, return_inverse=True)
    vals = np.asarray(f_spherical_n2(mu, np.exp(d.ravel()[first])))
    return vals[inv].reshape(d.shape)


def _direct_setup(params: MinimalTypeParamsC, ell: WeightIndexC, bases: list):
    """Integrand over log t in R^{n-1} and prefactor of the reduced propagation integral."""
    n = params.n
    kappa = params.kappa
    lt = ell.partial_sums
    mu = params.tilde.nu
    abs_mu = params.tilde.abs_nu
    batched = any(np.ndim(x) for x in bases)
    bs = [np.atleast_1d(np.asarray(x, dtype=float)) if batched else float(x) for x in bases]
    alpha = [math.prod(bs[i:]) if not batched else np.prod(np.broadcast_arrays(*bs[i:]), axis=0)
             for i in range(n - 1)] + [1.0]
    log_alpha = [np.log(x) for x in alpha]

    def fn(*us):
        if batched:
            us = [u[..., None] for u in us]
        logs = 0j
        for i in range(n - 1):
            u = us[i]
            t2 = np.exp(2 * u)
            logs = logs + ((2 * lt[i] - kappa) * u + (kappa - lt[i]) * log_alpha[i]
                           - lt[i] * log_alpha[i + 1]
                           - 2 * math.pi * (t2 / alpha[i + 1] ** 2 + alpha[i] ** 2 / t2))
        logs = logs + 2 * abs_mu * us[n - 2]
        val = np.exp(logs)
        if n == 3:
            val = val * _rank2_on_log_ratio(mu, us[0] - us[1])
        return val

    twist = 0j
    for i, x in enumerate(bs, start=1):
        twist = twist + 2 * i * params.nu[0] * np.log(x)
    prefactor = 2.0 ** (4 * (n - 1)) * np.exp(twist)
    windows = []
    widths = []
    for i in range(n - 1):
        lo = float(np.min(np.log(alpha[i] / 3.0))) - 0.5
        hi = float(np.max(np.log(3.0 * np.asarray(alpha[i + 1])))) + 0.5
        windows.append((min(lo, hi - 1.0), max(hi, lo + 1.0)))
        widths.append(1.0 / math.sqrt(16 * math.pi * float(np.max(bs[i]))))
    h0 = min(0.1, 0.5 * min(widths))
    return fn, prefactor, windows, h0


def evaluate_direct(params: MinimalTypeParamsC, ell: WeightIndexC, a,
                    tol: float = 1e-11) -> MBResult:
    """The reduced propagation integral for f_{[nu,kappa],ell}, n in {2, 3}.

    The weight-vector signs and powers of sqrt(-1) are stripped, so the
    result is directly comparable with the Mellin-Barnes evaluation.  ``a``
    may be a TorusPointC or a list of coordinates (1-d arrays allowed for
    batched evaluation).
    """
    _check_ell(params, ell)
    if params.n not in (2, 3):
        raise UnsupportedRank("direct evaluation is implemented for n in {2, 3}")
    bases = _as_bases(a)
    if len(bases) != params.n - 1:
        raise LengthMismatch(f"torus point needs {params.n - 1} coordinates")
    fn, prefactor, windows, h0 = _direct_setup(params, ell, bases)
    res = integrate(fn, windows, h=h0, tol=tol, budget=4)
    value = prefactor * res.value
    err = np.abs(prefactor) * res.error_estimate
    if np.ndim(value) == 0:
        return MBResult(complex(value), float(err))
    return MBResult(value, err)


def whittaker_c_direct(params: MinimalTypeParamsC, ell: WeightIndexC, a: TorusPointC,
                       tol: float = 1e-11) -> complex:
    return evaluate_direct(params, ell, a, tol).value


# --------------------------------------------------------------------------
# GL_3(R): Miyazaki's formula


def _multinomial(ns) -> int:
    out = math.factorial(sum(ns))
    for k in ns:
        out //= math.factorial(k)
    return out


def miyazaki_integrand(params: MiyazakiParams, n1: int, n3: int, a1, a2) -> MBIntegrand:
    """Double contour integrand of one monomial coefficient (without prefactor)."""
    k, w = params.kappa, params.w
    h = (k - 1) / 2
    return MBIntegrand(2, gammas=[
        GammaFactor(Kind.C, h + w, [1, 0]),
        GammaFactor(Kind.R, n1, [1, 0]),
        GammaFactor(Kind.C, h - w, [0, 1]),
        GammaFactor(Kind.R, n3, [0, 1]),
        GammaFactor(Kind.R, n1 + n3, [1, 1], Position.DENOMINATOR),
    ], powers=[PowerFactor(a1, 0, [-1, 0]), PowerFactor(a2, 0, [0, -1])])


def miyazaki_mb(params: MiyazakiParams, a1: float, a2: float, tol: float | None = None,
                with_error: bool = False) -> dict:
    """Monomial coefficients of W(diag(a1 a2, a2, 1)) from the contour formula.

    The prefactor is 2^{-4} (multinomial) i^{n1-n3} a1 a2^{1+2w}; the
    exponent of a2 follows from the final substitution s2 -> s2 - 2w.
    """
    if not (a1 > 0 and a2 > 0):
        raise DomainError("a1, a2 must be positive")
    out = {}
    for n1, n2, n3 in params.monomials():
        pre = (_multinomial((n1, n2, n3)) / 16.0 * 1j ** (n1 - n3)
               * a1 * a2 ** (1 + 2 * params.w))
        res = _run(miyazaki_integrand(params, n1, n3, a1, a2), tol)
        out[(n1, n2, n3)] = (MBResult(pre * res.value, abs(pre) * res.error_estimate)
                             if with_error else pre * res.value)
    return out


def _miyazaki_i_fn(params: MiyazakiParams, n1: int, n2: int, n3: int, a1, a2):
    k, w = params.kappa, params.w
    sqpi = math.sqrt(math.pi)

    def fn(u1, u2):
        t1, t2 = np.exp(u1), np.exp(u2)
        x = a2 / t2 + t1 * t2 / a2
        logs = ((-n1 + (k - 1) / 2 + w) * u1 + (-n1 + n3 + 2 * w) * u2
                - math.pi * ((a1 * a2) ** 2 / (t1 * t2) ** 2 + t2 ** 2) - math.pi * x ** 2)
        return (a1 * a2) ** n1 * hermite(n2, sqpi * x) * np.exp(logs)
    return fn


def miyazaki_i(params: MiyazakiParams, n1: int, n2: int, n3: int, a1: float, a2: float,
               tol: float = 1e-11) -> MBResult:
    """The integral I_{n1,n2,n3}(a1, a2) over R_+^2 by the trapezoid rule in log t."""
    fn = _miyazaki_i_fn(params, n1, n2, n3, a1, a2)
    lo2 = math.log(a2) - 2.5
    hi2 = max(1.5, lo2 + 1.0)
    lo1 = math.log(a1 * a2) - 3.5
    hi1 = max(3.5, lo1 + 1.0)
    res = integrate(fn, [(lo1, hi1), (lo2, hi2)], h=0.1, tol=tol, budget=4)
    return MBResult(complex(res.value), float(res.error_estimate))


def miyazaki_direct(params: MiyazakiParams, a1: float, a2: float, tol: float = 1e-11,
                    with_error: bool = False) -> dict:
    """Monomial coefficients from the direct integrals I_{n1,n2,n3}."""
    if not (a1 > 0 and a2 > 0):
        raise DomainError("a1, a2 must be positive")
    out = {}
    for n1, n2, n3 in params.monomials():
        pre = (_multinomial((n1, n2, n3)) * (4 * math.pi) ** (-n2 / 2)
               * 1j ** (n1 - n3) * a1 * a2)
        res = miyazaki_i(params, n1, n2, n3, a1, a2, tol)
        out[(n1, n2, n3)] = (MBResult(pre * res.value, abs(pre) * res.error_estimate)
                             if with_error else pre * res.value)
    return out


def miyazaki_mellin_closed(params: MiyazakiParams, n1: int, n2: int, n3: int,
                           s1: complex, s2: complex) -> complex:
    """Closed Gamma product for the double Mellin transform of I_{n1,n2,n3}."""
    k, w = params.kappa, params.w
    h = (k - 1) / 2
    val = (sf.gamma_C(s1 + h + w) * sf.gamma_R(s1 + n1) * sf.gamma_C(s2 + h + w)
           * sf.gamma_R(s2 + n3 + 2 * w) / sf.gamma_R(s1 + s2 + n1 + n3 + 2 * w))
    return (4 * math.pi) ** (n2 / 2) / 16.0 * val.to_complex()


def miyazaki_mellin_quadrature(params: MiyazakiParams, n1: int, n2: int, n3: int,
                               s1: complex, s2: complex, h: float = 0.2) -> complex:
    """Double Mellin transform of I_{n1,n2,n3} by four-dimensional quadrature."""
    k, w = params.kappa, params.w
    sqpi = math.sqrt(math.pi)
    ua1 = np.arange(-40.0 / max(s1.real if isinstance(s1, complex) else s1, 0.5), 4.0 + h / 2, h)
    ua2 = np.arange(-10.0, 5.0 + h / 2, h)
    ut1 = np.arange(-14.0, 8.0 + h / 2, h)
    ut2 = np.arange(-8.0, 3.0 + h / 2, h)
    a1 = np.exp(ua1)[:, None, None]
    t1 = np.exp(ut1)[None, :, None]
    t2 = np.exp(ut2)[None, None, :]
    total = 0j
    for v in ua2:
        a2 = math.exp(v)
        x = a2 / t2 + t1 * t2 / a2
        logs = (s1 * np.log(a1) + s2 * v + (-n1 + (k - 1) / 2 + w) * np.log(t1)
                + (-n1 + n3 + 2 * w) * np.log(t2) + n1 * (np.log(a1) + v)
                - math.pi * ((a1 * a2) ** 2 / (t1 * t2) ** 2 + t2 ** 2) - math.pi * x ** 2)
        total += np.sum(hermite(n2, sqpi * x) * np.exp(logs))
    return total * h ** 4


# --------------------------------------------------------------------------
# lemma checks


def _grid(half_width: float, h: float) -> np.ndarray:
    k = int(math.ceil(half_width / h))
    return h * np.arange(-k, k + 1)


def fourier_transform_1(n: int, m: int, a2: float, t1: float, t2: float):
    """(lhs, rhs): 3D quadrature over (u12, u13, u23) vs the Hermite closed form."""
    w1, w2, w3 = t1 * t2 / a2, t1 * t2, t2
    # u12 = w1 v1, u13 = w2 v2, u23 = w3 v3; the phase in v1 has frequency w1, in v3 w3
    v1 = _grid(6.5, 1.0 / (w1 + 4.0))[:, None, None]
    v2 = _grid(6.5, 0.25)[None, :, None]
    v3 = _grid(6.5, 1.0 / (w3 + 4.0))[None, None, :]
    h1 = 1.0 / (w1 + 4.0)
    h3 = 1.0 / (w3 + 4.0)
    u12, u13, u23 = w1 * v1, w2 * v2, w3 * v3
    first = (a2 / t2 + 1j * a2 * u12 / (t1 * t2)) ** n
    second = (u23 / t2 + 1j * u13 / (t1 * t2)) ** m
    gauss = np.exp(-math.pi * (v1 ** 2 + v2 ** 2 + v3 ** 2) - 2j * math.pi * (u12 + u23))
    lhs = np.sum(first * second * gauss) * h1 * 0.25 * h3 * w1 * w2 * w3
    x = math.sqrt(math.pi) * (a2 / t2 + t1 * t2 / a2)
    rhs = ((4 * math.pi) ** (-n / 2) * (1j) ** (-m) * t1 ** 2 * t2 ** (m + 3) / a2
           * hermite(n, x) * math.exp(-math.pi * (t1 ** 2 * t2 ** 2 / a2 ** 2 + t2 ** 2)))
    return complex(lhs), complex(rhs)


def mellin_lemma_1(n: int, a: float, b: float, s: complex):
    """(lhs, rhs) of the Hermite Mellin lemma, both by 1D quadrature in log t."""
    s = complex(s)

    def left(u):
        x = a * np.exp(u) + b
        return np.exp(s * u - x ** 2) * hermite(n, x)

    def right(u):
        x = a * np.exp(u) + b
        return np.exp((s - n) * u - x ** 2)

    lo = -40.0 / (s.real - n)
    hi = math.log(6.0 / abs(a) + abs(b) / abs(a) + 1.0) + 1.0
    lhs = integrate(left, [(lo, hi)], h=0.05, tol=1e-12).value
    ratio = (sf.log_gamma(s) / sf.log_gamma(s - n)).to_complex()
    rhs = a ** (-n) * ratio * integrate(right, [(lo, hi)], h=0.05, tol=1e-12).value
    return complex(lhs), complex(rhs)


def mellin_lemma_2(s1: complex, s2: complex):
    """(lhs, rhs) of the two-variable Gaussian Mellin lemma, lhs by 2D quadrature."""
    s1, s2 = complex(s1), complex(s2)

    def fn(u1, u2):
        return np.exp(s1 * u1 + s2 * u2 - math.pi * (np.exp(u1) + np.exp(u2)) ** 2)

    windows = [(-40.0 / s1.real, 2.0), (-40.0 / s2.real, 2.0)]
    lhs = integrate(fn, windows, h=0.1, tol=1e-11).value
    g = sf.log_gamma(s1) * sf.log_gamma(s2) / sf.log_gamma((s1 + s2 + 1) / 2)
    rhs = 2.0 ** (-s1 - s2) * math.pi ** ((1 - s1 - s2) / 2) * g.to_complex()
    return complex(lhs), complex(rhs)


def fourier_transform_2(N: int, a: float):
    """(lhs, rhs) of the Gaussian Fourier lemma on C with dz = 2 dx dy."""
    h = 1.0 / (2 * abs(a) + 5.0)
    x = _grid(5.0, h)[:, None]
    y = _grid(5.0, h)[None, :]
    zbar = x - 1j * y
    vals = zbar ** N * np.exp(-2 * math.pi * (x ** 2 + y ** 2) - 4j * math.pi * a * x)
    lhs = 2.0 * np.sum(vals) * h * h
    rhs = (-1j) ** N * a ** N * math.exp(-2 * math.pi * a * a)
    return complex(lhs), complex(rhs)


def fourier_transform_3(ell: Sequence[int], t1: float, alpha1: float, alpha2: float):
    """(lhs, rhs) of the unipotent Fourier lemma for n = 2 (one complex variable)."""
    l1, l2 = ell
    kappa = l1 + l2
    scale = t1 / alpha2
    f = 2 * scale
    h = 1.0 / (f + 5.0)
    vx = _grid(5.0, h)[:, None]
    vy = _grid(5.0, h)[None, :]
    x, y = scale * vx, scale * vy
    det1 = (x - 1j * y) * alpha2 / t1
    det2 = alpha1 / t1
    vals = det1 ** l1 * det2 ** l2 * np.exp(-2 * math.pi * (vx ** 2 + vy ** 2) - 4j * math.pi * x)
    lhs = 2.0 * np.sum(vals) * (h * scale) ** 2
    rhs = (alpha2 ** -2 * t1 ** 2 * (-1j) ** l1 * t1 ** (2 * l1 - kappa)
           * alpha1 ** (kappa - l1) * alpha2 ** (-l1) * math.exp(-2 * math.pi * t1 ** 2 / alpha2 ** 2))
    return complex(lhs), complex(rhs)


def _rel(lhs, rhs) -> float:
    return abs(lhs - rhs) / abs(rhs)


def lemma_checks(seed: int = 0, cases: int = 4) -> dict:
    """Quadrature checks of the Fourier and Mellin lemmas.

    Returns {lemma: {"max_rel_err": float, "cases": [...]}}, each case being
    (parameters, lhs, rhs, rel_err).
    """
    rng = np.random.default_rng(seed)
    report: dict = {}

    def record(name, params, pair):
        lhs, rhs = pair
        entry = report.setdefault(name, {"max_rel_err": 0.0, "cases": []})
        err = _rel(lhs, rhs)
        entry["cases"].append((params, lhs, rhs, err))
        entry["max_rel_err"] = max(entry["max_rel_err"], err)

    # random points are kept where the transforms are not exponentially small
    # next to the integrand mass; beyond that, cancellation in double precision
    # (not the identities) limits any oscillatory quadrature
    points = [(1.0, 1.0, 1.0)] + [
        (float(rng.uniform(0.8, 1.5)), float(rng.uniform(0.6, 1.2)), float(rng.uniform(0.6, 1.2)))
        for _ in range(cases - 1)]
    for n in range(4):
        for m in range(4):
            for p in points:
                record("fourier_transform_1", (n, m) + p, fourier_transform_1(n, m, *p))
    for n in range(4):
        for a, b in [(1.3, 0.4), (-0.7, 0.5), (0.9, -0.6)]:
            s = n + 1.2 + 0.3j
            record("mellin_1_part_1", (n, a, b, s), mellin_lemma_1(n, a, b, s))
    for s1, s2 in [(1.5, 2.0), (1.2 + 0.5j, 2.3 - 0.4j), (3.0, 1.1)]:
        record("mellin_1_part_2", (s1, s2), mellin_lemma_2(s1, s2))
    for N in range(5):
        for a in (0.5, 1.3, -0.8):
            record("fourier_transform_2", (N, a), fourier_transform_2(N, a))
    for kappa in range(4):
        for l1 in range(kappa + 1):
            t1, al1, al2 = (float(rng.uniform(0.5, 1.0)), float(rng.uniform(0.5, 1.5)),
                            float(rng.uniform(0.8, 1.3)))
            record("fourier_transform_3", ((l1, kappa - l1), t1, al1, al2),
                   fourier_transform_3((l1, kappa - l1), t1, al1, al2))
    return report


# --------------------------------------------------------------------------
# Ishii-Stade self-consistency (rank 2)


def ishii_stade_rhs_integrand(mu: Sequence[complex], w: complex, sigma: complex) -> MBIntegrand:
    b = _Builder()
    z = _lin(0, {b.new_var(): 1})
    _mellin_spherical_into(b, _complex_tuple(mu), [z])
    b.gamma(Kind.C, _comb((z, -HALF), (_lin(w / 2), 1)))
    b.gamma(Kind.C, _comb((z, -HALF), (_lin(sigma), 1)))
    return b.build()


def ishii_stade_consistency(mu: Sequence[complex], w: complex, sigma: complex,
                            margin: float | None = None) -> tuple:
    """(lhs, rhs): (M f_mu)(w) against its expression through an integral in z.

    The contour margin defaults to min(0.5, 0.8 * largest feasible slack),
    since for some (mu, w, sigma) the admissible strip is narrower than 1.
    """
    mu = _complex_tuple(mu)
    if len(mu) != 2:
        raise UnsupportedRank("the consistency check is implemented at rank 2")
    w, sigma = complex(w), complex(sigma)
    lhs = mellin_f_spherical(SphericalParamsC(mu), [w])
    integrand = ishii_stade_rhs_integrand(mu, w, sigma)
    if margin is None:
        margin = _auto_margin(integrand)
    res = eval_mb(integrand, find_contour(integrand, margin=margin))
    g = sf.gamma_C(w / 2 + sum(mu) + sigma) / (sf.gamma_C(mu[0] + sigma) * sf.gamma_C(mu[1] + sigma))
    rhs = 0.25 * g.to_complex() * res.value
    return lhs, rhs
