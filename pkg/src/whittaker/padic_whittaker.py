"""Spherical Whittaker functions of unramified principal series on GL_n over
a non-Archimedean field, in closed form.

On the dominant torus element diag(p^lam_1, ..., p^lam_n) the normalized
spherical Whittaker function equals delta^{1/2} times the Schur polynomial
s_lam evaluated at the Satake parameters.  Everything here is exact: values
are ``Fraction`` for rational parameters and sympy expressions otherwise
(Gaussian rationals or symbols), and the residue field size q stays symbolic
through a half-integer exponent.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import sympy

from .errors import DomainError, InvalidWeight, LengthMismatch, RepeatedParameter


def exact(x):
    """Coerce ``x`` to an exact scalar: Fraction when rational, else sympy.

    Strings such as ``"3/4"``, ``"1/2+I"`` or ``"a"`` are accepted.  Floats
    are rejected, since an exact identity checked in floating point proves
    nothing.
    """
    if isinstance(x, bool):
        raise DomainError("booleans are not exact scalars")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, float):
        raise DomainError(f"float {x!r} is not exact; pass a string like '1/3'")
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError:
            x = sympy.sympify(_gaussian_syntax(x) if _looks_gaussian(x) else x)
    if isinstance(x, sympy.Basic):
        if x.is_Rational:
            return Fraction(int(x.p), int(x.q))
        if x.has(sympy.Float):
            raise DomainError(f"{x} contains a float")
        return x
    raise DomainError(f"cannot read {x!r} as an exact scalar")


def _looks_gaussian(s: str) -> bool:
    # "1/2+3i" style input; leave genuine symbol names alone
    t = s.replace(" ", "")
    return t.endswith("i") and not any(c.isalpha() for c in t[:-1])


def _gaussian_syntax(s: str) -> str:
    s = re.sub(r"(\d)\s*i", r"\1*I", s)
    return re.sub(r"\bi\b", "I", s)


def simplify(x):
    """Canonical form of an exact value: expanded Gaussian rational or factored."""
    if isinstance(x, Fraction):
        return x
    x = sympy.sympify(x)
    if x.free_symbols:
        x = sympy.factor(sympy.cancel(x))
    else:
        x = sympy.expand(sympy.radsimp(sympy.expand(x)))
    if x.is_Rational:
        return Fraction(int(x.p), int(x.q))
    return x


def to_text(x) -> str:
    """Render an exact value as 'num/den' (or sympy's string form)."""
    x = simplify(x)
    if isinstance(x, Fraction):
        return str(x)
    return str(x).replace("**", "^")


def equal(x, y) -> bool:
    d = simplify(x - y) if not (isinstance(x, Fraction) and isinstance(y, Fraction)) else x - y
    return d == 0


@dataclass(frozen=True)
class DominantWeight:
    """A non-increasing integer vector, i.e. a dominant weight of GL_n."""

    entries: tuple

    def __post_init__(self):
        ent = tuple(int(e) for e in self.entries)
        if any(int(e) != e for e in self.entries):
            raise InvalidWeight("weights must be integers")
        if any(a < b for a, b in zip(ent, ent[1:])):
            raise InvalidWeight(f"{ent} is not non-increasing")
        object.__setattr__(self, "entries", ent)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def size(self) -> int:
        return sum(self.entries)

    def shifted(self, m: int) -> "DominantWeight":
        return DominantWeight(tuple(e + m for e in self.entries))


@dataclass(frozen=True)
class SatakeParams:
    """Nonzero exact Satake parameters alpha_1, ..., alpha_n."""

    alphas: tuple

    def __post_init__(self):
        al = tuple(exact(a) for a in self.alphas)
        if any(a == 0 for a in al):
            raise DomainError("Satake parameters must be nonzero")
        object.__setattr__(self, "alphas", al)

    def __len__(self):
        return len(self.alphas)


@dataclass(frozen=True)
class HalfPowerValue:
    """The quantity q^{q_exponent} * value with q left symbolic."""

    q_exponent: Fraction
    value: object

    def __post_init__(self):
        e = Fraction(self.q_exponent)
        if e.denominator not in (1, 2):
            raise DomainError("q exponent must be a half-integer")
        object.__setattr__(self, "q_exponent", e)

    def to_json(self) -> dict:
        return {"q_exponent": str(self.q_exponent), "value": to_text(self.value)}

    def at(self, q):
        """Substitute a concrete q (exact if q is a perfect square or the exponent is integral)."""
        e = self.q_exponent
        if e.denominator == 1:
            return exact(q) ** int(e) * self.value
        return sympy.sqrt(sympy.Rational(str(exact(q)))) ** int(2 * e) * sympy.sympify(
            self.value if not isinstance(self.value, Fraction) else sympy.Rational(
                self.value.numerator, self.value.denominator))


def _weight(lam) -> DominantWeight:
    return lam if isinstance(lam, DominantWeight) else DominantWeight(tuple(lam))


def _satake(alpha) -> SatakeParams:
    return alpha if isinstance(alpha, SatakeParams) else SatakeParams(tuple(alpha))


def interleaves(lam, mu) -> bool:
    """True iff lam_i >= mu_i >= lam_{i+1} for every i (written lam > mu)."""
    lam, mu = _weight(lam), _weight(mu)
    if len(lam) != len(mu) + 1:
        raise LengthMismatch(f"need len(lam) = len(mu) + 1, got {len(lam)} and {len(mu)}")
    L, M = lam.entries, mu.entries
    return all(L[i] >= M[i] >= L[i + 1] for i in range(len(M)))


def interlacing(lam) -> Iterator[tuple]:
    """All mu with lam > mu, in lexicographically decreasing order."""
    L = _weight(lam).entries
    ranges = [range(L[i], L[i + 1] - 1, -1) for i in range(len(L) - 1)]
    yield from itertools.product(*ranges)


def _det(rows: list):
    # fraction-free-ish Gaussian elimination over an exact field
    m = [list(r) for r in rows]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if not _is_zero(m[r][c])), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        p = m[c][c]
        det = det * p
        for r in range(c + 1, n):
            f = m[r][c] / p
            if not _is_zero(f):
                for k in range(c, n):
                    m[r][k] = m[r][k] - f * m[c][k]
    return det


def _is_zero(x) -> bool:
    if isinstance(x, Fraction):
        return x == 0
    return sympy.simplify(x) == 0


def _symbolic(alphas) -> bool:
    return any(not isinstance(a, Fraction) for a in alphas)


def schur_bialternant(lam, alpha):
    """s_lam(alpha) as det(alpha_i^{lam_j+n-j}) / det(alpha_i^{n-j}).

    Negative entries are fine since all alpha_i are nonzero.  Raises
    RepeatedParameter when two parameters coincide.
    """
    lam, alpha = _weight(lam), _satake(alpha)
    if len(lam) != len(alpha):
        raise LengthMismatch("weight and Satake parameters differ in length")
    al = alpha.alphas
    n = len(al)
    for i, j in itertools.combinations(range(n), 2):
        if _is_zero(al[i] - al[j]):
            raise RepeatedParameter(f"alpha_{i + 1} = alpha_{j + 1}")
    L = lam.entries
    if _symbolic(al):
        num = sympy.Matrix(n, n, lambda i, j: sympy.sympify(_sym(al[i])) ** (L[j] + n - 1 - j)).det()
        den = sympy.prod([_sym(al[i]) - _sym(al[j]) for i in range(n) for j in range(i + 1, n)])
        return simplify(num / den)
    num = _det([[a ** (L[j] + n - 1 - j) for j in range(n)] for a in al])
    # the Vandermonde determinant, in closed form
    den = Fraction(1)
    for i in range(n):
        for j in range(i + 1, n):
            den *= al[i] - al[j]
    return num / den


def _sym(x):
    return sympy.Rational(x.numerator, x.denominator) if isinstance(x, Fraction) else x


def schur_branching(lam, alpha):
    """s_lam(alpha) via s_lam(a_1..a_n) = sum_{lam > mu} a_n^{|lam|-|mu|} s_mu(a_1..a_{n-1}).

    Repeated parameters are allowed.  Negative weights are first shifted to
    be nonnegative and the central character divided back out afterwards.
    """
    lam, alpha = _weight(lam), _satake(alpha)
    if len(lam) != len(alpha):
        raise LengthMismatch("weight and Satake parameters differ in length")
    al = alpha.alphas
    shift = max(0, -lam.entries[-1]) if len(lam) else 0
    if shift:
        lam = lam.shifted(shift)
    cache: dict = {}  # local to this call, keyed by (weight, prefix length)

    def rec(L: tuple, k: int):
        key = (L, k)
        if key in cache:
            return cache[key]
        if k == 1:
            out = al[0] ** L[0]
        else:
            a = al[k - 1]
            size = sum(L)
            out = Fraction(0)
            for mu in interlacing(L):
                out = out + a ** (size - sum(mu)) * rec(mu, k - 1)
        cache[key] = out
        return out

    if len(lam) == 0:
        return Fraction(1)
    val = rec(lam.entries, len(lam))
    if shift:
        prod = Fraction(1)
        for a in al:
            prod = prod * a
        val = val / prod ** shift
    return simplify(val) if _symbolic(al) else val


def delta_half_exponent(lam) -> Fraction:
    """Exponent e with delta_B^{1/2}(p^lam) = q^e, namely -sum lam_i (n-2i+1)/2."""
    L = _weight(lam).entries
    n = len(L)
    return Fraction(-sum(l * (n - 2 * i + 1) for i, l in enumerate(L, start=1)), 2)


def shintani_value(lam, alpha, n: int | None = None) -> HalfPowerValue:
    """W(p^lam) = delta^{1/2}(p^lam) * s_lam(alpha) with q symbolic."""
    lam, alpha = _weight(lam), _satake(alpha)
    if n is None:
        n = len(lam)
    if not (len(lam) == n == len(alpha)):
        raise LengthMismatch(f"need len(lam) = n = len(alpha), got {len(lam)}, {n}, {len(alpha)}")
    return HalfPowerValue(delta_half_exponent(lam), schur_branching(lam, alpha))


def verify_shintani_recursion(lam, alpha) -> bool:
    """Check s_lam(alpha, 1) = sum_{lam > mu} s_mu(alpha) exactly.

    This is the unramified Whittaker recursion from GL_n to GL_{n+1} once
    the modulus characters have been cancelled.  The left side uses the
    bialternant whenever (alpha, 1) has distinct entries, so the two sides
    come from independent evaluators.
    """
    lam, alpha = _weight(lam), _satake(alpha)
    if len(lam) != len(alpha) + 1:
        raise LengthMismatch("need len(lam) = len(alpha) + 1")
    ext = SatakeParams(alpha.alphas + (Fraction(1),))
    try:
        lhs = schur_bialternant(lam, ext)
    except RepeatedParameter:
        lhs = schur_branching(lam, ext)
    rhs = Fraction(0)
    for mu in interlacing(lam):
        rhs = rhs + (schur_bialternant(mu, alpha) if _distinct(alpha.alphas)
                     else schur_branching(mu, alpha))
    return equal(lhs, rhs)


def _distinct(al: Sequence) -> bool:
    return all(not _is_zero(a - b) for a, b in itertools.combinations(al, 2))


def weights_up_to(n: int, top: int, bottom: int = 0) -> Iterator[DominantWeight]:
    """Every dominant weight of length n with entries in [bottom, top]."""
    for combo in itertools.combinations_with_replacement(range(top, bottom - 1, -1), n):
        yield DominantWeight(combo)
