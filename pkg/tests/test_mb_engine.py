import json
import math
from fractions import Fraction

import numpy as np
import pytest

from whittaker import special_fn as sf
from whittaker.errors import InfeasibleContour, PoleOnContour, Unconverged
from whittaker.mb_engine import (ContourSpec, GammaFactor, Kind, MBIntegrand, Position,
                                 PowerFactor, barnes_check, barnes_integrand, barnes_rhs,
                                 check_contour, eval_mb, find_contour, min_slack)

HALF = Fraction(1, 2)


def cahen_mellin(x):
    # Gamma(s) x^{-s}; inverse Mellin transform of e^{-x}
    return MBIntegrand(1, gammas=[GammaFactor(Kind.PLAIN, 0, [1])],
                       powers=[PowerFactor(x, 0, [-1])])


def test_cahen_mellin_inversion():
    r = eval_mb(cahen_mellin(1.7), ContourSpec((1.0,)))
    assert abs(r.value - math.exp(-1.7)) < 1e-10
    assert r.error_estimate < 1e-9


def test_find_contour_single_constraint():
    c = find_contour(cahen_mellin(2.0), margin=0.5)
    assert c.sigma[0] == pytest.approx(0.5)
    assert min_slack(cahen_mellin(2.0), c.sigma) >= 0.5 - 1e-12


def test_find_contour_conflicting_constraints():
    bad = MBIntegrand(1, gammas=[GammaFactor(Kind.PLAIN, 0, [1]), GammaFactor(Kind.PLAIN, -1, [-1])])
    with pytest.raises(InfeasibleContour):
        find_contour(bad)


def test_contour_left_of_a_pole_is_rejected():
    with pytest.raises(InfeasibleContour):
        eval_mb(cahen_mellin(1.0), ContourSpec((-0.5,)))


def test_pole_on_contour_is_rejected():
    # feasible in principle, but the node at t = 0 sits on the pole at s = 0
    with pytest.raises(PoleOnContour):
        eval_mb(cahen_mellin(1.0), ContourSpec((1e-12,)))


def test_bessel_mellin_barnes_identity():
    z = 0.6
    integrand = MBIntegrand(1, prefactor=sf.LogComplex(-4 * math.log(2), 0.0), gammas=[
        GammaFactor(Kind.C, z / 4, [HALF]), GammaFactor(Kind.C, -z / 4, [HALF])],
        powers=[PowerFactor(1.0, 0, [-1])])
    r = eval_mb(integrand, find_contour(integrand))
    want = sf.bessel_k(z / 2, 4 * math.pi)
    assert abs(r.value - want) / abs(want) < 1e-9


def test_contour_shift_invariance():
    integrand = barnes_integrand(0.8, 1.1 + 0.2j, 0.9, 1.3 - 0.1j)
    a = eval_mb(integrand, ContourSpec((0.3,)))
    b = eval_mb(integrand, ContourSpec((-0.4,)))
    assert abs(a.value - b.value) / abs(a.value) < 1e-9


def test_barnes_examples():
    lhs, rhs = barnes_check(0.5, 0.5, 0.5, 0.5)
    assert rhs == pytest.approx(8 / math.pi ** 2, rel=1e-13)
    assert abs(lhs - rhs) / abs(rhs) < 1e-8
    lhs, rhs = barnes_check(0.3, 0.7, 0.5, 0.9)
    assert abs(lhs - rhs) / abs(rhs) < 1e-8
    swapped = barnes_check(0.7, 0.3, 0.5, 0.9)
    assert swapped[1] == pytest.approx(rhs, rel=1e-14)
    assert swapped[0] == pytest.approx(lhs, rel=1e-12)


def test_barnes_needs_positive_parameters():
    with pytest.raises(InfeasibleContour):
        barnes_check(-0.1, 0.5, 0.5, 0.5)


def test_conjugation():
    integrand = barnes_integrand(0.4 + 0.3j, 1.2 - 0.5j, 0.7 + 0.1j, 0.9)
    c = find_contour(integrand)
    v = eval_mb(integrand, c).value
    w = eval_mb(integrand.conjugate(), c).value
    assert abs(w - v.conjugate()) / abs(v) < 1e-12


def test_error_estimate_is_honest():
    integrand = barnes_integrand(0.6, 0.9, 1.1, 0.7 + 0.4j)
    c = ContourSpec((0.0,), height=20, step=0.3)
    coarse = eval_mb(integrand, c)
    fine = eval_mb(integrand, c.refined())
    assert abs(coarse.value - fine.value) <= max(coarse.error_estimate, 1e-15)


def test_refinement_and_unconverged():
    integrand = barnes_integrand(0.6, 0.9, 1.1, 0.7)
    r = eval_mb(integrand, ContourSpec((0.0,), height=6, step=0.5), tol=1e-10)
    assert abs(r.value - barnes_rhs(0.6, 0.9, 1.1, 0.7)) < 1e-9
    with pytest.raises(Unconverged):
        eval_mb(integrand, ContourSpec((0.0,), height=3, step=1.0), tol=1e-14, budget=0)


def test_batched_power_base():
    xs = np.array([0.5, 1.0, 2.5])
    integrand = MBIntegrand(1, gammas=[GammaFactor(Kind.PLAIN, 0, [1])],
                            powers=[PowerFactor(xs, 0, [-1])])
    r = eval_mb(integrand, ContourSpec((1.0,)))
    assert np.allclose(r.value, np.exp(-xs), rtol=1e-10, atol=0)


def test_construction_invariants():
    with pytest.raises(ValueError):
        MBIntegrand(1, gammas=[GammaFactor(Kind.C, 0, [1, 0])])
    with pytest.raises(ValueError):
        PowerFactor(-1.0, 0, [1])
    with pytest.raises(ValueError):
        # one numerator and one denominator Gamma leave no decay
        MBIntegrand(1, gammas=[GammaFactor(Kind.C, 1, [1]),
                               GammaFactor(Kind.C, 1, [1], Position.DENOMINATOR)])
    with pytest.raises(ValueError):
        ContourSpec((0.0,), height=0.0)


def test_json_round_trip():
    integrand = MBIntegrand(2, prefactor=sf.LogComplex(0.3, -1.0), gammas=[
        GammaFactor(Kind.C, 0.2 + 0.1j, [HALF, 0]), GammaFactor(Kind.R, 1, [0, 1]),
        GammaFactor(Kind.PLAIN, 2, [1, -1]),
        GammaFactor(Kind.C, 3, [HALF, HALF], Position.DENOMINATOR)],
        powers=[PowerFactor(1.5, 0.5j, [-1, 0])])
    doc = json.loads(json.dumps(integrand.to_json()))
    assert MBIntegrand.from_json(doc) == integrand
    assert doc["gammas"][0]["coeffs"] == ["1/2", "0/1"]


def test_permuted_evaluates_the_same():
    integrand = MBIntegrand(2, gammas=[
        GammaFactor(Kind.C, 0.5, [1, 0]), GammaFactor(Kind.C, 0.3, [0, 1]),
        GammaFactor(Kind.C, 0.4, [-HALF, -HALF])], powers=[PowerFactor(1.3, 0, [-1, 1])])
    c = find_contour(integrand, margin=0.2)
    p = integrand.permuted((1, 0))
    cp = ContourSpec(tuple(reversed(c.sigma)), c.height, c.step)
    check_contour(p, cp)
    a, b = eval_mb(integrand, c).value, eval_mb(p, cp).value
    assert abs(a - b) / abs(a) < 1e-12
