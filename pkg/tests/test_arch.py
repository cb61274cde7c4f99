import itertools
import math

import mpmath
import numpy as np
import pytest

from whittaker import arch_whittaker as aw
from whittaker.errors import DomainError, InvalidWeight, LengthMismatch, UnsupportedRank


def rel(a, b):
    return abs(a - b) / abs(b)


def sph(*nu):
    return aw.SphericalParamsC(nu)


def pt(*a):
    return aw.TorusPointC(a)


# -- spherical functions ------------------------------------------------------


def test_rank2_spherical_is_k_bessel():
    want = float(mpmath.besselk(0, 4 * mpmath.pi))
    assert aw.f_spherical(sph(0, 0), pt(1.0)) == pytest.approx(want, rel=1e-12)


def test_rank2_spherical_symmetry_and_positivity():
    a = aw.f_spherical(sph(0.3, -0.1j), pt(0.7))
    b = aw.f_spherical(sph(-0.1j, 0.3), pt(0.7))
    assert rel(a, b) < 1e-10
    for x in (0.2, 1.0, 3.0):
        v = aw.f_spherical(sph(0.4, -0.1), pt(x))
        assert abs(v.imag) < 1e-15 * abs(v) and v.real > 0


def test_rank3_spherical_matches_direct_integral():
    nu = (0.2, 0.0, -0.2)
    mb = aw.f_spherical(sph(*nu), pt(1.0, 1.0))
    direct = aw.whittaker_c_direct(aw.MinimalTypeParamsC(nu, 0), aw.WeightIndexC((0, 0, 0)),
                                   pt(1.0, 1.0))
    assert rel(mb, direct) < 1e-5


@pytest.mark.parametrize("nu", [(0.2, 0.0, -0.2), (0.1, 0.3j, -0.1 - 0.3j), (0.25, -0.05, 0.1)])
def test_rank3_weyl_symmetry(nu):
    ref = aw.f_spherical(sph(*nu), pt(1.0, 1.0))
    for perm in itertools.permutations(nu):
        assert rel(aw.f_spherical(sph(*perm), pt(1.0, 1.0)), ref) < 1e-5


def test_rank4_spherical_is_finite_and_symmetric():
    nu = (0.15, 0.05, -0.05, -0.15)
    a = aw.evaluate_spherical(sph(*nu), pt(1.0, 1.0, 1.0))
    b = aw.evaluate_spherical(sph(*reversed(nu)), pt(1.0, 1.0, 1.0))
    assert np.isfinite(a.value) and a.value != 0
    assert rel(a.value, b.value) < 1e-4


def test_rank_limits():
    with pytest.raises(UnsupportedRank):
        aw.f_spherical(sph(0, 0, 0, 0, 0), pt(1, 1, 1, 1))
    with pytest.raises(UnsupportedRank):
        aw.evaluate_minimal(aw.MinimalTypeParamsC((0, 0, 0, 0), 0), aw.WeightIndexC((0, 0, 0, 0)),
                            pt(1, 1, 1))
    with pytest.raises(UnsupportedRank):
        aw.mellin_f_spherical(sph(0, 0, 0, 0), [1, 2, 3])


def test_parameter_validation():
    with pytest.raises(DomainError):
        pt(1.0, -0.5)
    # the weight index must sum to kappa
    with pytest.raises(InvalidWeight):
        aw.evaluate_minimal(aw.MinimalTypeParamsC((0, 0, 0), 2), aw.WeightIndexC((1, 0, 0)),
                            pt(1, 1))
    with pytest.raises(LengthMismatch):
        aw.f_spherical(sph(0, 0, 0), pt(1.0))


# -- Mellin transforms -------------------------------------------------------


def test_rank1_mellin_is_one():
    assert aw.mellin_f_spherical(sph(0.3)) == 1


def _mellin_quadrature(mu, z):
    u = np.arange(-40.0 / max(z.real, 0.5), 3.0, 0.02)
    f = aw.f_spherical_n2(mu, np.exp(u))
    return complex(np.sum(f * np.exp(z * u)) * 0.02)


def test_rank2_mellin_against_k_bessel_moment():
    # int a^2 K_0(4 pi a) d*a
    want = float(mpmath.quad(lambda a: a * mpmath.besselk(0, 4 * mpmath.pi * a), [0, mpmath.inf]))
    assert rel(aw.mellin_f_spherical(sph(0, 0), [2.0]), want) < 1e-10


def test_rank2_mellin_closed_form_against_quadrature():
    rng = np.random.default_rng(3)
    for _ in range(10):
        m = complex(rng.uniform(-0.3, 0.3), rng.uniform(-0.5, 0.5))
        mu = (m, -m + rng.uniform(-0.2, 0.2))
        z = complex(rng.uniform(1.0, 3.0), rng.uniform(-2, 2))
        assert rel(aw.mellin_f_spherical(sph(*mu), [z]), _mellin_quadrature(mu, z)) < 1e-8


def test_mellin_outside_tube():
    with pytest.raises(DomainError):
        aw.mellin_f_spherical(sph(0.3, -0.3), [0.4])


def test_rank3_mellin_is_finite_inside_tube():
    v = aw.mellin_f_spherical(sph(0.1, 0.05j, -0.1), [2.0, 2.5])
    assert np.isfinite(v) and v != 0


# -- minimal K-type functions -----------------------------------------------


def test_kappa_zero_integrand_is_the_spherical_one_after_shift():
    nu = (0.1, 0.2j, -0.1)
    p, ell, a = aw.MinimalTypeParamsC(nu, 0), aw.WeightIndexC((0, 0, 0)), pt(1.0, 0.7)
    bare = aw.whittaker_c_integrand(p, ell, a, twist=False)
    spherical = aw.ishii_stade_integrand(sph(*nu), a)
    nz = bare.nvars - 2
    moved = bare.shifted([0] * nz + [2 * i * nu[0] for i in (1, 2)])
    assert aw.same_structure(moved, spherical, compare_powers=False)
    assert not aw.same_structure(bare, spherical, compare_powers=False)
    assert aw.same_structure(aw.whittaker_c_integrand(p, ell, a), spherical)


def test_rank2_direct_reproduces_bessel():
    # the minimal-type normalization is 2^4 times the K-Bessel form at kappa = 0
    nu = (0.3, -0.1 + 0.2j)
    p, w = aw.MinimalTypeParamsC(nu, 0), aw.WeightIndexC((0, 0))
    direct = aw.whittaker_c_direct(p, w, pt(0.8))
    assert rel(direct, 16 * aw.f_spherical(sph(*nu), pt(0.8))) < 1e-10
    assert rel(aw.whittaker_c_mb(p, w, pt(0.8)), direct) < 1e-8


@pytest.mark.parametrize("ell", [(1, 0), (0, 1)])
def test_rank2_kappa1_mb_against_direct(ell):
    p, w = aw.MinimalTypeParamsC((0.1, 0.2j), 1), aw.WeightIndexC(ell)
    assert rel(aw.whittaker_c_mb(p, w, pt(1.0)), aw.whittaker_c_direct(p, w, pt(1.0))) < 1e-8


def test_rank3_kappa2_mb_against_direct():
    p, w = aw.MinimalTypeParamsC((0.1, 0.2j, -0.1), 2), aw.WeightIndexC((0, 0, 2))
    assert rel(aw.whittaker_c_mb(p, w, pt(1.0, 1.0)), aw.whittaker_c_direct(p, w, pt(1.0, 1.0))) < 1e-5


def test_batched_direct_matches_pointwise():
    p, w = aw.MinimalTypeParamsC((0.2, -0.2), 2), aw.WeightIndexC((1, 1))
    xs = np.array([0.5, 1.0, 2.0])
    batch = aw.evaluate_direct(p, w, [xs]).value
    single = [aw.whittaker_c_direct(p, w, pt(x)) for x in xs]
    assert np.allclose(batch, single, rtol=1e-10, atol=0)


def test_weight_index_enumeration():
    assert len(aw.WeightIndexC.all_for(3, 2)) == 6
    assert aw.WeightIndexC((1, 0, 2)).partial_sums == (1, 1)


# -- GL_3(R) -----------------------------------------------------------------


def test_miyazaki_kappa2_against_direct():
    p = aw.MiyazakiParams(2, 0.0)
    mb, direct = aw.miyazaki_mb(p, 1.0, 1.0), aw.miyazaki_direct(p, 1.0, 1.0)
    assert set(mb) == {(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)}
    for mono in mb:
        assert rel(mb[mono], direct[mono]) < 1e-6


def test_miyazaki_mirror_monomials_have_equal_moduli():
    out = aw.miyazaki_mb(aw.MiyazakiParams(3, 0.0), 1.0, 1.0)
    for (n1, n2, n3), v in out.items():
        assert abs(v) == pytest.approx(abs(out[(n3, n2, n1)]), rel=1e-9)


def test_miyazaki_integral_real_for_symmetric_indices():
    v = aw.miyazaki_i(aw.MiyazakiParams(2, 0.0), 1, 0, 1, 0.8, 1.2).value
    assert abs(v.imag) < 1e-14 * abs(v)


def test_miyazaki_mellin_closed_form():
    p = aw.MiyazakiParams(2, 0.0)
    for mono in [(1, 0, 1), (0, 2, 0)]:
        closed = aw.miyazaki_mellin_closed(p, *mono, 2.0, 2.0)
        assert rel(aw.miyazaki_mellin_quadrature(p, *mono, 2.0, 2.0), closed) < 1e-6


def test_miyazaki_needs_kappa_two():
    with pytest.raises(InvalidWeight):
        aw.MiyazakiParams(1, 0.0)


# -- lemmas and the Ishii-Stade identity -------------------------------------


def test_gaussian_fourier_fixes_the_measure():
    lhs, rhs = aw.fourier_transform_2(0, 0.5)
    assert rhs == pytest.approx(math.exp(-math.pi / 2))
    assert rel(lhs, rhs) < 1e-10


def test_fourier_lemma_examples():
    lhs, rhs = aw.fourier_transform_1(0, 0, 1.0, 1.0, 1.0)
    assert rel(lhs, rhs) < 1e-8
    lhs, rhs = aw.fourier_transform_1(2, 1, 1.0, 1.0, 1.0)
    assert rel(lhs, rhs) < 1e-8


def test_lemma_report_shape():
    rep = aw.lemma_checks(seed=1, cases=2)
    assert set(rep) == {"fourier_transform_1", "mellin_1_part_1", "mellin_1_part_2",
                        "fourier_transform_2", "fourier_transform_3"}
    assert all(entry["max_rel_err"] < 1e-7 for entry in rep.values())


def test_ishii_stade_consistency():
    lhs, rhs = aw.ishii_stade_consistency((0.3, -0.3), 2.0, 1.0)
    assert rel(lhs, rhs) < 1e-7
    _, rhs2 = aw.ishii_stade_consistency((0.3, -0.3), 2.0, 1.6)
    assert rel(rhs2, rhs) < 1e-7
    lhs_s, rhs_s = aw.ishii_stade_consistency((-0.3, 0.3), 2.0, 1.0)
    assert lhs_s == pytest.approx(lhs, rel=1e-14)
    assert rel(rhs_s, rhs) < 1e-12
