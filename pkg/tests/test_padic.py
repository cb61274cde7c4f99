import itertools
from fractions import Fraction as F

import pytest
import sympy

from whittaker import padic_whittaker as pw
from whittaker.errors import DomainError, InvalidWeight, LengthMismatch, RepeatedParameter

a, b = sympy.symbols("a b")


def test_interleaves():
    assert pw.interleaves((2, 0), (1,))
    assert not pw.interleaves((2, 2), (1,))
    assert pw.interleaves((3, 1, 0), (3, 0))
    with pytest.raises(LengthMismatch):
        pw.interleaves((2, 1), (1, 0))


def test_interlacing_enumerates_exactly_the_interleaving_weights():
    lam = (3, 1, 0)
    got = set(pw.interlacing(lam))
    brute = {mu for mu in itertools.product(range(4), repeat=2)
             if mu[0] >= mu[1] and pw.interleaves(lam, mu)}
    assert got == brute


def test_bialternant_examples():
    assert pw.schur_bialternant((0, 0, 0), ("2", "3", "5")) == 1
    assert pw.equal(pw.schur_bialternant((1, 0), (a, b)), a + b)
    assert pw.schur_bialternant((2, 1), (2, 3)) == 30


def test_bialternant_repeated_parameter():
    with pytest.raises(RepeatedParameter):
        pw.schur_bialternant((1, 0), ("1/2", "1/2"))


def test_branching_examples():
    assert pw.equal(pw.schur_branching((1, 0), (a, 1)), a + 1)
    assert pw.equal(pw.schur_branching((2, 2), (a, a)), a ** 4)


def test_branching_agrees_with_bialternant_on_symbols():
    c = sympy.Symbol("c")
    for lam in [(2, 1, 0), (3, 1, 1), (2, 2, 0)]:
        assert pw.equal(pw.schur_branching(lam, (a, b, c)), pw.schur_bialternant(lam, (a, b, c)))


def test_shintani_value_examples():
    v = pw.shintani_value((0, 0), ("2", "3"))
    assert (v.q_exponent, v.value) == (0, 1)
    v = pw.shintani_value((1, 0), (a, b), 2)
    assert v.q_exponent == F(-1, 2) and pw.equal(v.value, a + b)
    c = sympy.Symbol("c")
    v = pw.shintani_value((1, 1, 1), (a, b, c), 3)
    assert v.q_exponent == 0 and pw.equal(v.value, a * b * c)
    assert pw.shintani_value((1, 0), ("1/2", "3")).to_json() == {"q_exponent": "-1/2", "value": "7/2"}


def test_shintani_length_mismatch():
    with pytest.raises(LengthMismatch):
        pw.shintani_value((1, 0), ("1", "2"), 3)


def test_half_power_value_substitution():
    v = pw.shintani_value((1, 0), ("1/2", "3"))
    assert v.at(4) == sympy.Rational(7, 4)
    with pytest.raises(DomainError):
        pw.HalfPowerValue(F(1, 3), 1)


def test_recursion_examples():
    assert pw.verify_shintani_recursion((1, 0), (a,))
    assert pw.verify_shintani_recursion((2, 1, 0), (2, 3))
    assert pw.verify_shintani_recursion((3, 3, 3), (a, b))
    with pytest.raises(LengthMismatch):
        pw.verify_shintani_recursion((1, 0), (a, b))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_symmetry_under_permutations(n):
    al = [F(2), F(-1, 3), F(5, 7)][:n]
    for lam in pw.weights_up_to(n, 3, -1):
        ref = pw.schur_branching(lam, al)
        for perm in itertools.permutations(al):
            assert pw.schur_branching(lam, perm) == ref


def test_homogeneity():
    al = (F(3, 2), F(-2), F(1, 5))
    c = F(-7, 3)
    for lam in pw.weights_up_to(3, 3, -2):
        lhs = pw.schur_branching(lam, tuple(c * x for x in al))
        assert lhs == c ** lam.size * pw.schur_branching(lam, al)


def test_negative_weights_agree():
    al = (F(2), F(1, 3), F(-4, 5))
    for lam in [(0, -1, -3), (2, 0, -2), (-1, -1, -1)]:
        assert pw.schur_branching(lam, al) == pw.schur_bialternant(lam, al)


def test_gaussian_parameters():
    al = ("1/2+i", "2-3i", "1/3")
    for lam in [(1, 0, 0), (2, 1, 0), (1, 1, -1)]:
        assert pw.equal(pw.schur_branching(lam, al), pw.schur_bialternant(lam, al))
    assert pw.to_text(pw.schur_branching((1, 0), ("i", "1"))) == "1 + I"


def test_invalid_inputs():
    with pytest.raises(InvalidWeight):
        pw.DominantWeight((0, 1))
    with pytest.raises(DomainError):
        pw.SatakeParams(("0", "1"))
    with pytest.raises(DomainError):
        pw.exact(0.5)
    with pytest.raises(DomainError):
        pw.exact(True)


def test_weights_up_to_counts():
    # multisets of size n from top - bottom + 1 values
    assert len(list(pw.weights_up_to(4, 3))) == 35
    assert all(w.entries == tuple(sorted(w.entries, reverse=True)) for w in pw.weights_up_to(3, 2, -2))


def test_delta_exponent():
    assert pw.delta_half_exponent((1, 0)) == F(-1, 2)
    assert pw.delta_half_exponent((2, 1, 0)) == -2
    assert pw.delta_half_exponent((5, 5, 5)) == 0
