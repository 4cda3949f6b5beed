"""Ring arithmetic: constructors, transforms, convolution, norms, file IO."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bitretrieval.rings import (
    CycloElement,
    DimensionMismatchError,
    DomainError,
    RingElement,
    autocorrelation,
    conjugate,
    drop_binary,
    euclidean_norm,
    forward_transform,
    inverse_transform,
    is_binary,
    is_odd_prime,
    lift_binary,
    perp_norm,
    perp_norm_exact,
    quotient_map,
    read_element,
    ring_multiply,
    round_half_away,
    sigma0,
    std_vector,
    write_element,
)


def naive_cyclic_convolve(a, b):
    """O(N^2) reference convolution, exact on python ints."""
    n = len(a)
    out = [0] * n
    for i in range(n):
        for j in range(n):
            out[(i + j) % n] += a[i] * b[j]
    return out


# ---------------------------------------------------------------------------
# constructors and primality


def test_is_odd_prime():
    assert [p for p in range(50) if is_odd_prime(p)] == [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]
    assert not is_odd_prime(2)
    assert not is_odd_prime(1)
    assert not is_odd_prime(-7)
    assert is_odd_prime(379)
    assert not is_odd_prime(361)


def test_real_ring_needs_odd_prime_length():
    RingElement([0.5] * 23)
    with pytest.raises(DimensionMismatchError):
        RingElement([0.5] * 24)
    with pytest.raises(DimensionMismatchError):
        RingElement([0.5] * 2)


def test_integer_ring_allows_composite_length():
    el = RingElement([1, 0, 1, 1, 0, 0], domain="integer")
    assert el.n == 6
    assert el.coeffs.dtype == object or np.issubdtype(el.coeffs.dtype, np.integer)


def test_unknown_domain_rejected():
    with pytest.raises(DomainError):
        RingElement([0.0] * 5, domain="complex")
    with pytest.raises(DomainError):
        CycloElement([0] * 4, domain="complex")


def test_quotient_ring_dimension_checks():
    CycloElement([1, 2, 3, 4])  # N=5
    with pytest.raises(DimensionMismatchError):
        CycloElement([1, 2, 3])  # N=4 not prime
    with pytest.raises(DimensionMismatchError):
        CycloElement([1, 2, 3, 4], n=7)


def test_elements_immutable():
    el = RingElement([0.5] * 5)
    with pytest.raises(AttributeError):
        el.n = 7
    with pytest.raises((ValueError, RuntimeError)):
        el.coeffs[0] = 9.0


def test_equality_and_hash():
    a = CycloElement([1, 0, -2, 5])
    b = CycloElement([1, 0, -2, 5])
    c = CycloElement([1, 0, -2, 4])
    assert a == b and hash(a) == hash(b)
    assert a != c
    assert a != RingElement([1, 0, -2, 5, 0], domain="integer")


# ---------------------------------------------------------------------------
# standard vectors and the quotient map


def test_std_vector_of_one():
    # the ring identity has quotient coordinates (-1, ..., -1) because the
    # basis omits the 0th power; its standard vector pins slot 0 to zero and
    # must differ from (1, 0, ..., 0) by a constant vector
    one = CycloElement([-1] * 10, n=11)
    v = std_vector(one)
    assert v[0] == 0
    diffs = np.asarray(v, dtype=float) - np.array([1] + [0] * 10)
    assert np.all(diffs == diffs[0])
    assert quotient_map(RingElement(v, domain="integer")) == one


def test_quotient_map_subtracts_constant():
    el = RingElement([3, 1, 4, 1, 5], domain="integer")
    q = quotient_map(el)
    assert q.coeffs.tolist() == [-2, 1, -2, 2]
    # adding a constant does not change the class
    el2 = RingElement([10, 8, 11, 8, 12], domain="integer")
    assert quotient_map(el2) == q


def test_quotient_map_real_domain():
    el = RingElement([0.25, 0.75, -0.25, 0.5, 0.0])
    q = quotient_map(el)
    assert q.domain == "real"
    assert np.allclose(q.coeffs, [0.5, -0.5, 0.25, -0.25])


def test_binary_lift_roundtrip():
    b = CycloElement([1, 0, 0, 1, 0, 1, 1, 0, 1, 0], n=11)
    r = lift_binary(b)
    assert r.domain == "real"
    assert set(np.round(2 * r.coeffs).astype(int).tolist()) <= {-1, 1}
    assert drop_binary(r) == b


def test_is_binary_rejects_constant():
    assert is_binary(RingElement([0.5, -0.5, 0.5, 0.5, -0.5]))
    assert not is_binary(RingElement([0.5] * 5))
    assert not is_binary(RingElement([-0.5] * 5))
    assert not is_binary(RingElement([0.4, -0.5, 0.5, 0.5, -0.5]))


# ---------------------------------------------------------------------------
# transforms and multiplication


def test_transform_roundtrip():
    rng = np.random.default_rng(0)
    el = RingElement(rng.normal(size=29))
    back = inverse_transform(forward_transform(el))
    assert np.allclose(back.coeffs, el.coeffs, atol=1e-12)


def test_sigma0_is_coefficient_sum():
    el = RingElement([1.5, -2.0, 0.25, 0.25, 1.0])
    assert math.isclose(sigma0(el), 1.0)
    assert math.isclose(forward_transform(el).sigma0, 1.0)


def test_spectrum_conjugate_symmetry():
    rng = np.random.default_rng(1)
    s = forward_transform(RingElement(rng.normal(size=13)))
    # real input: sigma_{N-j} is the conjugate of sigma_j
    assert np.allclose(s.sigma[::-1], np.conj(s.sigma), atol=1e-12)


@given(st.integers(0, 2 ** 40 - 1), st.integers(0, 2 ** 40 - 1))
@settings(max_examples=25, deadline=None)
def test_integer_multiply_matches_naive(seed_a, seed_b):
    rng = np.random.default_rng([seed_a, seed_b])
    a = rng.integers(-50, 50, size=11).tolist()
    b = rng.integers(-50, 50, size=11).tolist()
    prod = ring_multiply(RingElement(a, domain="integer"), RingElement(b, domain="integer"))
    assert prod.domain == "integer"
    assert prod.coeffs.tolist() == naive_cyclic_convolve(a, b)


def test_integer_multiply_is_exact_on_big_entries():
    a = [10 ** 12, -3 * 10 ** 11, 7] + [0] * 8
    b = [2, 10 ** 12, -1] + [0] * 8
    prod = ring_multiply(RingElement(a, domain="integer"), RingElement(b, domain="integer"))
    assert prod.coeffs.tolist() == naive_cyclic_convolve(a, b)


def test_real_multiply_matches_naive():
    rng = np.random.default_rng(3)
    a = rng.normal(size=17)
    b = rng.normal(size=17)
    prod = ring_multiply(RingElement(a), RingElement(b))
    assert np.allclose(prod.coeffs, naive_cyclic_convolve(a.tolist(), b.tolist()), atol=1e-9)


def test_quotient_multiply_consistent_with_ring():
    rng = np.random.default_rng(4)
    a = rng.integers(0, 2, size=11).tolist()
    b = rng.integers(0, 2, size=11).tolist()
    ra, rb = RingElement(a, domain="integer"), RingElement(b, domain="integer")
    lhs = ring_multiply(quotient_map(ra), quotient_map(rb))
    rhs = quotient_map(ring_multiply(ra, rb))
    assert lhs == rhs


def test_conjugate_reverses_indices():
    el = RingElement([0, 1, 2, 3, 4], domain="integer")
    assert conjugate(el).coeffs.tolist() == [0, 4, 3, 2, 1]


def test_autocorrelation_is_self_conjugate():
    b = RingElement([0.5, 0.5, -0.5, 0.5, -0.5, -0.5, 0.5])
    alpha = autocorrelation(b)
    assert np.allclose(alpha.coeffs, conjugate(alpha).coeffs, atol=1e-12)
    assert math.isclose(alpha.coeffs[0], 7 / 4)  # peak value N/4


def test_autocorrelation_equals_conjugate_product():
    rng = np.random.default_rng(5)
    b = RingElement(np.where(rng.random(13) < 0.5, -0.5, 0.5))
    alpha = autocorrelation(b)
    prod = ring_multiply(b, conjugate(b))
    assert np.allclose(alpha.coeffs, prod.coeffs, atol=1e-12)


def test_autocorrelation_exact_quotient_path():
    b = CycloElement([1, 0, 1, 1, 0, 1, 0, 0, 1, 0], n=11)
    alpha = autocorrelation(b)
    assert isinstance(alpha, CycloElement) and alpha.domain == "integer"
    # must agree with the real-ring autocorrelation of the +-1/2 lift
    lifted = autocorrelation(lift_binary(b))
    assert quotient_map(RingElement(np.round(4 * lifted.coeffs).astype(int) * 1, domain="integer")) == \
        CycloElement(4 * alpha.coeffs, n=11)


def test_shift_and_reversal_leave_autocorrelation_fixed():
    rng = np.random.default_rng(6)
    bits = np.where(rng.random(19) < 0.5, -0.5, 0.5)
    base = autocorrelation(RingElement(bits))
    for k in (1, 5):
        assert np.allclose(autocorrelation(RingElement(np.roll(bits, k))).coeffs, base.coeffs, atol=1e-12)
    assert np.allclose(autocorrelation(RingElement(bits[::-1].copy())).coeffs, base.coeffs, atol=1e-12)
    assert np.allclose(autocorrelation(RingElement(-bits)).coeffs, base.coeffs, atol=1e-12)


# ---------------------------------------------------------------------------
# norms


def test_perp_norm_matches_exact():
    el = CycloElement([3, -1, 4, -1, 5, -9, 2, 6, -5, 3], n=11)
    exact = perp_norm_exact(el)
    assert isinstance(exact, Fraction)
    assert math.isclose(perp_norm(el), float(exact), rel_tol=1e-12)


def test_perp_norm_drops_constant_direction():
    # adding a multiple of the all-ones vector leaves the perp norm fixed
    base = RingElement([1.0, 2.0, 3.0, 4.0, 5.0])
    shifted = RingElement(base.coeffs + 7.5)
    assert math.isclose(perp_norm(base), perp_norm(shifted), rel_tol=1e-12)
    v = base.coeffs - base.coeffs.mean()
    assert math.isclose(perp_norm(base), float(v @ v), rel_tol=1e-12)


def test_euclidean_norm_squared():
    el = RingElement([3.0, 4.0, 0.0, 0.0, 0.0])
    assert math.isclose(euclidean_norm(el), 25.0)


def test_binary_perp_norm_is_quarter_n():
    # +-1/2 sequences with k ones: perp norm N/4 - (k - N/2)^2/N; for the
    # near-balanced keys used everywhere this stays close to N/4
    b = CycloElement([1, 0, 1, 1, 0, 1], n=7)
    lifted = lift_binary(b)
    k = int(np.sum(lifted.coeffs > 0))
    expect = Fraction(7, 4) - Fraction((2 * k - 7) ** 2, 4 * 7)
    assert math.isclose(perp_norm(lifted), float(expect), rel_tol=1e-12)
    # exact path works on the 0/1 quotient element: same class, integer scale
    assert perp_norm_exact(b) == Fraction(k) - Fraction(k * k, 7)


def test_round_half_away():
    cases = [(0.5, 1), (-0.5, -1), (1.5, 2), (2.5, 3), (-2.5, -3), (0.49, 0), (-0.49, 0), (2.0, 2)]
    for x, want in cases:
        assert round_half_away(x) == want


# ---------------------------------------------------------------------------
# file IO


def test_element_file_roundtrip(tmp_path):
    el = CycloElement([5, -3, 0, 12], n=5)
    path = tmp_path / "el.txt"
    write_element(el, path, comments={"provenance": "unit-test", "kind": "key"})
    back, comments = read_element(path)
    assert back == el
    assert comments["provenance"] == "unit-test"
    assert comments["kind"] == "key"


def test_element_file_roundtrip_real(tmp_path):
    el = RingElement([0.125, -2.5, 3.0, 0.0, 1e-3])
    path = tmp_path / "el.txt"
    write_element(el, path)
    back, comments = read_element(path)
    assert isinstance(back, RingElement) and back.domain == "real"
    assert np.allclose(back.coeffs, el.coeffs, rtol=0, atol=0)
    assert comments == {} or isinstance(comments, dict)


def test_read_element_rejects_garbage(tmp_path):
    path = tmp_path / "junk.txt"
    path.write_text("this is not an element\n")
    with pytest.raises((ValueError, OSError)):
        read_element(path)
