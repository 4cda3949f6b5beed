"""Binary instances: generators, perfection tests, symmetry, norm formulas.

A binary key is a nonzero 0/1 coefficient vector in the quotient ring; its
cyclic-side counterpart has components +-1/2.  Keys carry a provenance tag so
benchmark output can distinguish pi-digit, Legendre, and random instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._pi_digits import PI_BITS
from .algnorm import log_algebraic_norm
from .rings import (
    CycloElement,
    DomainError,
    autocorrelation,
    is_binary,
    is_odd_prime,
    lift_binary,
)

EULER_GAMMA = 0.5772156649015329


@dataclass(frozen=True)
class BinaryKey:
    element: CycloElement
    provenance: str = "random"

    def __post_init__(self):
        el = self.element
        if not isinstance(el, CycloElement) or el.domain != "integer":
            raise DomainError("key element must be an integer quotient element")
        vals = set(int(x) for x in el.coeffs.tolist())
        if not vals <= {0, 1} or 1 not in vals:
            raise DomainError("key coefficients must be 0/1 with at least one 1")

    @property
    def n(self) -> int:
        return self.element.n


@dataclass(frozen=True)
class DifferenceSetParams:
    n: int
    k: int
    lam: int
    hadamard: bool


def pi_sequence(n: int) -> BinaryKey:
    """Key whose N-1 coefficients are the leading binary digits of pi."""
    if not is_odd_prime(n):
        raise ValueError("N must be an odd prime")
    if n - 1 > len(PI_BITS):
        raise ValueError("only %d pi digits are available" % len(PI_BITS))
    bits = [int(c) for c in PI_BITS[: n - 1]]
    return BinaryKey(CycloElement(bits, n=n), provenance="pi")


def hadamard_legendre(n: int) -> BinaryKey:
    """Quadratic-nonresidue indicator key; requires N = 3 (mod 4).

    Coefficient of z^i is (1 - legendre(i, N)) / 2, i.e. 1 exactly at
    nonresidues.  These keys are perfect with the Hadamard parameter set.
    """
    if not is_odd_prime(n) or n % 4 != 3:
        raise ValueError("Legendre construction needs a prime N = 3 (mod 4)")
    bits = [(1 - _legendre(i, n)) // 2 for i in range(1, n)]
    return BinaryKey(CycloElement(bits, n=n), provenance="legendre")


def _legendre(a: int, p: int) -> int:
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def seed_sequence(*entropy) -> np.random.SeedSequence:
    """All randomness derives from numpy's splitmix-style SeedSequence over
    (master seed, stream labels); the same tuple always gives the same draws."""
    flat = []
    for e in entropy:
        flat.append(e & 0xFFFFFFFFFFFFFFFF if isinstance(e, int) else e)
    return np.random.SeedSequence(flat)


def random_binary(n: int, seed=0) -> BinaryKey:
    """Uniform nonzero 0/1 key.  `seed` may be an int or a Generator."""
    if not is_odd_prime(n):
        raise ValueError("N must be an odd prime")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.Generator(
        np.random.PCG64(seed_sequence(seed, 0xB17))
    )
    while True:
        bits = rng.integers(0, 2, size=n - 1)
        if bits.any():
            return BinaryKey(CycloElement(bits.tolist(), n=n), provenance="random")


def _as_binary_element(b) -> CycloElement:
    el = b.element if isinstance(b, BinaryKey) else b
    if not is_binary(el):
        raise DomainError("expected a binary quotient element")
    return el


def is_perfect(b):
    """DifferenceSetParams if the autocorrelation is a rational integer, else None.

    A rational integer m sits at coordinates (-m, ..., -m), so perfection is
    simply all autocorrelation coefficients equal.  The set size k counts the
    positive components of the lifted +-1/2 form including the constant slot.
    """
    el = _as_binary_element(b)
    alpha = autocorrelation(el)
    coeffs = [int(x) for x in alpha.coeffs.tolist()]
    if any(c != coeffs[0] for c in coeffs):
        return None
    n = el.n
    lifted = lift_binary(el)
    k = int(np.sum(lifted.coeffs > 0))
    lam_num = k * k - k
    if lam_num % (n - 1) != 0:
        raise ArithmeticError("perfect element with non-integral lambda")
    lam = lam_num // (n - 1)
    if k - lam != -coeffs[0]:
        raise ArithmeticError("difference-set bookkeeping disagrees with m = k - lambda")
    hadamard = 4 * (k - lam) == n + 1
    return DifferenceSetParams(n=n, k=k, lam=lam, hadamard=hadamard)


def symmetry_related(b1, b2) -> bool:
    """True when the keys agree up to the trivial symmetries.

    On the lifted +-1/2 form those are cyclic rotation, global sign flip, and
    index-reversal conjugation; the orbit (at most 4N patterns) is checked
    exhaustively.
    """
    e1, e2 = _as_binary_element(b1), _as_binary_element(b2)
    if e1.n != e2.n:
        return False
    s1 = np.sign(lift_binary(e1).coeffs).astype(np.int8)
    s2 = np.sign(lift_binary(e2).coeffs).astype(np.int8)
    n = e1.n
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n  # row k = rotation by k
    for base in (s1, s1[(-np.arange(n)) % n]):  # pattern and its conjugate
        rots = base[idx]
        if np.any(np.all(rots == s2, axis=1)) or np.any(np.all(rots == -s2, axis=1)):
            return True
    return False


def norm_bound(n: int):
    """Sharp bound ((N+1)/4)^{(N-1)/2} on binary algebraic norms; exact value,
    integral when N = 3 (mod 4)."""
    b = Fraction(n + 1, 4) ** ((n - 1) // 2)
    return int(b) if b.denominator == 1 else b


def expected_log_norm(n: int) -> float:
    """Mean of log N(beta) over uniform binary keys: (ln(N/4) - gamma) * N / 2."""
    return 0.5 * (math.log(n / 4.0) - EULER_GAMMA) * n


def torus_log_volume(b) -> float:
    """Log volume of the autocorrelation torus: ln 2 + (N-1)/4 ln(8 pi^2 / N)
    plus half the log algebraic norm."""
    el = _as_binary_element(b)
    n = el.n
    return (
        math.log(2.0)
        + 0.25 * (n - 1) * math.log(8.0 * math.pi ** 2 / n)
        + 0.5 * log_algebraic_norm(el)
    )
