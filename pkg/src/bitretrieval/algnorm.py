"""Algebraic norm of quotient-ring elements.

N(a) is the product of a's images under all N-1 embeddings, equivalently the
resultant of Phi_N with a's representing polynomial.  The exact routine works
modulo a stock of primes p = 1 (mod N), where x^N - 1 splits and the
embeddings become evaluations at powers of an order-N element; a rigorous
AM-GM magnitude bound then fixes the integer by CRT.  Everything is big-int
exact; the float variant just sums log moduli over the transform.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .rings import (
    CycloElement,
    RingElement,
    forward_transform,
    is_odd_prime,
    perp_norm_exact,
)

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


_prime_stock: dict[int, list[tuple[int, list[int]]]] = {}


def _eval_points(n: int, count: int):
    """At least `count` primes p = 1 (mod n), each with the powers g, g^2, ...
    of an order-n element; cached per n."""
    stock = _prime_stock.setdefault(n, [])
    if stock:
        k0 = (stock[-1][0] - 1) // n + 1
    else:
        k0 = (1 << 60) // n + 1
    while len(stock) < count:
        p = k0 * n + 1
        k0 += 1
        if not _is_prime(p):
            continue
        g = 1
        a = 2
        while g == 1:
            g = pow(a, (p - 1) // n, p)
            a += 1
        powers = [1] * n
        for j in range(1, n):
            powers[j] = powers[j - 1] * g % p
        stock.append((p, powers[1:]))  # g^1 .. g^{n-1}
    return stock[:count]


def _coeff_list(a):
    if isinstance(a, CycloElement):
        if a.domain != "integer":
            raise ValueError("exact algebraic norm needs integer coefficients")
        return [0] + [int(x) for x in a.coeffs.tolist()], a.n
    if isinstance(a, RingElement):
        if a.domain != "integer":
            raise ValueError("exact algebraic norm needs integer coefficients")
        return [int(x) for x in a.coeffs.tolist()], a.n
    raise TypeError("expected CycloElement or RingElement")


def algebraic_norm(a) -> int:
    """Exact algebraic norm of an integer quotient element.

    Integer cyclic elements are accepted too; the value only depends on the
    image in the quotient.  Nonzero elements have positive norm (the
    embeddings come in conjugate pairs).
    """
    coeffs, n = _coeff_list(a)
    if not is_odd_prime(n):
        raise ValueError("algebraic norm needs odd prime N")
    if all(c == coeffs[0] for c in coeffs):
        return 0  # multiples of Phi_N map to zero
    # sum_j |sigma_j|^2 = N * perp, so |N(a)| <= (N * perp / (N-1))^{(N-1)/2}
    pe = perp_norm_exact(a)
    q = (pe * n / (n - 1)) ** (n - 1)
    bound = _isqrt_ceil(q.numerator // q.denominator + 1) + 1
    pts = _eval_points(n, 1)
    modulus = pts[0][0]
    need = 1
    while modulus <= 2 * bound:
        need += 1
        pts = _eval_points(n, need)
        modulus = 1
        for p, _ in pts:
            modulus *= p
    residues = []
    for p, powers in pts:
        cs = [c % p for c in reversed(coeffs)]  # descending for Horner
        acc = 1
        for x in powers:
            v = 0
            for c in cs:
                v = (v * x + c) % p
            acc = acc * v % p
        residues.append(acc)
    value = _crt(residues, [p for p, _ in pts], modulus)
    if value > modulus // 2:
        value -= modulus
    if value < 0:
        raise ArithmeticError("algebraic norm came out negative; bound logic broken")
    return value


def _isqrt_ceil(x: int) -> int:
    r = math.isqrt(x)
    return r if r * r >= x else r + 1


def _crt(residues, primes, modulus):
    total = 0
    for r, p in zip(residues, primes):
        m = modulus // p
        total += r * m * pow(m, -1, p)
    return total % modulus


def log_algebraic_norm(a) -> float:
    """Float log of the algebraic norm via the transform: sum of log |sigma_j|."""
    s = forward_transform(a)
    mags = np.abs(s.sigma)
    if np.any(mags <= 0):
        return float("-inf")
    return float(np.sum(np.log(mags)))
