"""A walking tour of the cyclic ring arithmetic.

Binary sequences live in R = Re[x]/<x^N - 1> as vectors of +-1/2; their
cyclic autocorrelation is the product with the index-reversed conjugate.
Subtracting the constant coordinate drops everything into the quotient ring
O, where the same autocorrelation becomes an exact integer object -- the
public side of every construction in this package.
"""

import numpy as np

from bitretrieval.algnorm import algebraic_norm
from bitretrieval.instances import (
    hadamard_legendre,
    is_perfect,
    norm_bound,
    pi_sequence,
    random_binary,
)
from bitretrieval.rings import (
    autocorrelation,
    conjugate,
    lift_binary,
    perp_norm,
    quotient_map,
    ring_multiply,
)


def main():
    print("=== the reference instance: binary digits of pi at N=23 ===")
    key = pi_sequence(23)
    print("coefficients:", key.element.coeffs.tolist())
    lifted = lift_binary(key.element)
    print("lifted +-1/2 form:", (2 * lifted.coeffs).astype(int).tolist())

    alpha = autocorrelation(key.element)
    print("\nexact autocorrelation (quotient coordinates):")
    print(alpha.coeffs.tolist())
    print("self-conjugate:", conjugate(alpha) == alpha)

    # the autocorrelation forgets which rotation/reflection produced it
    rolled = np.roll(lifted.coeffs, 5)
    from bitretrieval.rings import RingElement, drop_binary

    other = drop_binary(RingElement(rolled))
    print("rotation has the same autocorrelation:",
          autocorrelation(other) == alpha)

    print("\n=== algebraic norm: the size of the hidden ideal ===")
    print("N(pi_23):", algebraic_norm(key.element))
    print("binary bound ((N+1)/4)^((N-1)/2):", norm_bound(23))
    rand = random_binary(23, seed=1)
    print("a random key's norm:", algebraic_norm(rand.element))

    print("\n=== perfect sequences saturate the bound ===")
    leg = hadamard_legendre(23)
    params = is_perfect(leg)
    print("Legendre N=23 difference-set parameters:", params)
    print("norm:", algebraic_norm(leg.element), "== bound:",
          algebraic_norm(leg.element) == norm_bound(23))
    print("a random key is perfect:", is_perfect(rand) is not None)

    print("\n=== multiplication is cyclic convolution ===")
    a = random_binary(23, seed=2).element
    b = random_binary(23, seed=3).element
    prod = ring_multiply(a, b)
    print("product coefficients (first 8):", prod.coeffs.tolist()[:8])
    print("perp norm of the product: %.1f" % perp_norm(prod))
    print("perp norm of each factor: %.2f, %.2f" % (perp_norm(a), perp_norm(b)))


if __name__ == "__main__":
    main()
