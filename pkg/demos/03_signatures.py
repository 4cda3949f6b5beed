"""Signing data with a hidden binary factor.

The private key is a random binary element beta; the public key is its
autocorrelation alpha = beta * conj(beta).  Signing quantizes the data onto
the ideal beta O with minimal movement, and anyone holding alpha can check
that the signed data's quotient image is divisible by it.  Recovering beta
from alpha -- the only way to forge fresh signatures -- is exactly the
sequence-recovery problem the solver demos show to be exponentially hard.
"""

import numpy as np

from bitretrieval.rings import RingElement, quotient_map, ring_multiply
from bitretrieval.signature import (
    default_big_delta,
    fidelity,
    hash_to_element,
    keygen,
    sign,
    verify,
)


def main():
    n = 251
    print("=== key generation at N=%d ===" % n)
    kp = keygen(n, candidates=32, seed=11)
    print("private key ones:", int(kp.private_key.element.coeffs.sum()))
    print("public key is the exact autocorrelation; first coefficients:",
          kp.public_key.coeffs.tolist()[:6])

    print("\n=== signing a document digest ===")
    document = b"wire 4100 units to account 7731 before friday"
    rho = RingElement(hash_to_element(document, n).coeffs.astype(float))
    signed = sign(rho, kp.private_key)
    print("signed element (integers), first 8:", signed.data.coeffs.tolist()[:8])
    print("constant-direction offset epsilon: %+.3f (always within +-1/2)"
          % signed.epsilon)
    print("squared distance moved: %.1f" % signed.distance)
    print("quotient image equals the codeword:",
          quotient_map(signed.data) == signed.codeword)

    print("\n=== verification ===")
    res = verify(signed, kp.public_key, rho=rho,
                 big_delta=default_big_delta(kp.public_key))
    print("accepted:", res.accepted, "| worst integrality deviation %.2e"
          % res.deviation)

    tampered = signed.data.coeffs.tolist()
    tampered[100] += 1
    bent = RingElement(tampered, domain="integer")
    from bitretrieval.signature import SignedElement

    res2 = verify(SignedElement(bent, signed.codeword, signed.quantizer,
                                signed.epsilon, 0, signed.distance),
                  kp.public_key)
    print("after a +-1 tweak: accepted=%s, reason=%s" % (res2.accepted, res2.reason))

    print("\n=== why a counterfeit key does not help ===")
    # any multiple beta*g also divides the data, but quantizing onto its
    # sparser ideal moves the data much further
    g = keygen(n, candidates=1, seed=77).private_key.element
    counterfeit = ring_multiply(kp.private_key.element, g)
    rng = np.random.default_rng(5)
    honest, faked = [], []
    for _ in range(20):
        data = RingElement(rng.uniform(0, 255, size=n))
        honest.append(sign(data, kp.private_key).distance)
        faked.append(sign(data, counterfeit).distance)
    print("mean squared distortion, honest key:      %8.0f" % np.mean(honest))
    print("mean squared distortion, counterfeit key: %8.0f" % np.mean(faked))
    print("a distance threshold separates the two cleanly")

    print("\n=== predicted error budget ===")
    fp = fidelity(kp.private_key)
    print("delta_beta %.0f, per-component rms %.2f, threshold %.0f, gain %.4f"
          % (fp.delta_beta, fp.delta_rms, fp.big_delta, fp.g))


if __name__ == "__main__":
    main()
