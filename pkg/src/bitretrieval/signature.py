"""Lattice quantizers and the ideal-quantization signature scheme.

A private key is a binary element beta; the public key is its exact
autocorrelation alpha = beta * conj(beta).  Signing quantizes the spectral
quotient of the data by beta onto the integer quotient ring, multiplies back
by beta (so the hidden codeword lies in the ideal beta * O), and re-embeds the
codeword next to the original data.  Verification never needs beta: dividing
the spectrum of the signed data's autocorrelation by the public key must land
on integers, and the signed data must sit within a fidelity radius of the
original.

Quantizer naming: quantize_O is the exact closest-point map for the quotient
lattice (the dual A_{N-1} root-lattice geometry); quantize_Z rounds in the
standard basis, optionally after adding a constant offset r (the r = 1/2
variant turns featureless inputs into random binary factors, which is what
makes counterfeit keys produce visibly oversized signing noise).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .algnorm import log_algebraic_norm
from .instances import BinaryKey, random_binary, seed_sequence
from .rings import (
    CycloElement,
    DomainError,
    RingElement,
    Spectrum,
    autocorrelation,
    conjugate,
    forward_transform,
    inverse_transform,
    perp_norm_exact,
    read_element,
    ring_multiply,
    round_half_away,
    std_vector,
    write_element,
)


class SigningError(RuntimeError):
    pass


class PublicKeyError(ValueError):
    pass


@dataclass(frozen=True)
class KeyPair:
    private_key: BinaryKey
    public_key: CycloElement  # exact autocorrelation of the private key

    @property
    def n(self) -> int:
        return self.private_key.n


@dataclass(frozen=True)
class SignedElement:
    data: RingElement         # the signed integer element rho_beta
    codeword: CycloElement    # beta * factor, exact; equals the quotient image of data
    quantizer: str
    epsilon: float            # constant-direction offset, in (-1/2, 1/2]
    amplifications: int       # contrast doublings needed before the factor passed
    distance: float           # squared distance between data and the source element

    @property
    def n(self) -> int:
        return self.data.n


@dataclass(frozen=True)
class FidelityParams:
    delta_O: float       # mean-squared quantizer error on the quotient lattice
    delta_beta: float    # mean-squared signing error
    delta_rms: float     # per-component RMS change
    big_delta: float     # default verification distance threshold
    g: float             # normalized quantizer gain (dimensionless figure of merit)


@dataclass(frozen=True)
class VerifyResult:
    accepted: bool
    reason: Optional[str]        # None, "divisibility" or "distance"
    deviation: float             # worst coefficient distance from integrality
    distance: Optional[float]    # squared distance to the reference data, if given

    def __bool__(self) -> bool:
        return self.accepted


# ---------------------------------------------------------------------------
# quantizers


def quantize_O(gamma) -> CycloElement:
    """Closest point of the quotient-ring lattice, exact for the perp metric.

    Input must be orthogonal to the constant direction (component sum 0).
    Floor every component, then walk candidate points that round up the k
    components with the largest fractional parts, k = 0 .. N-1; the closest
    vector is always among these, and the perp errors of the whole family come
    from one cumulative sum.  Worst-case squared error is (N^2 - 1) / (12 N).
    """
    v = std_vector(gamma)
    n = len(v)
    if abs(float(v.sum())) > 1e-6:
        raise DomainError("quantizer input must have zero component sum")
    floors = np.floor(v)
    fr = v - floors
    order = np.argsort(-fr, kind="stable")  # descending fracs, ties by index
    csum = np.concatenate(([0.0], np.cumsum(fr[order])))[:n]
    i = np.arange(n)
    ssq = float(np.dot(fr, fr))
    total = float(fr.sum())
    # squared perp error of candidate i: sum (fr - 1_S)^2 - (sum(fr) - i)^2 / n
    errors = ssq - 2.0 * csum + i - (total - i) ** 2 / n
    k = int(np.argmin(errors))
    point = floors.astype(np.int64)
    point[order[:k]] += 1
    return CycloElement((point[1:] - point[0]).tolist(), n=n)


def quantize_Z(gamma, r: float = 0.0) -> CycloElement:
    """Standard-basis rounding quantizer, optionally shifted by r per component.

    Rounds gamma + r half-away-from-zero and drops to the quotient ring.  With
    r = 1/2 a featureless gamma lands on the all-halves cliff and the rounding
    noise produces a random binary output.
    """
    v = std_vector(gamma)
    rounded = round_half_away(v + r)
    return CycloElement((rounded[1:] - rounded[0]).tolist(), n=len(v))


def estimate_delta_O(n: int, samples: int = 10000, seed: int = 0) -> float:
    """Monte Carlo mean-squared error of quantize_O at size n.

    Draws points uniform modulo the integer lattice, projects out the constant
    direction, and averages the squared perp error; approaches n/12 for large
    n.  Fully vectorized, so 10^4 samples at n ~ 400 are cheap.
    """
    rng = np.random.Generator(np.random.PCG64(seed_sequence(seed, 0xDE17A)))
    v = rng.random((samples, n))
    v -= v.mean(axis=1, keepdims=True)
    fr = v - np.floor(v)
    s = np.sort(fr, axis=1)[:, ::-1]
    csum = np.concatenate((np.zeros((samples, 1)), np.cumsum(s, axis=1)), axis=1)[:, :n]
    i = np.arange(n)[None, :]
    ssq = np.sum(fr * fr, axis=1, keepdims=True)
    total = np.sum(fr, axis=1, keepdims=True)
    errors = ssq - 2.0 * csum + i - (total - i) ** 2 / n
    return float(np.mean(errors.min(axis=1)))


def _parse_quantizer(label: str):
    if label == "o":
        return lambda g: quantize_O(g)
    if label == "z":
        return lambda g: quantize_Z(g, 0.0)
    if label.startswith("zr:"):
        r = float(label[3:])
        return lambda g: quantize_Z(g, r)
    raise ValueError("unknown quantizer %r (expected 'o', 'z' or 'zr:<r>')" % label)


DEFAULT_QUANTIZER = "zr:0.5"


# ---------------------------------------------------------------------------
# keys


def keygen(n: int, candidates: int = 64, seed: int = 0) -> KeyPair:
    """Draw `candidates` random binary keys and keep the largest-norm one.

    The algebraic norm correlates with the cost of recovering the key from its
    public autocorrelation, so maximizing it over a modest pool hardens the
    key at negligible cost.
    """
    if candidates < 1:
        raise ValueError("need at least one candidate")
    rng = np.random.Generator(np.random.PCG64(seed_sequence(seed, 0x6E4)))
    best = None
    best_score = -math.inf
    for _ in range(candidates):
        key = random_binary(n, rng)
        score = log_algebraic_norm(key.element)
        if score > best_score:
            best, best_score = key, score
    return KeyPair(private_key=best, public_key=autocorrelation(best.element))


def save_private_key(path, key: BinaryKey) -> None:
    write_element(key.element, path, comments={"key": "private", "provenance": key.provenance})


def load_private_key(path) -> BinaryKey:
    el, comments = read_element(path)
    if comments.get("key") == "public":
        raise ValueError("%s holds a public key" % path)
    return BinaryKey(el, provenance=comments.get("provenance", "file"))


def save_public_key(path, alpha: CycloElement) -> None:
    write_element(alpha, path, comments={"key": "public"})


def load_public_key(path) -> CycloElement:
    el, comments = read_element(path)
    if comments.get("key") == "private":
        raise ValueError("%s holds a private key" % path)
    if not isinstance(el, CycloElement):
        raise PublicKeyError("public key must be a quotient-ring element")
    if conjugate(el) != el:
        raise PublicKeyError("public key is not self-conjugate")
    return el


# ---------------------------------------------------------------------------
# signing


def _key_element(key) -> CycloElement:
    el = key.element if isinstance(key, BinaryKey) else key
    if not isinstance(el, CycloElement) or el.domain != "integer":
        raise TypeError("signing key must be an integer quotient element")
    if not any(int(x) for x in el.coeffs.tolist()):
        raise ValueError("signing key must be nonzero")
    return el


def sign(rho: RingElement, key, quantizer: str = DEFAULT_QUANTIZER,
         max_amplifications: int = 8,
         factor: Optional[CycloElement] = None) -> SignedElement:
    """Quantize rho onto the key's ideal and re-embed next to rho.

    The quotient-space content gamma = spectrum(rho) / spectrum(key) is
    quantized to an integer factor g; the codeword key * g is exact, and the
    output integer element differs from the codeword's standard lift by a
    constant, chosen so the constant-direction offset to rho is at most 1/2.

    If the quantized factor is too flat (squared perp norm not above
    N/4 - sqrt(N), the size of a typical binary factor), the quotient content
    is doubled and requantized, up to `max_amplifications` times; flat factors
    are what a counterfeit key produces, so letting them through would
    undermine the fidelity guarantee that verification relies on.

    An explicit nonzero `factor` bypasses quantization entirely; the
    watermarking layer uses this for zero-contrast blocks, where doubling a
    vanishing quotient content can never produce a usable factor.
    """
    el = _key_element(key)
    quant = _parse_quantizer(quantizer)
    n = el.n
    if not isinstance(rho, RingElement) or rho.n != n:
        raise TypeError("expected a ring element of matching size")
    rho_v = std_vector(rho)
    if not np.all(np.isfinite(rho_v)):
        raise ValueError("data contains non-finite components")

    doublings = 0
    if factor is not None:
        if not isinstance(factor, CycloElement) or factor.n != n:
            raise TypeError("explicit factor must be a quotient element of matching size")
        if not any(int(x) for x in factor.coeffs.tolist()):
            raise SigningError("explicit factor is zero")
    else:
        sb = forward_transform(el)
        if float(np.min(np.abs(sb.sigma))) < 1e-9:
            raise SigningError("key has a vanishing spectral component")
        sr = forward_transform(rho)
        gamma = inverse_transform(Spectrum(n, 0.0, sr.sigma / sb.sigma))

        threshold = Fraction(n, 4) - Fraction(math.sqrt(n))
        for attempt in range(max_amplifications + 1):
            scaled = RingElement(gamma.coeffs * float(2 ** attempt), domain="real")
            g = quant(scaled)
            nonzero = any(int(x) for x in g.coeffs.tolist())
            if nonzero and perp_norm_exact(g) > threshold:
                factor, doublings = g, attempt
                break
        if factor is None:
            raise SigningError(
                "quantized factor stayed flat after %d contrast doublings" % max_amplifications)

    w = ring_multiply(el, factor)
    wsum = sum(int(x) for x in w.coeffs.tolist())
    c = float(rho_v.mean()) - wsum / n
    k = round_half_away(c)
    lift = [int(x) for x in w.coeffs.tolist()]
    data = RingElement([k] + [x + k for x in lift], domain="integer")
    diff = std_vector(data) - rho_v
    return SignedElement(
        data=data,
        codeword=w,
        quantizer=quantizer,
        epsilon=float(k - c),
        amplifications=doublings,
        distance=float(np.dot(diff, diff)),
    )


# ---------------------------------------------------------------------------
# verification


def _public_spectrum(alpha: CycloElement) -> Spectrum:
    # sigma0 is not well defined on the quotient class (it shifts by N per
    # constant added to the lift), so only the nontrivial components are
    # validated or used
    sa = forward_transform(alpha)
    scale = max(1.0, float(np.max(np.abs(sa.sigma)))) if sa.n > 1 else 1.0
    if float(np.max(np.abs(sa.sigma.imag))) > 1e-6 * scale:
        raise PublicKeyError("public key spectrum is not real")
    if float(np.min(sa.sigma.real)) <= 0:
        raise PublicKeyError("public key spectrum must be positive")
    return sa


def default_big_delta(alpha: CycloElement, factor: float = 4.0) -> float:
    """Verification radius factor * Delta_beta, from public data alone.

    The key's perp norm equals the mean of the nontrivial public spectrum, and
    the asymptotic quantizer error N/12 stands in for Delta_O.  The honest
    mean squared distance is Delta_beta itself, so the default factor of 4
    leaves headroom for fluctuation while still rejecting the inflated
    errors of counterfeit keys.
    """
    if factor <= 0:
        raise ValueError("radius factor must be positive")
    sa = _public_spectrum(alpha)
    n = alpha.n
    beta_perp = float(np.sum(sa.sigma.real)) / n
    delta_beta = n * ((n / 12.0) / (n - 1) * beta_perp + 1.0 / 12.0)
    return factor * delta_beta


def verify(signed, alpha: CycloElement, tolerance: float = 1e-2,
           rho: Optional[RingElement] = None,
           big_delta: Optional[float] = None) -> VerifyResult:
    """Check a signed element against a public key.

    Divisibility: the spectrum of the signed data's autocorrelation, divided
    componentwise by the public key's, must invert to an element whose
    coefficients are integers up to a common constant; we test the pairwise
    coefficient differences against `tolerance`.  Fidelity: when the source
    element is supplied, the squared distance must stay below `big_delta`
    (default 4 * Delta_beta derived from the public key).
    """
    data = signed.data if isinstance(signed, SignedElement) else signed
    if not isinstance(data, RingElement):
        raise TypeError("expected a SignedElement or RingElement")
    if data.n != alpha.n:
        raise ValueError("size mismatch between signature and public key")
    sa = _public_spectrum(alpha)
    sd = forward_transform(data)
    # the sigma0 channel only adds a constant to every coefficient of the
    # inverse transform, and constants cancel in the differences below, so
    # pin it to zero rather than divide by a representative-dependent value
    quotient = Spectrum(
        data.n,
        0.0,
        (sd.sigma * np.conj(sd.sigma)).real / sa.sigma.real,
    )
    v = inverse_transform(quotient).coeffs
    diffs = v[1:] - v[0]
    deviation = float(np.max(np.abs(diffs - np.rint(diffs))))
    if deviation > tolerance:
        return VerifyResult(False, "divisibility", deviation, None)
    distance = None
    if rho is not None:
        if big_delta is None:
            big_delta = default_big_delta(alpha)
        d = std_vector(rho) - std_vector(data)
        distance = float(np.dot(d, d))
        if distance >= big_delta:
            return VerifyResult(False, "distance", deviation, distance)
    return VerifyResult(True, None, deviation, distance)


# ---------------------------------------------------------------------------
# fidelity predictions


def fidelity(key, delta_O: Optional[float] = None) -> FidelityParams:
    """Predicted signing error budget for a key.

    delta_beta = N * (Delta_O / (N-1) * perp(key) + 1/12); the 1/12 term is
    the constant-direction rounding, the other is quantizer error amplified by
    the key.  The gain g normalizes the per-component error by the covolume of
    the key's ideal, making keys of different norm comparable.
    """
    el = _key_element(key)
    n = el.n
    if delta_O is None:
        delta_O = n / 12.0
    beta_perp = float(perp_norm_exact(el))
    if beta_perp == 0.0:
        raise ValueError("degenerate key with zero perp norm")
    delta_beta = n * (delta_O / (n - 1) * beta_perp + 1.0 / 12.0)
    delta_rms = math.sqrt(delta_beta / n)
    gain = delta_rms ** 2 * math.exp(-2.0 * log_algebraic_norm(el) / n)
    return FidelityParams(
        delta_O=float(delta_O),
        delta_beta=delta_beta,
        delta_rms=delta_rms,
        big_delta=4.0 * delta_beta,
        g=gain,
    )


# ---------------------------------------------------------------------------
# hashing documents to ring elements


def hash_to_element(document: bytes, n: int, m: int = 256) -> RingElement:
    """Deterministic digest expansion to n components in [0, m).

    SHA-256 in counter mode: block i is SHA256(document || i in 4 big-endian
    bytes); each component consumes 4 bytes big-endian reduced mod m.  The
    empty document is valid and yields the expansion of SHA256(b"" || ...).
    """
    if n < 1 or m < 2:
        raise ValueError("need n >= 1 and m >= 2")
    out = []
    counter = 0
    while len(out) < n:
        block = hashlib.sha256(document + counter.to_bytes(4, "big")).digest()
        for i in range(0, len(block) - 3, 4):
            out.append(int.from_bytes(block[i:i + 4], "big") % m)
            if len(out) == n:
                break
        counter += 1
    return RingElement(out, domain="integer")


# ---------------------------------------------------------------------------
# signed-document envelope


def write_signed_element(path, signed, quantizer: Optional[str] = None,
                         big_delta: Optional[float] = None) -> None:
    """Envelope: N and quantizer and delta header, then one integer per line."""
    if isinstance(signed, SignedElement):
        data = signed.data
        quantizer = quantizer or signed.quantizer
    else:
        data = signed
        quantizer = quantizer or DEFAULT_QUANTIZER
    if data.domain != "integer":
        raise DomainError("only integer signed data is serialized")
    lines = ["N=%d" % data.n, "quantizer=%s" % quantizer,
             "delta=%s" % (repr(float(big_delta)) if big_delta is not None else "none")]
    lines.extend(str(int(x)) for x in data.coeffs.tolist())
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_signed_element(path):
    """Returns (data element, quantizer label, big_delta or None)."""
    header = {}
    values = []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if "=" in line and not line.lstrip("-").isdigit():
                k, v = line.split("=", 1)
                header[k.strip()] = v.strip()
            else:
                values.append(int(line))
    n = int(header["N"])
    if len(values) != n:
        raise ValueError("expected %d coefficients, found %d" % (n, len(values)))
    delta = None if header.get("delta", "none") == "none" else float(header["delta"])
    return (RingElement(values, domain="integer"), header.get("quantizer", DEFAULT_QUANTIZER), delta)
