"""Cyclic and cyclotomic ring arithmetic.

Three rings appear throughout: the cyclic polynomial ring of real
coefficient vectors modulo x^N - 1, its integer subring, and the
quotient by Phi_N = 1 + x + ... + x^{N-1}, which is the ring of
integers of the N-th cyclotomic field when N is an odd prime.

Conventions:
  * RingElement stores N standard-basis coefficients (1, x, ..., x^{N-1}).
  * CycloElement stores N-1 coefficients over the basis z, z^2, ..., z^{N-1}
    where z = exp(2*pi*i/N); index i holds the coefficient of z^{i+1}.
  * All "norms" are squared norms: euclidean_norm(a) = a.a, no square root.
  * Fourier components sigma_j(a) = sum_k a_k z^{jk}; sigma_0 is the
    component sum and is kept separate from the N-1 nontrivial components.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np


class DimensionMismatchError(ValueError):
    pass


class DomainError(ValueError):
    pass


_SMALL_PRIMES = (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_odd_prime(n) -> bool:
    if not isinstance(n, (int, np.integer)) or n < 3 or n % 2 == 0:
        return False
    n = int(n)
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    # deterministic Miller-Rabin, valid far beyond any N used here
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
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


def _as_int_array(values):
    out = np.empty(len(values), dtype=object)
    for i, v in enumerate(values):
        if isinstance(v, (np.floating, float)):
            if v != int(v):
                raise DomainError("integer-domain coefficient %r is not integral" % (v,))
            v = int(v)
        out[i] = int(v)
    return out


class RingElement:
    """Element of the cyclic ring, real ('real') or integer ('integer') domain.

    The real domain requires N to be an odd prime.  The integer domain
    tolerates composite N >= 2 so that plain cyclic autocorrelation can be
    demonstrated there; every quotient-map path still demands a prime.
    """

    __slots__ = ("n", "coeffs", "domain")

    def __init__(self, coeffs, domain="real"):
        coeffs = list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs
        n = len(coeffs)
        if domain == "real":
            if not is_odd_prime(n):
                raise DimensionMismatchError("real cyclic ring needs odd prime N, got %d" % n)
            arr = np.asarray(coeffs, dtype=np.float64).copy()
        elif domain == "integer":
            if n < 2:
                raise DimensionMismatchError("cyclic ring needs N >= 2, got %d" % n)
            arr = _as_int_array(coeffs)
        else:
            raise DomainError("unknown domain %r" % (domain,))
        arr.flags.writeable = False
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "domain", domain)

    def __setattr__(self, *a):
        raise AttributeError("RingElement is immutable")

    def __len__(self):
        return self.n

    def __eq__(self, other):
        return (
            isinstance(other, RingElement)
            and self.n == other.n
            and self.domain == other.domain
            and bool(np.all(self.coeffs == other.coeffs))
        )

    def __hash__(self):
        return hash((self.n, self.domain, tuple(self.coeffs.tolist())))

    def __repr__(self):
        return "RingElement(n=%d, domain=%s, %s)" % (self.n, self.domain, _short(self.coeffs))


class CycloElement:
    """Element of the quotient ring, coefficients over z, z^2, ..., z^{N-1}."""

    __slots__ = ("n", "coeffs", "domain")

    def __init__(self, coeffs, n=None, domain="integer"):
        coeffs = list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs
        if n is None:
            n = len(coeffs) + 1
        if len(coeffs) != n - 1:
            raise DimensionMismatchError(
                "quotient ring at N=%d needs %d coefficients, got %d" % (n, n - 1, len(coeffs))
            )
        if not is_odd_prime(n):
            raise DimensionMismatchError("quotient ring needs odd prime N, got %d" % n)
        if domain == "integer":
            arr = _as_int_array(coeffs)
        elif domain == "real":
            arr = np.asarray(coeffs, dtype=np.float64).copy()
        else:
            raise DomainError("unknown domain %r" % (domain,))
        arr.flags.writeable = False
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "domain", domain)

    def __setattr__(self, *a):
        raise AttributeError("CycloElement is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, CycloElement)
            and self.n == other.n
            and self.domain == other.domain
            and bool(np.all(self.coeffs == other.coeffs))
        )

    def __hash__(self):
        return hash(("O", self.n, self.domain, tuple(self.coeffs.tolist())))

    def __repr__(self):
        return "CycloElement(n=%d, domain=%s, %s)" % (self.n, self.domain, _short(self.coeffs))


def _short(arr):
    s = np.array2string(np.asarray(arr), threshold=8, separator=",")
    return s.replace("\n", " ")


class Spectrum:
    """Fourier data of an element: sigma_0 plus the N-1 nontrivial components."""

    __slots__ = ("n", "sigma0", "sigma")

    def __init__(self, n, sigma0, sigma):
        sigma = np.asarray(sigma, dtype=np.complex128).copy()
        if len(sigma) != n - 1:
            raise DimensionMismatchError("spectrum at N=%d needs %d components" % (n, n - 1))
        sigma.flags.writeable = False
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "sigma0", float(sigma0))
        object.__setattr__(self, "sigma", sigma)

    def __setattr__(self, *a):
        raise AttributeError("Spectrum is immutable")

    def full(self):
        """Length-N complex array [sigma_0, sigma_1, ..., sigma_{N-1}]."""
        out = np.empty(self.n, dtype=np.complex128)
        out[0] = self.sigma0
        out[1:] = self.sigma
        return out

    def __repr__(self):
        return "Spectrum(n=%d, sigma0=%.6g)" % (self.n, self.sigma0)


# ---------------------------------------------------------------------------
# coefficient plumbing


def std_vector(a) -> np.ndarray:
    """Length-N float standard-basis vector; CycloElements get a zero constant term."""
    if isinstance(a, RingElement):
        return np.asarray(a.coeffs, dtype=np.float64)
    if isinstance(a, CycloElement):
        out = np.zeros(a.n, dtype=np.float64)
        out[1:] = np.asarray(a.coeffs, dtype=np.float64)
        return out
    raise TypeError("expected RingElement or CycloElement, got %r" % type(a))


def _std_object_vector(a):
    if isinstance(a, RingElement):
        if a.domain != "integer":
            raise DomainError("exact path needs an integer-domain element")
        return a.coeffs
    if isinstance(a, CycloElement):
        if a.domain != "integer":
            raise DomainError("exact path needs an integer-domain element")
        out = np.zeros(a.n, dtype=object)
        out[1:] = a.coeffs
        return out
    raise TypeError("expected RingElement or CycloElement")


# ---------------------------------------------------------------------------
# Fourier transforms

# sigma_j(a) = sum_k a_k exp(+2 pi i jk / N), which is N * ifft(a) in numpy's
# convention; the inverse map is fft(.)/N.  N prime means numpy falls back to
# its general-length (Bluestein) transform, which is fine at these sizes.


def forward_transform(a) -> Spectrum:
    v = std_vector(a)
    full = np.fft.ifft(v) * len(v)
    return Spectrum(len(v), full[0].real, full[1:])


def inverse_transform(s: Spectrum) -> RingElement:
    coeffs = np.fft.fft(s.full()) / s.n
    return RingElement(coeffs.real, domain="real")


def sigma0(a) -> float:
    """Component sum (the trivial Fourier component)."""
    if isinstance(a, RingElement) and a.domain == "integer":
        return float(sum(a.coeffs.tolist()))
    return float(np.sum(std_vector(a)))


# ---------------------------------------------------------------------------
# multiplication, conjugation, autocorrelation


def _cyclic_convolve_exact(va, vb, n):
    # schoolbook big-integer path; int64 shortcut when magnitudes permit
    la = [abs(int(x)) for x in va.tolist()]
    lb = [abs(int(x)) for x in vb.tolist()]
    ma, mb = max(la, default=0), max(lb, default=0)
    if ma and mb and ma * mb * n < (1 << 62):
        full = np.convolve(va.astype(np.int64), vb.astype(np.int64))
        folded = np.zeros(n, dtype=np.int64)
        np.add.at(folded, np.arange(len(full)) % n, full)
        return np.array(folded.tolist(), dtype=object)
    full = np.convolve(va, vb)
    folded = np.zeros(n, dtype=object)
    for i in range(len(full)):
        folded[i % n] += full[i]
    return folded


def _cyclic_convolve_float(va, vb, n):
    ua = np.fft.ifft(va)
    ub = np.fft.ifft(vb)
    return (np.fft.fft(ua * ub) * n).real


def ring_multiply(a, b):
    """Product in the common ring of a and b.

    Integer-domain operands multiply exactly; anything else goes through the
    float transform path.  Operands must share N and ring type.
    """
    if type(a) is not type(b):
        raise TypeError("cannot multiply %s by %s" % (type(a).__name__, type(b).__name__))
    if a.n != b.n:
        raise DimensionMismatchError("N mismatch: %d vs %d" % (a.n, b.n))
    n = a.n
    exact = a.domain == "integer" and b.domain == "integer"
    if isinstance(a, RingElement):
        if exact:
            return RingElement(_cyclic_convolve_exact(a.coeffs, b.coeffs, n), domain="integer")
        return RingElement(_cyclic_convolve_float(std_vector(a), std_vector(b), n), domain="real")
    if isinstance(a, CycloElement):
        if exact:
            c = _cyclic_convolve_exact(_std_object_vector(a), _std_object_vector(b), n)
            return CycloElement([c[i] - c[0] for i in range(1, n)], n=n, domain="integer")
        c = _cyclic_convolve_float(std_vector(a), std_vector(b), n)
        return CycloElement(c[1:] - c[0], n=n, domain="real")
    raise TypeError("expected RingElement or CycloElement")


def conjugate(a):
    """Index-reversal conjugation: the coefficient of x^j moves to x^{N-j}."""
    if isinstance(a, RingElement):
        c = a.coeffs
        out = np.concatenate([c[:1], c[1:][::-1]])
        return RingElement(out, domain=a.domain)
    if isinstance(a, CycloElement):
        return CycloElement(a.coeffs[::-1], n=a.n, domain=a.domain)
    raise TypeError("expected RingElement or CycloElement")


def autocorrelation(b):
    """b times its conjugate, in b's own ring."""
    return ring_multiply(b, conjugate(b))


# ---------------------------------------------------------------------------
# quotient map and the binary correspondence


def quotient_map(a: RingElement) -> CycloElement:
    """Ring homomorphism onto the quotient: x^i -> z^i, 1 -> -(z + ... + z^{N-1}).

    In coordinates this is c_i - c_0 for 1 <= i <= N-1.
    """
    if not isinstance(a, RingElement):
        raise TypeError("quotient_map expects a RingElement")
    if a.domain == "real":
        c = a.coeffs
        return CycloElement(c[1:] - c[0], n=a.n, domain="real")
    c = a.coeffs
    return CycloElement([c[i] - c[0] for i in range(1, a.n)], n=a.n, domain="integer")


def is_binary(a) -> bool:
    """Binary means +-1/2 components (cyclic side) or a nonzero 0/1 or -1/0
    coefficient vector (quotient side)."""
    if isinstance(a, RingElement):
        v = np.asarray(a.coeffs, dtype=np.float64)
        if not np.all(np.abs(v) == 0.5):
            return False
        return bool(np.any(v != v[0]))
    if isinstance(a, CycloElement):
        v = np.asarray(a.coeffs, dtype=np.float64)
        if np.all((v == 0) | (v == 1)):
            return bool(np.any(v == 1))
        if np.all((v == 0) | (v == -1)):
            return bool(np.any(v == -1))
        return False
    return False


def drop_binary(b: RingElement) -> CycloElement:
    """Binary counterpart in the quotient ring.

    With m = component 0 of the input, coefficients shift by -m: the result is
    a 0/1 vector when m < 0 and a -1/0 vector when m > 0.  All-equal inputs
    have no counterpart and are rejected.
    """
    if not isinstance(b, RingElement) or not is_binary(b):
        raise DomainError("drop_binary expects a binary cyclic element")
    v = np.asarray(b.coeffs, dtype=np.float64)
    out = np.rint(v[1:] - v[0]).astype(int)
    return CycloElement(out.tolist(), n=b.n, domain="integer")


def lift_binary(b: CycloElement) -> RingElement:
    """Inverse of drop_binary on either polarity of binary quotient elements."""
    if not isinstance(b, CycloElement) or not is_binary(b):
        raise DomainError("lift_binary expects a binary quotient element")
    v = np.asarray(b.coeffs, dtype=np.float64)
    if np.any(v == 1):
        out = np.concatenate([[-0.5], v - 0.5])
    else:
        out = np.concatenate([[0.5], v + 0.5])
    return RingElement(out, domain="real")


# ---------------------------------------------------------------------------
# norms


def euclidean_norm(a):
    """Squared norm a.a; exact int for integer-domain input."""
    if isinstance(a, (RingElement, CycloElement)) and a.domain == "integer":
        return sum(int(x) * int(x) for x in a.coeffs.tolist())
    v = std_vector(a)
    return float(np.dot(v, v))


def perp_norm(a) -> float:
    """Squared norm of the component orthogonal to the constant direction."""
    v = std_vector(a)
    d = v - v.mean()
    return float(np.dot(d, d))


def perp_norm_exact(a) -> Fraction:
    """Exact perp norm for integer-domain input: sum v^2 - (sum v)^2 / N."""
    v = _std_object_vector(a)
    vals = [int(x) for x in v.tolist()]
    n = len(vals)
    s = sum(vals)
    s2 = sum(x * x for x in vals)
    return Fraction(n * s2 - s * s, n)


def round_half_away(x):
    """Round to nearest with halves away from zero (scalar or array)."""
    if np.isscalar(x):
        return int(math.floor(abs(x) + 0.5)) * (1 if x >= 0 else -1)
    x = np.asarray(x, dtype=np.float64)
    return np.where(x >= 0, np.floor(x + 0.5), -np.floor(-x + 0.5)).astype(np.int64)


# ---------------------------------------------------------------------------
# text serialization

_RING_LETTERS = {"R": ("ring", "real"), "Z": ("ring", "integer"), "O": ("quotient", "integer")}


def _format_value(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_element(el, path, comments=None):
    """Write the three-line text format, preceded by optional '# key=value' lines."""
    if isinstance(el, RingElement):
        letter = "Z" if el.domain == "integer" else "R"
    elif isinstance(el, CycloElement):
        if el.domain != "integer":
            raise DomainError("only integer quotient elements are serialized")
        letter = "O"
    else:
        raise TypeError("expected RingElement or CycloElement")
    lines = []
    for k, v in (comments or {}).items():
        lines.append("# %s=%s" % (k, v))
    lines.append("N=%d" % el.n)
    lines.append("ring=%s" % letter)
    lines.append(" ".join(_format_value(x) for x in el.coeffs.tolist()))
    data = "\n".join(lines) + "\n"
    with open(path, "w") as fh:
        fh.write(data)


def read_element(path):
    """Returns (element, comments dict)."""
    comments = {}
    fields = []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    k, v = body.split("=", 1)
                    comments[k.strip()] = v.strip()
                continue
            fields.append(line)
    if len(fields) < 3 or not fields[0].startswith("N=") or not fields[1].startswith("ring="):
        raise ValueError("malformed element file %s" % path)
    n = int(fields[0][2:])
    letter = fields[1][5:].strip()
    if letter not in _RING_LETTERS:
        raise ValueError("unknown ring letter %r" % letter)
    values = " ".join(fields[2:]).split()
    if letter == "R":
        el = RingElement([float(v) for v in values], domain="real")
    elif letter == "Z":
        el = RingElement([int(v) for v in values], domain="integer")
    else:
        el = CycloElement([int(v) for v in values], n=n, domain="integer")
    if el.n != n:
        raise DimensionMismatchError("header says N=%d but payload has N=%d" % (n, el.n))
    return el, comments
