"""Exact integer lattices: ideal bases, Hermite normal form, LLL, attacks.

Ideal lattices are carried in the cyclic ring's coordinates, scaled by N so
all entries are integers: the generators of the ideal of rho are

    N * rho * x^i - sigma0(rho) * Phi_N,   i = 1 .. N-1,

which span (N times) the projection of the ideal onto the zero-mean
hyperplane.  Dividing by the scale recovers geometry: for a row v summing to
zero the perp norm of v/scale is (v.v)/scale^2.

Everything here is big-integer exact; gmpy2 supplies fast mpz arithmetic for
the LLL inner loops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

try:
    from gmpy2 import mpz
except ImportError:  # pragma: no cover - gmpy2 is a hard dependency in practice
    mpz = int

from .instances import BinaryKey, random_binary, seed_sequence
from .algnorm import algebraic_norm
from .rings import CycloElement, RingElement, ring_multiply
from .rings import _std_object_vector  # exact standard-basis lift


class LatticeError(ValueError):
    pass


class IntegerLattice:
    """A list of integer generator rows, possibly dependent, plus a scale."""

    __slots__ = ("n", "rows", "scale")

    def __init__(self, n, rows, scale=1):
        rows = [tuple(int(x) for x in r) for r in rows]
        for r in rows:
            if len(r) != n:
                raise LatticeError("row length %d != ambient dimension %d" % (len(r), n))
            if scale != 1 and sum(r) != 0:
                raise LatticeError("scaled rows must have zero component sum")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "rows", tuple(rows))
        object.__setattr__(self, "scale", int(scale))

    def __setattr__(self, *a):
        raise AttributeError("IntegerLattice is immutable")

    def __repr__(self):
        return "IntegerLattice(n=%d, rows=%d, scale=%d)" % (self.n, len(self.rows), self.scale)


def stack(a: IntegerLattice, b: IntegerLattice) -> IntegerLattice:
    if a.n != b.n or a.scale != b.scale:
        raise LatticeError("cannot stack lattices with different ambient data")
    return IntegerLattice(a.n, list(a.rows) + list(b.rows), a.scale)


def ideal_generators(rho) -> IntegerLattice:
    """Scaled generators of the ideal of rho (integer cyclic or quotient element)."""
    v = _std_object_vector(rho)
    n = len(v)
    s0 = sum(int(x) for x in v.tolist())
    vals = [int(x) for x in v.tolist()]
    rows = []
    for i in range(1, n):
        row = [0] * n
        for j, c in enumerate(vals):
            row[(i + j) % n] = n * c
        rows.append([r - s0 for r in row])
    return IntegerLattice(n, rows, scale=n)


# ---------------------------------------------------------------------------
# Hermite normal form: incremental xgcd insertion, then canonical reduction.


def _xgcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def _hnf_rows(rows, width, modulus=None):
    # With a modulus D such that D*e_c lies in the lattice for every c, the
    # rows D*e_c are legal generators and every intermediate entry may be
    # folded into (-D/2, D/2]; this is what keeps elimination from blowing up.
    def fold(v):
        if modulus is None:
            return v
        out = []
        for x in v:
            r = x % modulus
            out.append(r - modulus if 2 * r > modulus else r)
        return out

    pivots = {}  # column -> row (python list)
    if modulus is not None:
        # plant the D*e_c generators directly; folding them would erase them
        for c in range(width):
            e = [0] * width
            e[c] = modulus
            pivots[c] = e
    for row in rows:
        v = fold(list(row))
        while True:
            col = next((c for c in range(width) if v[c]), None)
            if col is None:
                break
            if col not in pivots:
                if v[col] < 0:
                    v = [-x for x in v]
                pivots[col] = v
                break
            p = pivots[col]
            a, b = p[col], v[col]
            if b % a == 0:
                q = b // a
                v = fold([x - q * y for x, y in zip(v, p)])
            else:
                g, s, t = _xgcd(a, b)
                if g < 0:
                    g, s, t = -g, -s, -t
                pa, pb = a // g, b // g
                new_p = fold([s * x + t * y for x, y in zip(p, v)])
                new_p[col] = g  # folding must not touch the pivot entry
                v = fold([pa * y - pb * x for x, y in zip(p, v)])
                pivots[col] = new_p
    cols = sorted(pivots)
    basis = [pivots[c] for c in cols]
    # reduce above-pivot entries into [0, pivot); per row, sweep the lower
    # pivots left to right so earlier columns stay reduced
    for r in range(len(basis) - 2, -1, -1):
        row = basis[r]
        for s in range(r + 1, len(basis)):
            c = cols[s]
            q = row[c] // basis[s][c]
            if q:
                row = [x - q * y for x, y in zip(row, basis[s])]
        basis[r] = row
    return basis


def hermite_normal_form(L: IntegerLattice, modulus=None) -> IntegerLattice:
    """Canonical row HNF of the stacked generators.

    Pivot columns increase row by row, pivots are positive, and every entry
    above a pivot is reduced into [0, pivot).  Dependent generators collapse;
    the result has one row per lattice dimension.

    `modulus` enables bounded-entry elimination and must be a positive D with
    D * e_c in the lattice for every coordinate c.  For scaled (zero-sum)
    lattices the requirement is D * (e_c - e_c') in the lattice instead: the
    computation then runs on the full-rank image with the last coordinate
    dropped and the zero-sum column is restored afterwards.
    """
    if modulus is None:
        basis = _hnf_rows(L.rows, L.n)
        return IntegerLattice(L.n, basis, scale=L.scale)
    modulus = int(modulus)
    if modulus <= 0:
        raise LatticeError("modulus must be positive")
    if L.scale == 1:
        basis = _hnf_rows(L.rows, L.n, modulus)
        return IntegerLattice(L.n, basis, scale=L.scale)
    dropped = [r[:-1] for r in L.rows]
    basis = _hnf_rows(dropped, L.n - 1, modulus)
    lifted = [list(r) + [-sum(r)] for r in basis]
    return IntegerLattice(L.n, lifted, scale=L.scale)


def ideal_ocoord_basis(key) -> IntegerLattice:
    """Quotient-coordinate basis of the ideal of a key: rows are beta * z^i."""
    el = key.element if isinstance(key, BinaryKey) else key
    if not isinstance(el, CycloElement) or el.domain != "integer":
        raise LatticeError("expected an integer quotient element")
    n = el.n
    rows = []
    for i in range(1, n):
        mono = [0] * (n - 1)
        mono[i - 1] = 1
        prod = ring_multiply(el, CycloElement(mono, n=n))
        rows.append([int(x) for x in prod.coeffs.tolist()])
    return IntegerLattice(n - 1, rows, scale=1)


def hnf_avector(key):
    """Compressed ideal data (d, [a_1, ..., a_{N-1}]) of a binary key.

    d is the algebraic norm, and the key's mirror ideal (its image under the
    coefficient-reversal automorphism z -> z^{N-1}) has the triangular basis
    v_1 = d * z and v_j = a_j * z + z^j for j >= 2, with a_1 defined as d - 1.
    Concretely: take the natural-order row HNF of the key's own ideal, whose
    pivot-j rows read z^j + c * z^{N-1}; mirroring maps that residue c to
    a_{N-j}.  Publishing either orientation reveals the same lattice.
    """
    L = ideal_ocoord_basis(key)
    w = L.n
    basis = _hnf_rows(list(L.rows), w)
    if len(basis) != w:
        raise LatticeError("ideal basis is not full rank")
    d = basis[w - 1][w - 1]
    avec = [0] * (w + 1)  # 1-indexed by j
    avec[1] = d - 1
    for r in range(w - 1):
        if basis[r][r] != 1:
            raise LatticeError("unexpected ideal HNF shape (pivot != 1)")
        avec[w + 1 - (r + 1)] = basis[r][w - 1]
    return int(d), [int(a) for a in avec[1:]]


# ---------------------------------------------------------------------------
# LLL: integral (fraction-free) formulation with exact rational delta.


def _lll_rows(rows, delta: Fraction):
    m = len(rows)
    if m < 2:
        return [list(r) for r in rows]
    p, q = delta.numerator, delta.denominator
    b = [[mpz(x) for x in row] for row in rows]

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    d = [mpz(1)] * (m + 1)
    lam = [[mpz(0)] * m for _ in range(m)]

    def gso_row(k):
        for j in range(k + 1):
            u = dot(b[k], b[j])
            for i in range(j):
                u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
            if j < k:
                lam[k][j] = u
            else:
                if u <= 0:
                    raise LatticeError("dependent rows; take the HNF first")
                d[k + 1] = u

    def reduce_row(k, l):
        lkl = lam[k][l]
        dl = d[l + 1]
        if 2 * abs(lkl) > dl:
            r = (2 * lkl + dl) // (2 * dl)
            bl = b[l]
            bk = b[k]
            for i in range(len(bk)):
                bk[i] -= r * bl[i]
            lam[k][l] -= r * dl
            ll = lam[l]
            lk = lam[k]
            for i in range(l):
                lk[i] -= r * ll[i]

    gso_row(0)
    kmax = 0
    k = 1
    while k < m:
        if k > kmax:
            kmax = k
            gso_row(k)
        reduce_row(k, k - 1)
        while q * (d[k - 1] * d[k + 1] + lam[k][k - 1] ** 2) < p * d[k] * d[k]:
            # swap rows k-1, k and patch the integral GSO data
            b[k], b[k - 1] = b[k - 1], b[k]
            for j in range(k - 1):
                lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
            lkk = lam[k][k - 1]
            bb = (d[k - 1] * d[k + 1] + lkk * lkk) // d[k]
            for i in range(k + 1, kmax + 1):
                t = lam[i][k]
                lam[i][k] = (d[k + 1] * lam[i][k - 1] - lkk * t) // d[k]
                lam[i][k - 1] = (bb * t + lkk * lam[i][k]) // d[k + 1]
            d[k] = bb
            k = max(1, k - 1)
            reduce_row(k, k - 1)
        for l in range(k - 2, -1, -1):
            reduce_row(k, l)
        k += 1
    return [[int(x) for x in row] for row in b]


def lll_reduce(L: IntegerLattice, delta=0.99, progressive=True,
               sort_rows=True) -> IntegerLattice:
    """Exact LLL reduction of an independent basis.

    `delta` is taken as an exact rational (float inputs are Fraction-ized).
    A cheap delta=3/4 pass runs first by default; the final pass enforces the
    requested Lovasz parameter, so the guarantee is unchanged.  `sort_rows`
    orders the input by ascending norm, which lets the first sweep
    Babai-reduce outsized rows (e.g. HNF tails) against the short ones instead
    of grinding them down by swaps; row order does not change the lattice, but
    vanilla behavior is available for reproducing reduction-quality studies.
    """
    delta = Fraction(delta).limit_denominator(10**6)
    if not Fraction(1, 4) < delta < 1:
        raise LatticeError("delta must lie in (1/4, 1)")
    rows = [[int(x) for x in r] for r in L.rows]
    if sort_rows:
        rows.sort(key=lambda r: sum(x * x for x in r))
    if progressive and delta > Fraction(3, 4) and len(rows) >= 24:
        rows = _lll_rows(rows, Fraction(3, 4))
    rows = _lll_rows(rows, delta)
    return IntegerLattice(L.n, rows, scale=L.scale)


# ---------------------------------------------------------------------------
# experiments


@dataclass(frozen=True)
class AttackReport:
    n: int
    trials: int
    seed: int
    best_ratio: float
    ratios: tuple


@dataclass(frozen=True)
class ExperimentSummary:
    n: int
    trials: int
    successes: int

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials


def _row_perp_ratio(row, n):
    # rows sum to zero, so perp norm of row/n is (row.row)/n^2; the reference
    # scale is the binary norm N/4
    s2 = sum(x * x for x in row)
    return Fraction(4 * s2, n ** 3)


def counterfeit_attack(n: int, seed: int = 0, trials: int = 20) -> AttackReport:
    """Try to recover small ideal elements from two public-style products.

    Each trial draws a key beta and factors beta1, beta2, forms rho_k =
    beta * beta_k, stacks both scaled ideal generator sets, and LLL-reduces
    the HNF basis.  The reported ratio is the smallest perp norm among the
    reduced rows relative to N/4; a ratio near 1 means a counterfeit key as
    good as a genuine one.
    """
    ratios = []
    for t in range(trials):
        rngs = [
            np.random.Generator(np.random.PCG64(seed_sequence(seed, t, i)))
            for i in range(3)
        ]
        beta = random_binary(n, rngs[0]).element
        b1 = random_binary(n, rngs[1]).element
        b2 = random_binary(n, rngs[2]).element
        rho1 = ring_multiply(beta, b1)
        rho2 = ring_multiply(beta, b2)
        L = stack(ideal_generators(rho1), ideal_generators(rho2))
        # N(rho) lies in the ideal of rho, so n * gcd of the norms bounds HNF
        # entries; without this the elimination blows up beyond n ~ 50
        g = math.gcd(algebraic_norm(rho1), algebraic_norm(rho2))
        basis = hermite_normal_form(L, modulus=n * g)
        red = lll_reduce(basis)
        best = min(_row_perp_ratio(r, n) for r in red.rows)
        ratios.append(float(best))
    return AttackReport(
        n=n, trials=trials, seed=seed, best_ratio=min(ratios), ratios=tuple(ratios)
    )


def ideal_discovery_experiment(n: int, seed: int = 0, trials: int = 50,
                               delta=Fraction(3, 4)) -> ExperimentSummary:
    """Rate at which plain LLL recovers a generator of a random binary ideal.

    Per trial: HNF basis of the ideal of a random key, in quotient-ring
    integer coordinates, reduced by textbook LLL (delta = 3/4, rows in HNF
    order).  Success means some reduced basis element has algebraic norm
    exactly N(beta), i.e. it is beta times a unit.  The rate collapses as n
    grows; stronger reduction schedules (see `lll_reduce` defaults) push the
    collapse to larger n, so the textbook configuration is pinned here to keep
    the measurement stable.
    """
    successes = 0
    for t in range(trials):
        rng = np.random.Generator(np.random.PCG64(seed_sequence(seed, t)))
        beta = random_binary(n, rng)
        target = algebraic_norm(beta.element)
        basis = hermite_normal_form(ideal_ocoord_basis(beta), modulus=target)
        red = lll_reduce(basis, delta=delta, progressive=False, sort_rows=False)
        for row in red.rows:
            if any(row) and algebraic_norm(CycloElement(row, n=n)) == target:
                successes += 1
                break
    return ExperimentSummary(n=n, trials=trials, successes=successes)
