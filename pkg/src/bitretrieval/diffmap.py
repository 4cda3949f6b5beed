"""Difference-map solver for recovering binary sequences from autocorrelations.

The two constraint sets are the hypercube of +-1/2 vectors and the torus of
elements whose Fourier component moduli match the target autocorrelation.
One update reads

    x <- x + beta * (P_B f_A(x) - P_A f_B(x)),   f_S = (1 + g_S) P_S - g_S

with the standard parameters beta = 0.7, g_A = 1/beta, g_B = -1/beta.  The
candidate P_B f_A(x) is tested every iteration: a cheap spectral comparison
first, then an exact integer autocorrelation on a match.

Transforms in the hot loop are explicit DFT matrix products; at the solver's
sizes (N <= ~130) that beats the library FFT by 2-4x and batches cleanly, so
many runs advance in lockstep as rows of one array.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .instances import BinaryKey, seed_sequence
from .rings import CycloElement, RingElement

_TINY = 1e-300


class InvalidAutocorrelationError(ValueError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    beta: float = 0.7
    gamma_a: Optional[float] = None  # defaults to 1/beta
    gamma_b: Optional[float] = None  # defaults to -1/beta
    max_iterations: int = 50_000_000
    restart_after: Optional[int] = None
    seed: int = 0
    detect_exact: bool = True
    batch_size: int = 64  # rows advanced in lockstep by the batched engine

    def __post_init__(self):
        if self.beta == 0:
            raise ValueError("beta must be nonzero")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if self.restart_after is not None and self.restart_after < 1:
            raise ValueError("restart_after must be positive when set")

    @property
    def ga(self) -> float:
        return 1.0 / self.beta if self.gamma_a is None else self.gamma_a

    @property
    def gb(self) -> float:
        return -1.0 / self.beta if self.gamma_b is None else self.gamma_b


@dataclass
class SolveResult:
    solution: Optional[BinaryKey]
    iterations: int
    per_attempt: list = field(default_factory=list)
    residual_trace: Optional[list] = None

    @property
    def converged(self) -> bool:
        return self.solution is not None


@dataclass(frozen=True)
class IterationStats:
    count: int
    mean: float
    std: float
    cv: float  # std / mean
    ks_deviation: float  # sup distance from the fitted exponential CDF


class TorusTarget:
    """Prepared autocorrelation target: exact integers plus float spectra."""

    __slots__ = ("n", "alpha4", "sqrt_spec", "mu4")

    def __init__(self, n, alpha4, sqrt_spec, mu4):
        self.n = n
        self.alpha4 = alpha4
        self.sqrt_spec = sqrt_spec
        self.mu4 = mu4


def autocorrelation_target(alpha) -> TorusTarget:
    """Validate an autocorrelation and precompute solver data.

    Accepts the exact quotient-side form (integer CycloElement) or the
    cyclic-side form whose quadrupled coefficients must be integers.  The
    peak must be N/4, the vector self-conjugate, and every Fourier component
    nonnegative.
    """
    if isinstance(alpha, CycloElement):
        if alpha.domain != "integer":
            raise InvalidAutocorrelationError("quotient-side target must be exact integers")
        n = alpha.n
        a4 = np.empty(n, dtype=np.int64)
        a4[0] = n
        a4[1:] = np.asarray([int(x) for x in alpha.coeffs.tolist()], dtype=np.int64) * 4 + n
    elif isinstance(alpha, RingElement):
        n = alpha.n
        v4 = np.asarray(alpha.coeffs, dtype=np.float64) * 4.0
        a4 = np.rint(v4).astype(np.int64)
        if np.max(np.abs(v4 - a4)) > 1e-6:
            raise InvalidAutocorrelationError("autocorrelation coefficients must be quarter-integers")
    else:
        raise TypeError("expected CycloElement or RingElement")
    if a4[0] != n:
        raise InvalidAutocorrelationError("autocorrelation peak must equal N/4")
    if not np.array_equal(a4[1:], a4[1:][::-1]):
        raise InvalidAutocorrelationError("autocorrelation must be self-conjugate")
    # sigma(alpha) = |sigma(beta)|^2 >= 0; tiny float dips are clamped
    w = np.exp(2j * np.pi * np.outer(np.arange(n), np.arange(n)) / n)
    spectrum = (a4.astype(np.float64) / 4.0) @ w
    if np.max(np.abs(spectrum.imag)) > 1e-6 * max(1.0, np.max(np.abs(spectrum.real))):
        raise InvalidAutocorrelationError("autocorrelation spectrum is not real")
    mu = spectrum.real
    if np.min(mu) < -1e-6 * max(1.0, np.max(mu)):
        raise InvalidAutocorrelationError("autocorrelation spectrum has negative components")
    mu = np.maximum(mu, 0.0)
    return TorusTarget(n, a4, np.sqrt(mu), 4.0 * mu)


def _exact_match(s_row: np.ndarray, alpha4: np.ndarray) -> bool:
    # cyclic autocorrelation of the +-1 pattern, exact in int64
    n = len(s_row)
    sc = np.concatenate([s_row[:1], s_row[1:][::-1]])
    full = np.convolve(s_row, sc)
    folded = np.zeros(n, dtype=np.int64)
    np.add.at(folded, np.arange(len(full)) % n, full)
    return bool(np.array_equal(folded, alpha4))


def _canonical_key(s_row: np.ndarray, n: int) -> BinaryKey:
    s = -s_row if s_row[0] > 0 else s_row
    bits = ((s[1:] + 1) // 2).astype(int)
    return BinaryKey(CycloElement(bits.tolist(), n=n), provenance="solved")


def _start_vector(master_seed, job_index, attempt, n):
    rng = np.random.Generator(np.random.PCG64(seed_sequence(master_seed, job_index, attempt)))
    return rng.uniform(-1.0, 1.0, size=n)


def _run_jobs(targets, config: SolverConfig, trace_every=None):
    """Advance one difference-map trajectory per job, batched row-wise.

    targets: list of TorusTarget, one job per entry (all sharing one N).
    Returns a list of SolveResult in job order.
    """
    njobs = len(targets)
    n = targets[0].n
    for t in targets:
        if t.n != n:
            raise ValueError("batched jobs must share N")
    beta, ga, gb = config.beta, config.ga, config.gb
    want_trace = trace_every is not None and njobs == 1
    trace = [] if want_trace else None

    w_fwd = np.exp(2j * np.pi * np.outer(np.arange(n), np.arange(n)) / n)
    w_back = w_fwd.conj() / n

    results: list = [None] * njobs
    nrows = max(1, min(config.batch_size, njobs))
    job_of = np.arange(nrows)  # job index per active row
    next_job = nrows
    x = np.vstack([_start_vector(config.seed, j, 0, n) for j in range(nrows)])
    sqrt_spec = np.vstack([targets[j].sqrt_spec for j in range(nrows)])
    mu4 = np.vstack([targets[j].mu4 for j in range(nrows)])
    alpha4_rows = [targets[j].alpha4 for j in range(nrows)]
    it_total = np.zeros(nrows, dtype=np.int64)
    it_attempt = np.zeros(nrows, dtype=np.int64)
    per_attempt = [[] for _ in range(nrows)]

    def refill(row, job):
        nonlocal next_job
        job_of[row] = job
        t = targets[job]
        x[row] = _start_vector(config.seed, job, 0, n)
        sqrt_spec[row] = t.sqrt_spec
        mu4[row] = t.mu4
        alpha4_rows[row] = t.alpha4
        it_total[row] = 0
        it_attempt[row] = 0
        per_attempt[row] = []

    def compact(kill):
        nonlocal x, sqrt_spec, mu4, alpha4_rows, it_total, it_attempt, per_attempt, job_of
        keep = np.asarray([r for r in range(len(job_of)) if r not in kill], dtype=int)
        x = x[keep]
        sqrt_spec = sqrt_spec[keep]
        mu4 = mu4[keep]
        it_total = it_total[keep]
        it_attempt = it_attempt[keep]
        job_of = job_of[keep]
        alpha4_rows = [alpha4_rows[r] for r in keep]
        per_attempt = [per_attempt[r] for r in keep]

    def project_torus(vec):
        u = vec @ w_fwd
        a = np.abs(u)
        p = np.where(a > _TINY, u / np.maximum(a, _TINY), 1.0 + 0j)
        p[:, 0] = np.where(u[:, 0].real >= 0, 1.0, -1.0)
        return ((p * sqrt_spec) @ w_back).real

    while len(job_of):
        pa = project_torus(x)
        fa = (1.0 + ga) * pa - ga * x
        cand = np.where(fa >= 0, 0.5, -0.5)
        pb = np.where(x >= 0, 0.5, -0.5)
        fb = (1.0 + gb) * pb - gb * x
        tb = project_torus(fb)
        x += beta * (cand - tb)
        it_total += 1
        it_attempt += 1

        # detection: spectral moduli first, exact integer confirmation after
        us = (2.0 * cand) @ w_fwd
        dev = np.max(np.abs(us.real * us.real + us.imag * us.imag - mu4), axis=1)
        hits = np.nonzero(dev < 0.25)[0]
        finished = set()
        for r in hits:
            s_int = (2.0 * cand[r]).astype(np.int64)
            if config.detect_exact and not _exact_match(s_int, alpha4_rows[r]):
                continue
            results[job_of[r]] = SolveResult(
                solution=_canonical_key(s_int, n),
                iterations=int(it_total[r]),
                per_attempt=per_attempt[r] + [int(it_attempt[r])],
                residual_trace=trace,
            )
            finished.add(int(r))

        if want_trace and 0 not in finished and it_total[0] % trace_every == 0:
            trace.append((int(it_total[0]), float(np.sum((cand[0] - tb[0]) ** 2))))

        if np.any(it_total >= config.max_iterations):
            for r in np.nonzero(it_total >= config.max_iterations)[0]:
                r = int(r)
                if r in finished:
                    continue
                results[job_of[r]] = SolveResult(
                    solution=None,
                    iterations=int(it_total[r]),
                    per_attempt=per_attempt[r] + [int(it_attempt[r])],
                    residual_trace=trace,
                )
                finished.add(r)
        if config.restart_after is not None and np.any(it_attempt >= config.restart_after):
            for r in np.nonzero(it_attempt >= config.restart_after)[0]:
                r = int(r)
                if r in finished:
                    continue
                per_attempt[r].append(int(it_attempt[r]))
                it_attempt[r] = 0
                x[r] = _start_vector(config.seed, int(job_of[r]), len(per_attempt[r]), n)

        if finished:
            for r in sorted(finished):
                if next_job < njobs:
                    refill(r, next_job)
                    next_job += 1
                    finished.discard(r)
            if finished:
                compact(finished)

    return results


def solve(alpha, config: Optional[SolverConfig] = None, trace_every=None) -> SolveResult:
    """Recover a binary key whose autocorrelation is `alpha`.

    Runs one trajectory from a seeded random start (components uniform in
    [-1, 1]), restarting when configured, until the candidate's exact integer
    autocorrelation matches or the iteration budget runs out.
    """
    config = config or SolverConfig()
    target = autocorrelation_target(alpha)
    return _run_jobs([target], config, trace_every=trace_every)[0]


def solve_runs(alpha, runs: int, config: Optional[SolverConfig] = None) -> list:
    """Independent solver runs on one instance; returns a SolveResult per run."""
    config = config or SolverConfig()
    target = autocorrelation_target(alpha)
    return _run_jobs([target] * runs, config)


def solve_each(alphas, config: Optional[SolverConfig] = None) -> list:
    """One solver run per instance, batched together (instances share N)."""
    config = config or SolverConfig()
    return _run_jobs([autocorrelation_target(a) for a in alphas], config)


def iteration_statistics(samples) -> IterationStats:
    """Summary statistics against the memoryless-iteration model.

    The iteration counts of independent runs should be exponential; reported
    are mean, sample std, their ratio, and the Kolmogorov-Smirnov deviation
    from the exponential CDF with the fitted mean.  Needs >= 30 samples.
    """
    xs = np.asarray(sorted(float(s) for s in samples))
    m = len(xs)
    if m < 30:
        raise ValueError("need at least 30 samples, got %d" % m)
    mean = float(xs.mean())
    std = float(xs.std(ddof=1))
    cdf = 1.0 - np.exp(-xs / mean)
    i = np.arange(1, m + 1)
    ks = float(max(np.max(np.abs(i / m - cdf)), np.max(np.abs(cdf - (i - 1) / m))))
    return IterationStats(count=m, mean=mean, std=std, cv=std / mean, ks_deviation=ks)
