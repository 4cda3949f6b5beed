"""Benchmark drivers, experiment harnesses, and integer-program emission.

All CSV payloads are byte-stable for fixed inputs: wall-clock timings live in
the report objects but never enter the text, and solver jobs are chunked at a
fixed width so the worker-pool size cannot perturb seed derivation.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .diffmap import SolverConfig, autocorrelation_target, iteration_statistics, solve_runs
from .instances import BinaryKey, random_binary, seed_sequence, symmetry_related
from .rings import CycloElement, RingElement, autocorrelation

__all__ = [
    "BenchReport",
    "BenchRow",
    "StatsReport",
    "UniquenessReport",
    "attack_csv",
    "bench_complexity",
    "discovery_csv",
    "emit_mip",
    "mip_satisfied",
    "non_uniqueness_experiment",
    "stats_distribution",
    "worker_count",
]

# jobs per solver call; matches the engine's lockstep batch so chunking does
# not change which random starts a given run receives
_CHUNK = 64


def worker_count() -> int:
    """Worker-pool width: BITRETRIEVAL_THREADS if set, else the CPU count."""
    raw = os.environ.get("BITRETRIEVAL_THREADS", "").strip()
    if raw:
        value = int(raw)
        if value < 1:
            raise ValueError("BITRETRIEVAL_THREADS must be a positive integer")
        return value
    return os.cpu_count() or 1


def _chunk_seed(seed: int, tag: int, index: int) -> int:
    return int(seed_sequence(seed, tag, index).generate_state(1)[0])


def _chunked_runs(alpha, runs: int, seed: int, tag: int,
                  config: Optional[SolverConfig]) -> list:
    """Independent solver runs, split into fixed-width chunks.

    Chunks fan out across a thread pool when one is available; results come
    back in chunk order either way, so the output is independent of the pool
    width.
    """
    base = config or SolverConfig()
    jobs = []
    start = 0
    index = 0
    while start < runs:
        size = min(_CHUNK, runs - start)
        jobs.append((index, size))
        start += size
        index += 1

    def run_chunk(job):
        ci, size = job
        cfg = replace(base, seed=_chunk_seed(seed, tag, ci))
        return solve_runs(alpha, size, cfg)

    width = min(worker_count(), len(jobs))
    if width <= 1:
        batches = [run_chunk(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=width) as pool:
            batches = list(pool.map(run_chunk, jobs))
    out = []
    for batch in batches:
        out.extend(batch)
    return out


def _instance_alpha(instance):
    if isinstance(instance, BinaryKey):
        return autocorrelation(instance.element)
    if isinstance(instance, (RingElement, CycloElement)):
        return instance
    raise TypeError("expected a BinaryKey or an autocorrelation element")


# ---------------------------------------------------------------------------
# complexity benchmark


@dataclass(frozen=True)
class BenchRow:
    n: int
    instance: int
    provenance: str
    runs: int
    solved: int
    mean_iterations: float
    std_iterations: float
    wall_seconds: float

    @property
    def flagged(self) -> bool:
        # a run that hit the iteration cap poisons the mean
        return self.solved < self.runs


@dataclass(frozen=True)
class BenchReport:
    rows: Tuple[BenchRow, ...]
    slope: Optional[float]
    intercept: Optional[float]
    slope_stderr: Optional[float]
    fit_points: Tuple[Tuple[int, float], ...]

    @property
    def slope_interval(self) -> Optional[Tuple[float, float]]:
        """95% confidence band for the fitted exponent."""
        if self.slope is None or self.slope_stderr is None:
            return None
        half = 1.96 * self.slope_stderr
        return (self.slope - half, self.slope + half)

    def csv(self) -> str:
        lines = ["N,instance,provenance,runs,solved,mean_iterations,std_iterations"]
        for r in self.rows:
            lines.append("%d,%d,%s,%d,%d,%.3f,%.3f" % (
                r.n, r.instance, r.provenance, r.runs, r.solved,
                r.mean_iterations, r.std_iterations))
        return "\n".join(lines) + "\n"


def bench_complexity(instances: Sequence[BinaryKey], runs_per_instance: int = 10,
                     seed: int = 0, config: Optional[SolverConfig] = None,
                     min_fit_n: int = 29) -> BenchReport:
    """Mean solver iterations per instance plus an exponential-growth fit.

    Each instance is solved `runs_per_instance` times from independent random
    starts; the fitted line is least squares of log2(mean iterations) against
    N.  Rows from the structured Legendre family, rows below `min_fit_n`
    (small sizes sit above the asymptotic trend), and rows with any run that
    exhausted its budget are excluded from the fit.  Fitting needs at least
    three distinct eligible N; otherwise the slope fields are None and only
    the per-row statistics are reported.
    """
    if runs_per_instance < 1:
        raise ValueError("need at least one run per instance")
    rows: List[BenchRow] = []
    for idx, inst in enumerate(instances):
        if not isinstance(inst, BinaryKey):
            raise TypeError("instances must be BinaryKey objects")
        alpha = autocorrelation(inst.element)
        t0 = time.perf_counter()
        results = _chunked_runs(alpha, runs_per_instance, seed, idx, config)
        wall = time.perf_counter() - t0
        counts = np.asarray([float(r.iterations) for r in results])
        rows.append(BenchRow(
            n=inst.element.n,
            instance=idx,
            provenance=inst.provenance,
            runs=runs_per_instance,
            solved=sum(1 for r in results if r.solution is not None),
            mean_iterations=float(counts.mean()),
            std_iterations=float(counts.std(ddof=1)) if len(counts) > 1 else 0.0,
            wall_seconds=wall,
        ))

    points = [(r.n, math.log2(r.mean_iterations)) for r in rows
              if not r.flagged and r.provenance != "legendre"
              and r.n >= min_fit_n and r.mean_iterations > 0]
    slope = intercept = stderr = None
    if len({n for n, _ in points}) >= 3:
        xs = np.asarray([p[0] for p in points], dtype=float)
        ys = np.asarray([p[1] for p in points], dtype=float)
        a = np.vstack([xs, np.ones_like(xs)]).T
        coef, *_ = np.linalg.lstsq(a, ys, rcond=None)
        slope, intercept = float(coef[0]), float(coef[1])
        resid = ys - a @ coef
        dof = len(xs) - 2
        if dof > 0:
            s2 = float(resid @ resid) / dof
            sxx = float(np.sum((xs - xs.mean()) ** 2))
            stderr = math.sqrt(s2 / sxx) if sxx > 0 else None
    return BenchReport(
        rows=tuple(rows),
        slope=slope,
        intercept=intercept,
        slope_stderr=stderr,
        fit_points=tuple(points),
    )


# ---------------------------------------------------------------------------
# iteration-count distribution


@dataclass(frozen=True)
class StatsReport:
    n: int
    runs: int
    counts: Tuple[int, ...]
    mean: float
    std: float
    cv: float
    ks_deviation: float
    non_exponential: bool
    wall_seconds: float

    def csv(self) -> str:
        lines = ["run,iterations"]
        lines.extend("%d,%d" % (i, c) for i, c in enumerate(self.counts))
        return "\n".join(lines) + "\n"

    def histogram(self, bins: int = 12) -> List[Tuple[float, float, int]]:
        """Equal-width bins of the normalized counts I / mean(I)."""
        xs = np.asarray(self.counts, dtype=float) / self.mean
        edges = np.linspace(0.0, float(xs.max()) + 1e-12, bins + 1)
        hist, _ = np.histogram(xs, bins=edges)
        return [(float(edges[i]), float(edges[i + 1]), int(hist[i]))
                for i in range(bins)]

    def histogram_csv(self, bins: int = 12) -> str:
        lines = ["bin_lo,bin_hi,count"]
        lines.extend("%.6f,%.6f,%d" % row for row in self.histogram(bins))
        return "\n".join(lines) + "\n"


def stats_distribution(instance, runs: int = 500, seed: int = 0,
                       config: Optional[SolverConfig] = None,
                       solver: Optional[Callable] = None) -> StatsReport:
    """Iteration counts of repeated runs on one instance.

    Under the memoryless-restart model the counts should be exponential, so
    std/mean near 1 is the expected signature; a ratio below 0.5 is flagged
    as non-exponential (a deterministic solver would give 0).  A custom
    `solver(alpha, runs, seed) -> iteration counts` can stand in for the
    difference map, which is how the flagging path is exercised.
    """
    if runs < 100:
        raise ValueError("need at least 100 runs for distribution statistics")
    alpha = _instance_alpha(instance)
    n = alpha.n
    t0 = time.perf_counter()
    if solver is not None:
        counts = [int(c) for c in solver(alpha, runs, seed)]
        if len(counts) != runs:
            raise ValueError("solver stub returned the wrong number of counts")
    else:
        counts = [int(r.iterations) for r in
                  _chunked_runs(alpha, runs, seed, 0x57A7, config)]
    wall = time.perf_counter() - t0
    stats = iteration_statistics(counts)
    return StatsReport(
        n=n,
        runs=runs,
        counts=tuple(counts),
        mean=stats.mean,
        std=stats.std,
        cv=stats.cv,
        ks_deviation=stats.ks_deviation,
        non_exponential=stats.cv < 0.5,
        wall_seconds=wall,
    )


# ---------------------------------------------------------------------------
# solution-uniqueness experiment


@dataclass(frozen=True)
class UniquenessReport:
    n: int
    trials: int
    unrelated: int
    unsolved: int
    wall_seconds: float

    @property
    def rate(self) -> float:
        return self.unrelated / self.trials


def non_uniqueness_experiment(n: int, trials: int = 2000, seed: int = 0,
                              config: Optional[SolverConfig] = None) -> UniquenessReport:
    """How often a solved instance returns a key unrelated to the planted one.

    Each trial plants a fresh random key, solves its autocorrelation, and
    compares the recovered key with the planted one up to the trivial
    symmetries; the unrelated fraction estimates the probability that an
    autocorrelation fails to pin down its sequence.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = np.random.Generator(np.random.PCG64(seed_sequence(seed, 0x0417)))
    keys = [random_binary(n, rng) for _ in range(trials)]
    base = config or SolverConfig()
    t0 = time.perf_counter()
    unrelated = unsolved = 0
    # chunk boundaries are fixed-width, so the worker pool cannot reshuffle
    # which solver seed a given trial sees
    from .diffmap import solve_each

    jobs = []
    start = 0
    index = 0
    while start < trials:
        size = min(_CHUNK, trials - start)
        jobs.append((index, start, size))
        start += size
        index += 1

    def run_chunk(job):
        ci, lo, size = job
        cfg = replace(base, seed=_chunk_seed(seed, 0x0418, ci))
        alphas = [autocorrelation(k.element) for k in keys[lo:lo + size]]
        return solve_each(alphas, cfg)

    width = min(worker_count(), len(jobs))
    if width <= 1:
        batches = [run_chunk(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=width) as pool:
            batches = list(pool.map(run_chunk, jobs))
    flat = [r for batch in batches for r in batch]
    for planted, result in zip(keys, flat):
        if result.solution is None:
            unsolved += 1
        elif not symmetry_related(result.solution, planted):
            unrelated += 1
    wall = time.perf_counter() - t0
    return UniquenessReport(n=n, trials=trials, unrelated=unrelated,
                            unsolved=unsolved, wall_seconds=wall)


# ---------------------------------------------------------------------------
# linear-relaxation model emission


def emit_mip(alpha) -> str:
    """Render an autocorrelation as a binary feasibility program.

    Variables b0..b_{N-1} are 0/1; writing b = b' - 1/2, every Fourier
    component of the sequence must land on the circle of radius
    a_i = sqrt(sigma_i(alpha)), which relaxes to the box constraints
    |sum_j cos(2 pi i j / N) b_j| <= a_i and likewise with sines.  Rows are
    named c<i>_lo/c<i>_hi and s<i>_lo/s<i>_hi; the i = 0 sine row is
    identically zero and omitted, leaving 4N - 2 inequality rows.
    Coefficients carry 12 significant digits.
    """
    target = autocorrelation_target(alpha)
    n = target.n
    a = target.sqrt_spec
    j = np.arange(n)
    lines = ["\\* bitretrieval N=%d *\\" % n, "min 0", "subject to"]
    for i in range(n):
        coefs = np.cos(2.0 * np.pi * i * j / n)
        terms = " ".join("%+.12g b%d" % (coefs[k], k) for k in range(n))
        shift = 0.5 * n if i == 0 else 0.0  # exact row sum of the cosines
        lines.append("c%d_lo: %s >= %.12g" % (i, terms, shift - a[i]))
        lines.append("c%d_hi: %s <= %.12g" % (i, terms, shift + a[i]))
    for i in range(1, n):
        coefs = np.sin(2.0 * np.pi * i * j / n)
        terms = " ".join("%+.12g b%d" % (coefs[k], k) for k in range(n))
        lines.append("s%d_lo: %s >= %.12g" % (i, terms, -a[i]))
        lines.append("s%d_hi: %s <= %.12g" % (i, terms, a[i]))
    lines.append("binary")
    lines.append(" ".join("b%d" % k for k in range(n)))
    lines.append("end")
    return "\n".join(lines) + "\n"


def mip_satisfied(model: str, bits, slack: float = 1e-6) -> bool:
    """Substitute a 0/1 assignment into an emitted model's constraints.

    `slack` absorbs the 12-digit truncation of the printed coefficients; the
    planted sequence sits exactly on several constraint boundaries, so a zero
    slack would reject it for rounding alone.
    """
    values = [int(b) for b in bits]
    if any(v not in (0, 1) for v in values):
        raise ValueError("assignment must be 0/1")
    for line in model.splitlines():
        line = line.strip()
        if ":" not in line or (">=" not in line and "<=" not in line):
            continue
        body = line.split(":", 1)[1]
        if ">=" in body:
            expr, rhs = body.split(">=")
            lower = True
        else:
            expr, rhs = body.split("<=")
            lower = False
        tokens = expr.split()
        total = 0.0
        for coef, var in zip(tokens[::2], tokens[1::2]):
            total += float(coef) * values[int(var[1:])]
        bound = float(rhs)
        if lower and total < bound - slack:
            return False
        if not lower and total > bound + slack:
            return False
    return True


# ---------------------------------------------------------------------------
# CSV writers for the lattice experiments


def attack_csv(reports) -> str:
    """Per-trial norm ratios of counterfeit attacks: N,trial,ratio."""
    lines = ["N,trial,ratio"]
    for rep in sorted(reports, key=lambda r: r.n):
        for t, ratio in enumerate(rep.ratios):
            lines.append("%d,%d,%.6f" % (rep.n, t, ratio))
    return "\n".join(lines) + "\n"


def discovery_csv(summaries) -> str:
    """Key-discovery success rates: N,trials,success_rate."""
    lines = ["N,trials,success_rate"]
    for s in sorted(summaries, key=lambda r: r.n):
        lines.append("%d,%d,%.6f" % (s.n, s.trials, s.success_rate))
    return "\n".join(lines) + "\n"
