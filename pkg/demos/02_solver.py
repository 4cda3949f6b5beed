"""Recovering a binary sequence from its autocorrelation.

The difference map iterates between two constraint sets -- the hypercube of
+-1/2 vectors and the torus of sequences with the given Fourier moduli --
and a fixed point of the combined update is a solution.  Iteration counts
behave like draws from an exponential distribution: most runs are lucky or
unlucky, and only the mean carries the hardness information.
"""

import dataclasses

import numpy as np

from bitretrieval.diffmap import SolverConfig, iteration_statistics, solve, solve_runs
from bitretrieval.instances import pi_sequence, random_binary, symmetry_related
from bitretrieval.rings import autocorrelation


def main():
    key = pi_sequence(23)
    alpha = autocorrelation(key.element)

    print("=== one solve of the N=23 reference instance ===")
    res = solve(alpha, SolverConfig(seed=0), trace_every=25)
    print("converged:", res.converged, "after", res.iterations, "iterations")
    print("solution matches the planted key up to symmetry:",
          symmetry_related(res.solution, key))
    print("recovered coefficients:", res.solution.element.coeffs.tolist())
    print("residual trace (iteration, squared residual):")
    for it, r in res.residual_trace[:6]:
        print("   %6d  %.4f" % (it, r))

    print("\n=== iteration counts are memoryless ===")
    runs = solve_runs(alpha, 120, SolverConfig(seed=1))
    counts = [r.iterations for r in runs]
    stats = iteration_statistics(counts)
    print("mean %.0f, std %.0f, std/mean %.2f (exponential -> 1)"
          % (stats.mean, stats.std, stats.cv))
    print("KS deviation from the fitted exponential: %.3f" % stats.ks_deviation)
    hist, edges = np.histogram([c / stats.mean for c in counts], bins=8)
    for lo, hi, c in zip(edges, edges[1:], hist):
        print("   %4.1f-%4.1f %s" % (lo, hi, "#" * c))

    print("\n=== random instances at a few sizes ===")
    for n in (19, 29, 31):
        inst = random_binary(n, seed=n)
        r = solve(autocorrelation(inst.element), SolverConfig(seed=2))
        print("N=%2d solved in %6d iterations" % (n, r.iterations))

    print("\n=== the solver parameters are exposed ===")
    cfg = SolverConfig(seed=3)
    print("default beta %.1f, gammas %.2f / %.2f" % (cfg.beta, cfg.ga, cfg.gb))
    slow = dataclasses.replace(cfg, beta=0.3)
    r = solve(alpha, slow)
    print("beta=0.3 run: %d iterations (tuning matters)" % r.iterations)


if __name__ == "__main__":
    main()
