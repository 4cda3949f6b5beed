"""How far does lattice reduction get against the hidden factor?

The public autocorrelation pins down a short list of candidate ideals, and
the ideal of the private key has a simple Hermite-normal-form basis.  Two
experiments probe whether basis reduction can exploit this: searching the
public data's lattice for short (counterfeit-quality) vectors, and reducing
the ideal basis directly to rediscover the planted binary key.  Both work at
toy sizes and fall off a cliff well before cryptographic ones.
"""

from bitretrieval.algnorm import algebraic_norm
from bitretrieval.bench import attack_csv, discovery_csv, emit_mip
from bitretrieval.instances import pi_sequence
from bitretrieval.lattice import (
    counterfeit_attack,
    hnf_avector,
    ideal_discovery_experiment,
)
from bitretrieval.rings import autocorrelation


def main():
    print("=== the ideal of the N=23 reference key, compressed ===")
    key = pi_sequence(23)
    d, avec = hnf_avector(key)
    print("index d = %d = algebraic norm: %s" % (d, d == algebraic_norm(key.element)))
    print("basis residues a_j (j = 1..22):")
    print(avec)
    print("a_1 + 1 == d:", avec[0] + 1 == d)

    print("\n=== counterfeit search on public data ===")
    # ratio < 1.1 means the reduction found a vector as short as a binary
    # one, i.e. a usable counterfeit
    reports = [counterfeit_attack(n, seed=0, trials=8) for n in (23, 43, 67)]
    for rep in reports:
        print("N=%2d best ratio %.3f, median %.3f"
              % (rep.n, rep.best_ratio, sorted(rep.ratios)[len(rep.ratios) // 2]))
    print("\nper-trial data as CSV:")
    print(attack_csv(reports[:1]).strip())

    print("\n=== rediscovering the key from its ideal ===")
    summaries = [ideal_discovery_experiment(n, seed=0, trials=12) for n in (29, 43, 53)]
    for s in summaries:
        print("N=%2d recovered the key in %2d/%d trials" % (s.n, s.successes, s.trials))
    print("\n" + discovery_csv(summaries).strip())

    print("\n=== the same instance as a 0/1 feasibility program ===")
    model = emit_mip(autocorrelation(pi_sequence(23).element))
    lines = model.splitlines()
    print("\n".join(lines[:6]))
    print("... (%d constraint rows total)" % sum(1 for l in lines if ">=" in l or "<=" in l))


if __name__ == "__main__":
    main()
