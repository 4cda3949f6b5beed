"""Command-line surface for instance generation, solving, benchmarks,
signatures, watermarking, and the lattice experiments.

Every command validates sizes and file formats before doing real work; CSV
and model outputs are byte-stable for fixed flags and seed.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from . import bench, lattice, signature, watermark
from .diffmap import SolverConfig, solve
from .instances import BinaryKey, hadamard_legendre, pi_sequence, random_binary
from .rings import (
    CycloElement,
    RingElement,
    autocorrelation,
    is_binary,
    is_odd_prime,
    read_element,
    write_element,
)

_PROVENANCES = ("pi", "legendre", "random")


def _require_prime(n: int) -> int:
    if not is_odd_prime(n):
        raise ValueError("N must be an odd prime, got %d" % n)
    return n


def _parse_ns(text: str) -> List[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValueError("expected a comma-separated list of integers: %r" % text)
    if not values:
        raise ValueError("empty size list")
    return [_require_prime(v) for v in values]


def _make_key(n: int, provenance: str, seed: int) -> BinaryKey:
    _require_prime(n)
    if provenance == "pi":
        return pi_sequence(n)
    if provenance == "legendre":
        return hadamard_legendre(n)
    if provenance == "random":
        return random_binary(n, seed)
    raise ValueError("unknown provenance %r" % provenance)


def _load_instance(path: str):
    """Instance file -> (element, provenance tag or None)."""
    el, comments = read_element(path)
    return el, comments.get("provenance")


def _instance_target(el):
    """Key files become their autocorrelation; autocorrelations pass through."""
    if isinstance(el, CycloElement) and is_binary(el):
        return autocorrelation(el)
    return el


def _solver_config(args) -> SolverConfig:
    kwargs = {"seed": args.seed}
    if getattr(args, "beta", None) is not None:
        kwargs["beta"] = args.beta
    return SolverConfig(**kwargs)


def _write_text(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _read_image(path: str) -> watermark.GrayImage:
    with open(path, "rb") as fh:
        return watermark.read_pgm(fh.read())


def _plan(args) -> watermark.BlockPlan:
    return watermark.BlockPlan(block_w=args.block_w, block_h=args.block_h)


# ---------------------------------------------------------------------------
# commands


def _cmd_gen(args) -> int:
    key = _make_key(args.n, args.provenance, args.seed)
    if args.kind == "key":
        el = key.element
    else:
        el = autocorrelation(key.element)
    comments = {"provenance": key.provenance, "kind": args.kind}
    write_element(el, args.out, comments=comments)
    print("wrote %s instance N=%d (%s) to %s" % (
        args.kind, args.n, key.provenance, args.out))
    return 0


def _cmd_solve(args) -> int:
    el, provenance = _load_instance(args.in_path)
    target = _instance_target(el)
    result = solve(target, _solver_config(args))
    if result.solution is None:
        print("unsolved after %d iterations" % result.iterations)
        return 1
    print("solved N=%d in %d iterations" % (target.n, result.iterations))
    if args.out:
        write_element(result.solution.element, args.out,
                      comments={"provenance": "solver"})
        print("solution written to %s" % args.out)
    if provenance and isinstance(el, CycloElement) and is_binary(el):
        from .instances import symmetry_related

        related = symmetry_related(result.solution, BinaryKey(el, provenance))
        print("symmetry-related to the planted key: %s" % related)
    return 0


def _cmd_bench(args) -> int:
    instances = [_make_key(n, args.provenance, args.seed) for n in _parse_ns(args.n)]
    if args.legendre_n:
        instances.extend(_make_key(n, "legendre", args.seed)
                         for n in _parse_ns(args.legendre_n))
    report = bench.bench_complexity(instances, args.runs, args.seed,
                                    config=_solver_config(args))
    _write_text(args.out, report.csv())
    if report.slope is not None:
        lo, hi = report.slope_interval
        print("slope %.4f (95%% interval %.4f..%.4f) over %d points" % (
            report.slope, lo, hi, len(report.fit_points)))
    else:
        print("fit refused: need >= 3 distinct eligible N")
    return 0


def _cmd_stats(args) -> int:
    if args.in_path:
        el, _ = _load_instance(args.in_path)
        instance = _instance_target(el)
    else:
        instance = _make_key(args.n, args.provenance, args.seed)
    report = bench.stats_distribution(instance, args.runs, args.seed,
                                      config=_solver_config(args))
    _write_text(args.out, report.csv())
    print("N=%d runs=%d mean=%.1f std/mean=%.3f%s" % (
        report.n, report.runs, report.mean, report.cv,
        " [non-exponential]" if report.non_exponential else ""))
    return 0


def _cmd_keygen(args) -> int:
    pair = signature.keygen(_require_prime(args.n), candidates=args.candidates,
                            seed=args.seed)
    signature.save_private_key(args.out + ".key", pair.private_key)
    signature.save_public_key(args.out + ".pub", pair.public_key)
    print("wrote %s.key and %s.pub (N=%d)" % (args.out, args.out, args.n))
    return 0


def _cmd_sign(args) -> int:
    key = signature.load_private_key(args.key)
    n = key.element.n
    if args.digest:
        with open(args.in_path, "rb") as fh:
            rho = signature.hash_to_element(fh.read(), n)
    else:
        el, _ = _load_instance(args.in_path)
        if not isinstance(el, RingElement):
            raise ValueError("sign expects a cyclic-side element file")
        rho = el
    signed = signature.sign(rho, key, quantizer=args.quantizer)
    signature.write_signed_element(args.out, signed, quantizer=args.quantizer)
    print("signed N=%d: offset %.3f, squared distance %.1f" % (
        n, signed.epsilon, signed.distance))
    return 0


def _cmd_verify(args) -> int:
    alpha = signature.load_public_key(args.pub)
    data, _, _ = signature.read_signed_element(args.in_path)
    rho = None
    if args.digest:
        with open(args.digest, "rb") as fh:
            rho = signature.hash_to_element(fh.read(), alpha.n)
    elif args.rho:
        el, _ = _load_instance(args.rho)
        if not isinstance(el, RingElement):
            raise ValueError("original data must be a cyclic-side element file")
        rho = el
    big_delta = None
    if rho is not None:
        big_delta = signature.default_big_delta(alpha, factor=args.delta_factor)
    result = signature.verify(data, alpha, tolerance=args.tolerance,
                              rho=rho, big_delta=big_delta)
    if result.accepted:
        print("accepted (deviation %.2e)" % result.deviation)
        return 0
    print("rejected: %s" % result.reason)
    return 1


def _cmd_watermark_sign(args) -> int:
    key = signature.load_private_key(args.key)
    plan = _plan(args)
    if key.element.n != plan.n:
        raise ValueError("key size %d does not match the block plan (N=%d)"
                         % (key.element.n, plan.n))
    img = _read_image(args.in_path)
    scaled = watermark.rescale_range(img, args.lo, args.hi)
    signed, stats = watermark.watermark_sign_with_stats(
        scaled, plan, key, quantizer=args.quantizer)
    with open(args.out, "wb") as fh:
        fh.write(watermark.write_pgm(signed))
    print("signed %d blocks: rms %.2f, clamped %d, amplified %d, flat %d" % (
        stats.blocks, stats.rms_change, stats.clamped_pixels,
        stats.amplified_blocks, stats.fallback_blocks))
    return 0


def _cmd_watermark_verify(args) -> int:
    alpha = signature.load_public_key(args.pub)
    img = _read_image(args.in_path)
    grid = watermark.watermark_verify(img, _plan(args), alpha,
                                      tolerance=args.tolerance)
    print(watermark.verification_summary(grid))
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(watermark.write_pbm(~grid))
    return 0 if bool(grid.all()) else 1


def _cmd_forge_demo(args) -> int:
    alpha = signature.load_public_key(args.pub)
    img = _read_image(args.in_path)
    forged, report = watermark.forge_demo(img, _plan(args), alpha,
                                          tolerance=args.tolerance)
    with open(args.out, "wb") as fh:
        fh.write(watermark.write_pgm(forged))
    print("counterfeit key from block (%d,%d): perp norm %.0f vs %.0f honest"
          % (report.block_row, report.block_col, report.counterfeit_norm,
             report.key_norm_estimate))
    print("noise factor %.1f predicted; measured rms %.2f; "
          "%d/%d blocks pass divisibility" % (
              report.predicted_factor, report.measured_rms,
              report.blocks_passing, report.blocks))
    return 0


def _cmd_attack(args) -> int:
    reports = [lattice.counterfeit_attack(n, seed=args.seed, trials=args.runs)
               for n in _parse_ns(args.n)]
    _write_text(args.out, bench.attack_csv(reports))
    for rep in reports:
        print("N=%d best ratio %.3f over %d trials" % (
            rep.n, rep.best_ratio, rep.trials))
    return 0


def _cmd_ideal_discovery(args) -> int:
    summaries = [lattice.ideal_discovery_experiment(n, seed=args.seed,
                                                    trials=args.runs)
                 for n in _parse_ns(args.n)]
    _write_text(args.out, bench.discovery_csv(summaries))
    for s in summaries:
        print("N=%d success rate %.3f over %d trials" % (
            s.n, s.success_rate, s.trials))
    return 0


def _cmd_emit_mip(args) -> int:
    if args.in_path:
        el, _ = _load_instance(args.in_path)
        target = _instance_target(el)
    else:
        target = autocorrelation(_make_key(args.n, args.provenance,
                                           args.seed).element)
    _write_text(args.out, bench.emit_mip(target))
    return 0


# ---------------------------------------------------------------------------
# argument wiring


def _add_in(p, required=True, help="input file"):
    p.add_argument("--in", dest="in_path", required=required, help=help)


def _add_out(p, required=False, help="output file (stdout when omitted)"):
    p.add_argument("--out", required=required, help=help)


def _add_plan(p):
    p.add_argument("--block-w", type=int, default=20, help="block width in pixels")
    p.add_argument("--block-h", type=int, default=19, help="block height in pixels")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bitretrieval",
        description="Binary sequences from cyclic autocorrelations: solver, "
                    "signatures, watermarking, and lattice experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate an instance file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--provenance", choices=_PROVENANCES, default="random")
    p.add_argument("--kind", choices=("key", "autocorrelation"), default="key")
    _add_out(p, required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("solve", help="run the difference-map solver on an instance")
    _add_in(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--beta", type=float, default=None,
                   help="difference-map parameter")
    _add_out(p, help="write the recovered key here")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("bench", help="iteration benchmark and complexity fit")
    p.add_argument("--n", required=True, help="comma-separated sizes")
    p.add_argument("--legendre-n", default="",
                   help="extra sizes run with the Legendre construction")
    p.add_argument("--provenance", choices=_PROVENANCES, default="pi")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--beta", type=float, default=None)
    _add_out(p)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("stats", help="iteration-count distribution on one instance")
    p.add_argument("--n", type=int, default=41)
    p.add_argument("--provenance", choices=_PROVENANCES, default="pi")
    _add_in(p, required=False, help="instance file (overrides --n)")
    p.add_argument("--runs", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--beta", type=float, default=None)
    _add_out(p)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("keygen", help="draw a private key and publish its autocorrelation")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--candidates", type=int, default=64,
                   help="keys sampled before keeping the largest-norm one")
    p.add_argument("--out", required=True, help="path prefix for .key/.pub")
    p.set_defaults(func=_cmd_keygen)

    p = sub.add_parser("sign", help="sign a data element or document digest")
    _add_in(p, help="element file, or any file with --digest")
    p.add_argument("--key", required=True, help="private key file")
    p.add_argument("--quantizer", default=signature.DEFAULT_QUANTIZER,
                   help="o, z, or zr:<r>")
    p.add_argument("--digest", action="store_true",
                   help="hash the input file into a data element first")
    _add_out(p, required=True)
    p.set_defaults(func=_cmd_sign)

    p = sub.add_parser("verify", help="check a signed element against a public key")
    _add_in(p, help="signed element file")
    p.add_argument("--pub", required=True, help="public key file")
    p.add_argument("--tolerance", type=float, default=1e-2)
    p.add_argument("--rho", help="original data element (enables the distance check)")
    p.add_argument("--digest", help="original document (hashed to the data element)")
    p.add_argument("--delta-factor", type=float, default=4.0,
                   help="distance radius as a multiple of the expected error")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("watermark-sign", help="rescale and sign an image blockwise")
    _add_in(p, help="source PGM")
    p.add_argument("--key", required=True)
    p.add_argument("--quantizer", default=signature.DEFAULT_QUANTIZER)
    _add_plan(p)
    p.add_argument("--lo", type=int, default=5, help="rescale lower bound")
    p.add_argument("--hi", type=int, default=250, help="rescale upper bound")
    _add_out(p, required=True, help="signed PGM")
    p.set_defaults(func=_cmd_watermark_sign)

    p = sub.add_parser("watermark-verify", help="per-block verification map")
    _add_in(p, help="signed PGM")
    p.add_argument("--pub", required=True)
    p.add_argument("--tolerance", type=float, default=1e-2)
    _add_plan(p)
    _add_out(p, help="failure mask PBM")
    p.set_defaults(func=_cmd_watermark_verify)

    p = sub.add_parser("forge-demo", help="counterfeit a watermark from public data")
    _add_in(p, help="honestly signed PGM")
    p.add_argument("--pub", required=True)
    p.add_argument("--tolerance", type=float, default=1e-2)
    _add_plan(p)
    _add_out(p, required=True, help="forged PGM")
    p.set_defaults(func=_cmd_forge_demo)

    p = sub.add_parser("attack", help="counterfeit-key search by lattice reduction")
    p.add_argument("--n", required=True, help="comma-separated sizes")
    p.add_argument("--runs", type=int, default=20, help="trials per size")
    p.add_argument("--seed", type=int, default=0)
    _add_out(p)
    p.set_defaults(func=_cmd_attack)

    p = sub.add_parser("ideal-discovery", help="private-key discovery experiment")
    p.add_argument("--n", required=True, help="comma-separated sizes")
    p.add_argument("--runs", type=int, default=50, help="trials per size")
    p.add_argument("--seed", type=int, default=0)
    _add_out(p)
    p.set_defaults(func=_cmd_ideal_discovery)

    p = sub.add_parser("emit-mip", help="binary feasibility model for an instance")
    _add_in(p, required=False, help="instance file (key or autocorrelation)")
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--provenance", choices=_PROVENANCES, default="pi")
    p.add_argument("--seed", type=int, default=0)
    _add_out(p)
    p.set_defaults(func=_cmd_emit_mip)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "emit-mip" and not args.in_path and args.n <= 0:
        parser.error("emit-mip needs --in or --n")
    try:
        return args.func(args)
    except (ValueError, TypeError, RuntimeError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
