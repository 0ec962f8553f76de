"""Command line entry point: ``univhash <subcommand> ...``.

Exit status is 0 on success, 2 for configuration or argument errors and 3
when a resource guard refuses an enumeration.
"""
from __future__ import annotations

import argparse
import logging
import sys

from . import types as ty
from .config import ConfigError, load_config
from .coders import rows_for_rate
from .ensembles import derive_rng, kappa, make_ensemble
from .exponents import (BoundInputs, bound_channel_rhs, bound_source_rhs,
                        exponent_channel, exponent_source, is_vacuous)
from .gfq import ResourceGuardError, dense_text, triple_text
from .harness import cell_bound, run_experiment, write_csv

log = logging.getLogger("univhash")

EXIT_OK, EXIT_CONFIG, EXIT_GUARD = 0, 2, 3


def _floats(s):
    return [float(v) for v in s.replace(",", " ").split()]


def _dist(args) -> ty.Distribution:
    if args.bernoulli is not None:
        return ty.Distribution.bernoulli(args.bernoulli)
    if args.probs is not None:
        return ty.Distribution(_floats(args.probs))
    raise ConfigError("give --bernoulli or --probs", path="arguments")


def cmd_gen_matrix(args):
    spec = make_ensemble(args.ensemble, args.n, args.l, args.q, args.tau)
    A = spec.sample(derive_rng(args.seed))
    text = dense_text(A) + "\n" if args.dense else triple_text(A)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _simulate(kind):
    def run(args):
        config = load_config(args.config, kind)
        for w in config.warnings:
            log.warning("rate condition: %s", w)
        rows = run_experiment(config, timing=not args.no_timing)
        if args.out:
            with open(args.out, "w", newline="") as fh:
                write_csv(rows, fh)
        else:
            write_csv(rows, sys.stdout)
    return run


def cmd_exponent(args):
    """Exponent and the all-linear bound (alpha=1, beta=0) for each rate."""
    mu = _dist(args)
    n, q = args.n, mu.size
    print("rate,exponent,bound_rhs,argmin")
    for r in _floats(args.rates):
        la = rows_for_rate(n, r, q)
        if args.bsc is not None:
            W = ty.ConditionalDistribution.bsc(args.bsc)
            res = exponent_channel(W, mu, r, n)
            b = BoundInputs(n, la, kappa=kappa(0.0, args.xi, n, beta_is_small_o=True))
            rhs = bound_channel_rhs(b, res.value, q, W.out_size)
            arg = ";".join(" ".join(str(v) for v in row) for row in res.argmin_type.counts)
        else:
            res = exponent_source(mu, r, n)
            rhs = bound_source_rhs(BoundInputs(n, la, image_size=q ** la), res.value, q)
            arg = " ".join(str(v) for v in res.argmin_type.counts)
        print(f"{r!r},{res.value!r},{float(rhs)!r},{arg}")


def cmd_bound(args):
    config = load_config(args.config)
    print("n,rate,bound_rhs,vacuous,bound_params")
    for n in config.n_values:
        for r in config.rates:
            rhs, label = cell_bound(config, n, r)
            print(f"{n},{r!r},{float(rhs)!r},{int(is_vacuous(rhs))},{label}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="univhash", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-matrix", help="sample a matrix from an ensemble")
    g.add_argument("--ensemble", default="sparse", choices=["sparse", "all_linear"])
    g.add_argument("-n", type=int, required=True)
    g.add_argument("-l", type=int, required=True)
    g.add_argument("-q", type=int, default=2)
    g.add_argument("--tau", type=int, default=3)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--dense", action="store_true", help="write l lines of n digits")
    g.add_argument("-o", "--out")
    g.set_defaults(func=cmd_gen_matrix)

    for name, kind in (("source-sim", "source"), ("channel-sim", "channel"),
                       ("syndrome-sim", "syndrome")):
        s = sub.add_parser(name, help=f"run a {kind} coding experiment from a config file")
        s.add_argument("config")
        s.add_argument("-o", "--out", help="CSV path (default stdout)")
        s.add_argument("--no-timing", action="store_true",
                       help="write wall_time as 0 so output is byte-reproducible")
        s.set_defaults(func=_simulate(kind))

    e = sub.add_parser("exponent", help="source exponent, or channel exponent with --bsc")
    e.add_argument("--bernoulli", type=float)
    e.add_argument("--probs")
    e.add_argument("--bsc", type=float)
    e.add_argument("--rates", required=True)
    e.add_argument("-n", type=int, required=True)
    e.add_argument("--xi", type=float, default=1.0, help="kappa = n**xi for the channel bound")
    e.set_defaults(func=cmd_exponent)

    b = sub.add_parser("bound", help="evaluate the error bound for each config cell")
    b.add_argument("config")
    b.set_defaults(func=cmd_bound)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except ResourceGuardError as e:
        print(f"resource guard: {e}", file=sys.stderr)
        return EXIT_GUARD
    except (ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
