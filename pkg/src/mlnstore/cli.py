"""``mlnstore`` command line: generate, bench, op, fit, convert.

Exit codes: 0 success, 1 runtime error, 2 usage error.  ``MLN_SEED`` in the
environment overrides ``--seed``.
"""

from __future__ import annotations

import argparse
import os
import sys
from contextlib import contextmanager

from mlnstore import errors, fileio
from mlnstore.backends import BACKENDS, make_store
from mlnstore.bench import (
    BENCH_OPERATORS,
    DEFAULT_BACKENDS,
    DEFAULT_SIZES,
    BenchConfig,
    fit_scaling,
    read_csv,
    run_bench,
    write_csv,
)
from mlnstore.generator import ErConfig, generate_er
from mlnstore.operators import OPERATORS, filter_layer


class UsageError(Exception):
    pass


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _name_list(text: str) -> tuple[str, ...]:
    return tuple(x for x in text.split(",") if x)


def _seed(args) -> int:
    env = os.environ.get("MLN_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"MLN_SEED must be an integer, got {env!r}")
    return args.seed


@contextmanager
def _open_out(path: str, mode: str):
    if path == "-":
        yield sys.stdout.buffer if "b" in mode else sys.stdout
    else:
        with open(path, mode, newline="" if "b" not in mode else None) as fh:
            yield fh


def _load(path: str, backend: str):
    store = make_store(backend)
    if path == "-":
        fileio.read_mln(sys.stdin.buffer, store)
    else:
        fileio.load(path, store)
    return store


def _save(store, path: str) -> None:
    with _open_out(path, "wb") as fh:
        fileio.write_mln(store, fh)


def _dimension(store, given: str | None) -> str:
    if given is not None:
        return given
    if store.d != 1:
        raise UsageError(f"--dim is required for a network with {store.d} dimensions")
    return store.schema.names[0]


# ------------------------------------------------------------------ commands


def cmd_generate(args) -> int:
    config = ErConfig(
        layers=args.layers,
        nodes=args.nodes,
        degree=args.degree,
        interlayer_prob=args.interlayer_prob,
        seed=_seed(args),
        dimension=args.dimension,
    )
    store = make_store(args.backend)
    generate_er(config, store)
    _save(store, args.out)
    return 0


def cmd_bench(args) -> int:
    backends = args.backends
    if args.dense_demo and "matrix-dense" not in backends:
        backends = backends + ("matrix-dense",)
    config = BenchConfig(
        operator=args.operator,
        backends=backends,
        sizes=args.sizes,
        degree=args.degree,
        reps=args.reps,
        warmups=args.warmups,
        seed=_seed(args),
        output=args.out,
        allow_dense=args.dense_demo,
    )
    config.validate()
    with _open_out(args.out, "w") as fh:
        write_csv(run_bench(config), fh)
    return 0


def cmd_op(args) -> int:
    store = _load(args.input, args.backend)
    dim = _dimension(store, args.dim)
    if args.operator == "filter":
        filter_layer(store, (dim, args.layer), args.where, args.into)
    else:
        OPERATORS[args.operator](store, dim, args.source, args.target, args.into)
    _save(store, args.out)
    return 0


def cmd_fit(args) -> int:
    with open(args.csv, newline="") as fh:
        records = read_csv(fh)
    print("backend,operator,slope,r2")
    for fit in fit_scaling(records, args.min_size, args.max_size):
        print(f"{fit.backend},{fit.operator},{fit.slope:.4f},{fit.r2:.4f}")
    return 0


def cmd_convert(args) -> int:
    _save(_load(args.input, args.backend), args.output)
    return 0


# -------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mlnstore", description="Multilayer network storage engine")
    sub = parser.add_subparsers(dest="command", required=True)

    def backend_flag(p):
        p.add_argument("--backend", choices=sorted(BACKENDS), default="adjacency")

    g = sub.add_parser("generate", help="write a seeded ER multiplex network")
    g.add_argument("--layers", type=int, default=2)
    g.add_argument("--nodes", type=int, required=True)
    g.add_argument("--degree", type=float, default=4.0)
    g.add_argument("--interlayer-prob", type=float, default=0.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--dimension", default="layer")
    g.add_argument("--out", default="-")
    backend_flag(g)
    g.set_defaults(func=cmd_generate)

    b = sub.add_parser("bench", help="time an operator over network sizes, CSV out")
    b.add_argument("--operator", choices=sorted(BENCH_OPERATORS), default="flatten")
    b.add_argument("--backends", type=_name_list, default=DEFAULT_BACKENDS)
    b.add_argument("--sizes", type=_int_list, default=DEFAULT_SIZES)
    b.add_argument("--degree", type=float, default=4.0)
    b.add_argument("--reps", type=int, default=5)
    b.add_argument("--warmups", type=int, default=1)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", default="-")
    b.add_argument(
        "--dense-demo",
        action="store_true",
        help="also run the capped dense matrix layout (backend 'matrix-dense')",
    )
    b.set_defaults(func=cmd_bench)

    o = sub.add_parser("op", help="apply one layer operator to a network file")
    ops = o.add_subparsers(dest="operator", required=True)
    for name in OPERATORS:
        p = ops.add_parser(name)
        p.add_argument("--input", required=True)
        p.add_argument("--out", default="-")
        p.add_argument("--dim")
        p.add_argument("--from", dest="source", required=True)
        p.add_argument("--from2", dest="target", required=True)
        p.add_argument("--into", required=True)
        backend_flag(p)
    f = ops.add_parser("filter")
    f.add_argument("--input", required=True)
    f.add_argument("--out", default="-")
    f.add_argument("--dim")
    f.add_argument("--layer", required=True)
    f.add_argument("--where", required=True)
    f.add_argument("--into", required=True)
    backend_flag(f)
    o.set_defaults(func=cmd_op)

    t = sub.add_parser("fit", help="log-log slope of median time vs size per backend")
    t.add_argument("csv")
    t.add_argument("--min-size", type=int)
    t.add_argument("--max-size", type=int)
    t.set_defaults(func=cmd_fit)

    c = sub.add_parser("convert", help="rewrite a network file in canonical form")
    c.add_argument("input")
    c.add_argument("output", nargs="?", default="-")
    backend_flag(c)
    c.set_defaults(func=cmd_convert)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, errors.UnknownBackend, errors.UnknownOperator) as e:
        parser.print_usage(sys.stderr)
        print(f"mlnstore: error: {e}", file=sys.stderr)
        return 2
    except (errors.MLNError, OSError) as e:
        print(f"mlnstore: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
