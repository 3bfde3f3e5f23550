"""Command line interface: ``qlump generate | detect | bench | spectrum``.

Exit codes: 0 success, 1 runtime error, 2 usage error.
"""
import argparse
import math
import sys
from pathlib import Path


from .bench import SweepConfig, format_summary, parse_grid, run_sweep, write_records
from .errors import AbsorbingAggregate, LumpingError
from .generators import CLASSES, make_instance
from .io import read_matrix, write_matrix, write_partition
from .markov import spectrum
from .methods import Method, detect
from .metrics import waiting_time
from .spectral import build_invariance_matrix, self_adjoint_eigs

METHOD_NAMES = {"q": Method.Q_METASTABLE, **{m.value: m for m in Method}}


class UsageError(Exception):
    pass


def _probability(text):
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is outside [0, 1]")
    return value


def _seed(text):
    value = int(text)
    if value < 0 or value >= 2**64:
        raise argparse.ArgumentTypeError("seed must be a non-negative 64-bit integer")
    return value


def parse_shifts(text):
    """``re,im[;re,im...]`` into a list of complex numbers."""
    shifts = []
    for item in text.split(";"):
        item = item.strip()
        if not item:
            continue
        parts = item.split(",")
        if len(parts) not in (1, 2):
            raise ValueError(f"bad shift {item!r}; expected re,im")
        re = float(parts[0])
        im = float(parts[1]) if len(parts) == 2 else 0.0
        shifts.append(complex(re, im))
    if not shifts:
        raise ValueError("no shifts given")
    return shifts


def _shift_arg(text):
    try:
        return parse_shifts(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _num(x):
    return repr(float(x)) if math.isfinite(x) else str(x)


def cmd_generate(args):
    if args.cls == "sparse":
        if args.delta is None:
            raise UsageError("--class sparse needs --delta")
        if args.delta < args.epsilon:
            raise UsageError(f"need delta >= epsilon (got delta={args.delta}, epsilon={args.epsilon})")
    inst = make_instance(args.cls, args.n, args.epsilon, args.seed, m=args.m, delta=args.delta)
    prefix = Path(args.out)
    provenance = f"class={args.cls}\n" + inst.config.to_header()
    matrix_path = prefix.with_suffix(".mtx")
    partition_path = prefix.with_suffix(".csv")
    write_matrix(inst.matrix, matrix_path, comment=provenance)
    write_partition(inst.truth, partition_path)
    print(provenance)
    print(f"matrix={matrix_path}")
    print(f"partition={partition_path}")


def cmd_detect(args):
    p = read_matrix(args.matrix)
    method = METHOD_NAMES[args.method]
    options = {}
    if args.shifts is not None:
        if method is not Method.Q_GENERAL:
            raise UsageError("--lambda only applies to --method q-general")
        options["shifts"] = args.shifts
    if method is Method.Q_GENERAL:
        if args.n_shifts is not None:
            options["n_shifts"] = args.n_shifts
        options["repeats"] = args.repeats
    if method is Method.SVD:
        options["vectors"] = args.svd_vectors
    if method is Method.ITER_CLUSTER:
        options["max_iter"] = args.max_iter
    result = detect(method, p, args.k, seed=args.seed, **options)
    try:
        tau = waiting_time(p, result.partition)
    except AbsorbingAggregate:
        tau = math.inf
    if args.out:
        write_partition(result.partition, args.out)
    print("method,k,delta,tau_raw")
    print(f"{method.value},{args.k},{_num(result.delta)},{_num(tau)}")


def cmd_bench(args):
    try:
        grid = parse_grid(args.eps)
        config = SweepConfig(
            args.cls, grid, n=args.n, trials=args.trials, methods=args.methods.split(","),
            delta=args.delta, master_seed=args.seed,
            k_policy="truth" if args.k == "truth" else int(args.k), m=args.m,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    records = run_sweep(config, jobs=args.jobs, timing=args.timing)
    write_records(records, args.out)
    print(format_summary(records))


def _svg_scatter(points, path, title):
    size, pad = 400, 20
    scale = (size - 2 * pad) / 2.2
    cx = cy = size / 2
    dots = "".join(
        f'<circle cx="{cx + scale * z.real:.2f}" cy="{cy - scale * z.imag:.2f}" r="2.5"/>' for z in points
    )
    svg = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">'
        f"<title>{title}</title>"
        f'<circle cx="{cx}" cy="{cy}" r="{scale:.2f}" fill="none" stroke="#999"/>'
        f'<line x1="{pad}" y1="{cy}" x2="{size - pad}" y2="{cy}" stroke="#ccc"/>'
        f'<line x1="{cx}" y1="{pad}" x2="{cx}" y2="{size - pad}" stroke="#ccc"/>'
        f"<g fill=\"#1f4e99\">{dots}</g></svg>\n"
    )
    Path(path).write_text(svg)


def cmd_spectrum(args):
    p = read_matrix(args.matrix)
    values = spectrum(p).eigenvalues
    with open(args.out, "w") as fh:
        fh.write("re,im\n")
        for z in values:
            fh.write(f"{float(z.real)!r},{float(z.imag)!r}\n")
    if args.shift is not None:
        if len(args.shift) != 1:
            raise UsageError("--shift takes a single re,im value")
        mu = self_adjoint_eigs(build_invariance_matrix(p, args.shift[0])).eigenvalues
        q_out = args.q_out or str(Path(args.out).with_name(Path(args.out).stem + "_q.csv"))
        with open(q_out, "w") as fh:
            fh.write("index,mu\n")
            for i, m in enumerate(mu):
                fh.write(f"{i},{float(m)!r}\n")
    if args.svg:
        _svg_scatter(values, args.svg, f"spectrum of {Path(args.matrix).name}")


def build_parser():
    parser = argparse.ArgumentParser(prog="qlump", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a planted instance (.mtx) and its partition (.csv)")
    gen.add_argument("--class", dest="cls", choices=CLASSES, required=True)
    gen.add_argument("--n", type=int, default=200)
    gen.add_argument("--m", type=int, default=None, help="block count (default: drawn from {3,4,5})")
    gen.add_argument("--epsilon", type=_probability, default=0.0)
    gen.add_argument("--delta", type=_probability, default=None)
    gen.add_argument("--seed", type=_seed, default=0)
    gen.add_argument("--out", default="instance", help="output prefix")
    gen.set_defaults(func=cmd_generate)

    det = sub.add_parser("detect", help="find a partition of a matrix file")
    det.add_argument("matrix")
    det.add_argument("--method", choices=sorted(METHOD_NAMES), default="q-metastable")
    det.add_argument("--k", type=int, required=True)
    det.add_argument("--seed", type=_seed, default=0)
    det.add_argument("--lambda", dest="shifts", type=_shift_arg, default=None,
                     help="explicit shifts re,im[;re,im...] for q-general")
    det.add_argument("--n-shifts", type=int, default=None)
    det.add_argument("--repeats", type=int, default=10)
    det.add_argument("--svd-vectors", choices=("both", "left", "right"), default="both")
    det.add_argument("--max-iter", type=int, default=200)
    det.add_argument("--out", default=None, help="partition CSV to write")
    det.set_defaults(func=cmd_detect)

    ben = sub.add_parser("bench", help="epsilon sweep over planted instances")
    ben.add_argument("--class", dest="cls", choices=CLASSES, required=True)
    ben.add_argument("--n", type=int, default=200)
    ben.add_argument("--m", type=int, default=None)
    ben.add_argument("--eps", required=True, help="start:stop:step (inclusive) or a,b,c")
    ben.add_argument("--delta", type=_probability, default=None)
    ben.add_argument("--trials", type=int, default=20)
    ben.add_argument("--methods", default="q,p-eigs,svd,froyland,iter-cluster")
    ben.add_argument("--k", default="truth", help="'truth' or a fixed aggregate count")
    ben.add_argument("--seed", type=_seed, default=0)
    ben.add_argument("--jobs", type=int, default=1)
    ben.add_argument("--timing", action="store_true", help="fill wall_ms (makes output non-reproducible)")
    ben.add_argument("--out", default="bench.csv")
    ben.set_defaults(func=cmd_bench)

    spect = sub.add_parser("spectrum", help="eigenvalues of P (and optionally of Q(shift))")
    spect.add_argument("matrix")
    spect.add_argument("--out", default="spectrum.csv")
    spect.add_argument("--shift", type=_shift_arg, default=None, help="re,im")
    spect.add_argument("--q-out", default=None)
    spect.add_argument("--svg", default=None)
    spect.set_defaults(func=cmd_spectrum)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (LumpingError, OSError) as exc:
        print(f"qlump: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
