"""Command-line interface.

Subcommands: cluster (assignments plus oracle agreement), spectrum
(recovered vs oracle eigenvalues), simulate (trajectory export), bench
(analog settle-time statistics), and gen (dataset files).  Exit codes:
0 success, 1 usage error, 2 numerical or data failure.

Result files are byte-deterministic for a fixed command line; the
wall-clock duration and other run metadata go to a sidecar manifest, not
the result.  With --plot, report data is additionally rendered to a PNG
next to the output file.  WAVECLUSTER_LOG={error,info,debug} controls
verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analog import AnalogConfig, settle_mvm
from .cluster import (
    ClusterConfig,
    agreement,
    classical_cluster,
    recovered_spectrum,
    result_document,
    wave_dmd_cluster,
)
from .datasets import gen_planted_partition, load_karate
from .dynamics import random_u0, schrodinger_state, simulate
from .errors import ValidationError, WaveclusterError
from .graph import build_operators, load_graph

logger = logging.getLogger(__name__)

_LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}

_BACKEND_FLAGS = {
    "discrete": "discrete",
    "schrodinger": "schrodinger",
    "closed-form": "closed_form",
}


class UsageError(Exception):
    """Bad command line or unreadable input path (exit code 1)."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage problems; the documented
    # contract is exit 1, so raise and let cli_main map it.
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _configure_logging() -> None:
    name = os.environ.get("WAVECLUSTER_LOG", "error").strip().lower()
    level = _LOG_LEVELS.get(name)
    if level is None:
        logger.warning("unknown WAVECLUSTER_LOG=%r, using error", name)
        level = logging.ERROR
    root = logging.getLogger("wavecluster")
    root.setLevel(level)
    if not root.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        root.addHandler(handler)


def _add_common(p: argparse.ArgumentParser, *, with_pipeline: bool) -> None:
    p.add_argument("--input", type=str, help="edge-list file")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--output", type=str, help="result file (default stdout)")
    p.add_argument(
        "--format", choices=("json", "csv"), default=None, help="output format"
    )
    p.add_argument(
        "--plot", action="store_true", help="also render a PNG next to --output"
    )
    if with_pipeline:
        p.add_argument(
            "--backend",
            choices=tuple(_BACKEND_FLAGS),
            default="discrete",
            help="dynamics backend (default discrete)",
        )
        p.add_argument(
            "--mvm",
            choices=("direct", "analog"),
            default="direct",
            help="matrix-vector strategy for the discrete backend",
        )
        p.add_argument("--c", type=float, default=1.0, help="wave speed (default 1.0)")
        p.add_argument(
            "--tmax", type=int, default=None, help="samples per node (default 4n)"
        )
        p.add_argument(
            "--svd-tol", type=float, default=1e-8, help="SVD truncation (default 1e-8)"
        )
        p.add_argument(
            "--epsilon",
            type=float,
            default=1e-8,
            help="analog convergence threshold (default 1e-8)",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wavecluster", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="cluster a graph and compare to the oracle")
    _add_common(p, with_pipeline=True)
    p.add_argument("--k", type=int, default=1, help="sign bits (default 1)")

    p = sub.add_parser("spectrum", help="recovered vs oracle eigenvalues")
    _add_common(p, with_pipeline=True)

    p = sub.add_parser("simulate", help="export a wave trajectory")
    _add_common(p, with_pipeline=True)

    p = sub.add_parser("bench", help="analog settle-time statistics")
    _add_common(p, with_pipeline=False)
    p.add_argument("--n", type=int, default=8, help="matrix size (default 8)")
    p.add_argument("--trials", type=int, default=100, help="trial count (default 100)")
    p.add_argument(
        "--epsilon", type=float, default=1e-8, help="convergence threshold"
    )

    p = sub.add_parser("gen", help="write dataset files")
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--planted", action="store_true", help="planted partition")
    kind.add_argument("--karate", action="store_true", help="bundled karate club")
    p.add_argument("--n", type=int, default=80, help="node count")
    p.add_argument("--clusters", type=int, default=4, help="planted cluster count")
    p.add_argument("--p-in", type=float, default=0.5, help="intra-block probability")
    p.add_argument("--p-out", type=float, default=0.02, help="inter-block probability")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    p.add_argument("--output", type=str, help="edge-list path (default stdout)")

    return parser


def _fmt(x: float) -> str:
    return repr(float(x))


def _read_graph(args):
    if not getattr(args, "input", None):
        raise UsageError("--input is required for this command")
    path = Path(args.input)
    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read input file {path}: {exc}") from exc
    return load_graph(text)


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        Path(output).write_text(text)
        logger.info("wrote %s", output)
    else:
        sys.stdout.write(text)


def _json_text(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _cluster_config(args, k: int = 1) -> ClusterConfig:
    return ClusterConfig(
        k=k,
        c=args.c,
        t_max=args.tmax,
        backend=_BACKEND_FLAGS[args.backend],
        mvm=args.mvm,
        seed=args.seed,
        svd_tol=args.svd_tol,
        analog_epsilon=args.epsilon,
    )


def _sidecar(output: str, suffix: str) -> Path:
    return Path(output).with_suffix(suffix)


def _cmd_cluster(args) -> None:
    g = _read_graph(args)
    cfg = _cluster_config(args, k=args.k)
    wave = wave_dmd_cluster(g, cfg)
    oracle = classical_cluster(g, cfg.k)
    doc = result_document(g, cfg, wave, agreement(wave, oracle))
    _emit(_json_text(doc), args.output)
    if args.format == "csv":
        if not args.output:
            raise UsageError("--format csv needs --output to name the CSV file")
        lines = ["node,estimated,oracle"]
        for i in range(g.n_nodes):
            lines.append(
                f"{i},{_fmt(wave.coefficients[i, 0])},{_fmt(oracle.coefficients[i, 0])}"
            )
        _sidecar(args.output, ".csv").write_text("\n".join(lines) + "\n")
    if args.plot:
        if not args.output:
            raise UsageError("--plot needs --output to place the PNG")
        from . import figures

        figures.eigenvector_figure(
            wave.coefficients[:, 0],
            oracle.coefficients[:, 0],
            _sidecar(args.output, ".png"),
        )


def _cmd_spectrum(args) -> None:
    g = _read_graph(args)
    cfg = _cluster_config(args)
    est, oracle = recovered_spectrum(g, cfg)
    if args.format == "csv":
        lines = ["index,lambda_dmd,lambda_oracle"]
        for i in range(max(len(est), len(oracle))):
            left = _fmt(est[i]) if i < len(est) else ""
            right = _fmt(oracle[i]) if i < len(oracle) else ""
            lines.append(f"{i},{left},{right}")
        _emit("\n".join(lines) + "\n", args.output)
    else:
        doc = {
            "backend": cfg.backend,
            "seed": cfg.seed,
            "estimated": [float(x) for x in est],
            "oracle": [float(x) for x in oracle],
        }
        _emit(_json_text(doc), args.output)
    if args.plot:
        if not args.output:
            raise UsageError("--plot needs --output to place the PNG")
        from . import figures

        figures.spectrum_figure(est, oracle, _sidecar(args.output, ".png"))


def _cmd_simulate(args) -> None:
    g = _read_graph(args)
    backend = _BACKEND_FLAGS[args.backend]
    ops = build_operators(g, args.c)
    t_max = args.tmax if args.tmax is not None else 4 * g.n_nodes
    u0 = random_u0(g.n_nodes, args.seed)
    mvm = None
    if args.mvm == "analog":
        from .analog import analog_mvm_strategy

        mvm = analog_mvm_strategy(AnalogConfig(epsilon=args.epsilon))
    traj = simulate(ops, u0, t_max, backend=backend, mvm=mvm, seed=args.seed)
    energy = None
    if backend == "schrodinger":
        energy = [
            schrodinger_state(ops, u0, float(t)).energy for t in range(t_max)
        ]
    if args.format == "json":
        doc = {
            "backend": backend,
            "c": args.c,
            "seed": args.seed,
            "samples": [[float(x) for x in row] for row in traj.samples],
        }
        if energy is not None:
            doc["energy"] = [float(e) for e in energy]
        _emit(_json_text(doc), args.output)
    else:
        # One row per integer time, one column per node; the schrodinger
        # backend appends a column with the conserved energy.
        header = ["t"] + [f"node{i}" for i in range(g.n_nodes)]
        if energy is not None:
            header.append("energy")
        lines = [",".join(header)]
        for t in range(t_max):
            row = [str(t)] + [_fmt(x) for x in traj.samples[:, t]]
            if energy is not None:
                row.append(_fmt(energy[t]))
            lines.append(",".join(row))
        _emit("\n".join(lines) + "\n", args.output)
    if args.plot:
        if not args.output:
            raise UsageError("--plot needs --output to place the PNG")
        from . import figures

        figures.trajectory_figure(traj.samples, _sidecar(args.output, ".png"))


def _cmd_bench(args) -> None:
    if args.n < 1 or args.trials < 1:
        raise UsageError("--n and --trials must be positive")
    cfg = AnalogConfig(epsilon=args.epsilon)
    rng = np.random.default_rng(args.seed)
    rows = []
    times = []
    for trial in range(args.trials):
        a = rng.uniform(0.0, 1.0, size=(args.n, args.n))
        y = rng.uniform(-1.0, 1.0, size=args.n)
        x, t_settle = settle_mvm(a, y, cfg)
        err = float(np.abs(x - a @ y).max())
        rows.append((trial, args.n, t_settle, err))
        times.append(t_settle)
    if args.format == "json":
        doc = {
            "epsilon": args.epsilon,
            "trials": [
                {"trial": t, "n": n, "settle_time": st, "max_abs_error": e}
                for t, n, st, e in rows
            ],
        }
        _emit(_json_text(doc), args.output)
    else:
        lines = ["trial,n,settle_time,max_abs_error"]
        for t, n, st, e in rows:
            lines.append(f"{t},{n},{_fmt(st)},{_fmt(e)}")
        _emit("\n".join(lines) + "\n", args.output)
    if args.plot:
        if not args.output:
            raise UsageError("--plot needs --output to place the PNG")
        from . import figures

        figures.settle_time_figure(np.array(times), _sidecar(args.output, ".png"))


def _cmd_gen(args) -> None:
    if args.karate:
        g = load_karate()
        labels = None
        dataset = "karate"
    else:
        g, labels = gen_planted_partition(
            args.n, args.clusters, args.p_in, args.p_out, args.seed
        )
        dataset = (
            f"planted(n={args.n}, clusters={args.clusters}, "
            f"p_in={args.p_in}, p_out={args.p_out}, seed={args.seed})"
        )
    lines = [f"# {dataset}: {g.n_nodes} nodes, {g.n_edges} edges"]
    for i, j, w in g.edges:
        lines.append(f"{i} {j}" if w == 1.0 else f"{i} {j} {_fmt(w)}")
    _emit("\n".join(lines) + "\n", args.output)
    if labels is not None and args.output:
        label_path = Path(str(args.output) + ".labels")
        label_path.write_text("\n".join(str(int(x)) for x in labels) + "\n")
        logger.info("wrote %s", label_path)


_HANDLERS = {
    "cluster": _cmd_cluster,
    "spectrum": _cmd_spectrum,
    "simulate": _cmd_simulate,
    "bench": _cmd_bench,
    "gen": _cmd_gen,
}


def _write_manifest(args, argv: list[str], duration: float) -> None:
    output = getattr(args, "output", None)
    if not output:
        return
    config = {
        key: value for key, value in vars(args).items() if key != "command"
    }
    manifest = {
        "command": ["wavecluster", *argv],
        "config": config,
        "dataset": getattr(args, "input", None) or "generated",
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "duration_s": duration,
    }
    path = Path(str(output) + ".manifest.json")
    path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    logger.info("wrote %s", path)


def cli_main(argv: list[str] | None = None) -> int:
    """Run one command; returns the process exit code."""
    _configure_logging()
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        started = time.perf_counter()
        _HANDLERS[args.command](args)
        _write_manifest(args, list(argv), time.perf_counter() - started)
    except (UsageError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except WaveclusterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
