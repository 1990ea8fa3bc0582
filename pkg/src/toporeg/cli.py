"""``toporeg`` command-line interface."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, datasets, io, svg
from .config import RunConfig, load_config, parse_config
from .embeddings import LinearProjectionModel
from .errors import ConfigError, ToporegError
from .experiments import Dataset, build_model, load_data, run_variants
from .geometry import PointCloud, alpha_filtration
from .optimizer import OptimizerConfig, run
from .persistence import compute_persistence
from .trajectory import cycle_projection


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _fail("UsageError", message, code=2)


def _fail(kind: str, message: str, code: int = 1):
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    sys.exit(code)


def _out(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# generate

def cmd_generate(args):
    out = _out(args)
    seed = args.seed
    if args.dataset == "circle":
        X, angles = datasets.generate_circle(args.n or 50, args.ambient_dim or 500,
                                             _default(args.noise, 0.45), seed)
        io.write_matrix(out / "data.csv", X)
        io.write_angles(out / "angles.csv", angles)
    elif args.dataset == "bifurcation":
        X, labels = datasets.generate_bifurcation(args.arm_points or 50, args.ambient_dim or 50,
                                                  _default(args.noise, 0.1), seed)
        io.write_matrix(out / "data.csv", X)
        io.write_labels(out / "labels.csv", labels)
    elif args.dataset == "clusters":
        if args.preset not in datasets.CLUSTER_PRESETS:
            raise ConfigError(f"unknown cluster preset {args.preset!r}")
        pts, labels = datasets.cluster_preset(args.preset, seed)
        io.write_points(out / "points.csv", pts)
        io.write_labels(out / "labels.csv", labels)
    else:
        graph, labels = datasets.load_karate()
        io.write_edge_list(out / "edges.txt", graph)
        io.write_labels(out / "labels.csv", labels, graph.nodes)


def _default(value, fallback):
    return fallback if value is None else value


# persistence

def cmd_persistence(args):
    ids, pts = io.read_points(args.points)
    pers = compute_persistence(alpha_filtration(PointCloud(pts, ids)), max_dim=args.max_dim)
    io.write_diagram(_out(args) / "diagram.csv", pers)


# optimize / embed

def _optimizer(args, base: OptimizerConfig) -> OptimizerConfig:
    changes = {}
    for flag, name in (("lambda_top", "lambda_top"), ("lr", "learning_rate"), ("epochs", "epochs"),
                       ("method", "method"), ("seed", "seed")):
        value = getattr(args, flag, None)
        if value is not None:
            changes[name] = value
    if getattr(args, "topo_only", False):
        changes["topo_only"] = True
    return replace(base, **changes)


def _spec(args, fallback=None):
    return io.read_spec(args.topo_spec) if args.topo_spec else fallback


def _write_run(out: Path, result, ids, args, model=None):
    io.write_points(out / "embedding.csv", result.embedding, ids)
    io.write_trace(out / "trace.csv", result.trace, timing=args.timing)
    if isinstance(model, LinearProjectionModel):
        io.write_matrix(out / "loadings.csv", result.params, ["w1", "w2"])


def cmd_optimize(args):
    ids, pts = io.read_points(args.points)
    spec = _spec(args)
    if spec is None:
        raise ConfigError("optimize needs --topo-spec")
    cfg = _optimizer(args, OptimizerConfig(seed=args.seed))
    model = build_model("coordinates", Dataset(points=PointCloud(pts).points), {}, cfg.seed)
    result = run(model, spec, replace(cfg, topo_only=True))
    _write_run(_out(args), result, ids, args)


def cmd_embed(args):
    if args.config:
        cfg = load_config(args.config)
    else:
        if not args.backend:
            raise ConfigError("embed needs --backend or --config")
        data = {}
        if args.data:
            data["matrix"] = str(Path(args.data).resolve())
        elif args.edges:
            data["edges"] = str(Path(args.edges).resolve())
        elif args.points:
            data["points"] = str(Path(args.points).resolve())
        else:
            raise ConfigError("embed needs --data, --edges or --points")
        cfg = parse_config({"experiment": "embed", "data": data, "backend": args.backend})
    if args.backend and args.backend != cfg.backend:
        cfg = replace(cfg, backend=args.backend)
    cfg = replace(cfg, optimizer=_optimizer(args, cfg.optimizer), topo_spec=_spec(args, cfg.topo_spec))
    data = load_data(cfg)
    model = build_model(cfg.backend, data, cfg.backend_options, cfg.optimizer.seed)
    result = run(model, cfg.topo_spec, cfg.optimizer)
    ids = data.ids or [str(i) for i in range(data.n)]
    _write_run(_out(args), result, ids, args, model)


# pseudotime

def cmd_pseudotime(args):
    ids, pts = io.read_points(args.embedding)
    io.write_pseudotime(_out(args) / "pseudotime.csv", cycle_projection(PointCloud(pts, ids)), ids)


# plot

def cmd_plot(args):
    out = _out(args)
    if not (args.embedding or args.diagram or args.trace):
        raise ConfigError("plot needs at least one of --embedding, --diagram, --trace")
    if args.embedding:
        ids, pts = io.read_points(args.embedding)
        labels = None
        if args.labels:
            lid, lab = io.read_labels(args.labels)
            lookup = dict(zip(lid, lab))
            labels = [lookup.get(i, "") for i in ids]
        (out / "embedding.svg").write_text(svg.scatter_svg(pts, labels))
    if args.diagram:
        (out / "diagram.svg").write_text(svg.diagram_svg(io.read_diagram(args.diagram)))
    if args.trace:
        (out / "trace.svg").write_text(svg.trace_svg(io.read_trace(args.trace)))


# report

def cmd_report(args):
    rows = []
    for path in args.configs:
        cfg = load_config(path)
        cfg = replace(cfg, optimizer=_optimizer(args, cfg.optimizer))
        for res in run_variants(cfg):
            rows.append((cfg.experiment, res.variant, res.emb_loss, res.topo_loss))
    io.write_report(_out(args) / "report.csv", rows)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="toporeg", description="Topologically regularized 2-D embeddings.")
    p.add_argument("--version", action="version", version=f"toporeg {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, optim=False, seed=0):
        # None leaves the seed of a config file in place
        sp.add_argument("--seed", type=int, default=seed)
        sp.add_argument("--out-dir", default=".")
        if optim:
            sp.add_argument("--topo-spec")
            sp.add_argument("--lambda-top", type=float)
            sp.add_argument("--lr", type=float)
            sp.add_argument("--epochs", type=int)
            sp.add_argument("--method", choices=("gd", "adam"))
            sp.add_argument("--topo-only", action="store_true")
            sp.add_argument("--timing", action="store_true",
                            help="write wall-clock seconds to the trace (otherwise 0)")

    sp = sub.add_parser("generate", help="write a synthetic dataset or the karate graph")
    sp.add_argument("--dataset", required=True, choices=("circle", "clusters", "bifurcation", "karate"))
    sp.add_argument("--n", type=int)
    sp.add_argument("--ambient-dim", type=int)
    sp.add_argument("--noise", type=float)
    sp.add_argument("--arm-points", type=int)
    sp.add_argument("--preset", default="four_corners")
    common(sp)
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("persistence", help="alpha persistence diagram of a point CSV")
    sp.add_argument("points")
    sp.add_argument("--max-dim", type=int, default=1, choices=(0, 1))
    common(sp)
    sp.set_defaults(func=cmd_persistence)

    sp = sub.add_parser("optimize", help="optimize point coordinates for a topological loss")
    sp.add_argument("points")
    common(sp, optim=True)
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("embed", help="run an embedding backend, optionally regularized")
    sp.add_argument("--backend", choices=("linear", "neighbor", "random_walk", "inner_product",
                                          "coordinates"))
    sp.add_argument("--data", help="data matrix CSV")
    sp.add_argument("--edges", help="edge list")
    sp.add_argument("--points", help="point CSV (coordinates backend)")
    sp.add_argument("--config", help="run configuration JSON")
    common(sp, optim=True, seed=None)
    sp.set_defaults(func=cmd_embed)

    sp = sub.add_parser("pseudotime", help="circular pseudotime of an embedding CSV")
    sp.add_argument("embedding")
    common(sp)
    sp.set_defaults(func=cmd_pseudotime)

    sp = sub.add_parser("plot", help="render SVG plots")
    sp.add_argument("--embedding")
    sp.add_argument("--labels")
    sp.add_argument("--diagram")
    sp.add_argument("--trace")
    common(sp)
    sp.set_defaults(func=cmd_plot)

    sp = sub.add_parser("report", help="ordinary / topo-only / regularized comparison")
    sp.add_argument("configs", nargs="+")
    common(sp, optim=True, seed=None)
    sp.set_defaults(func=cmd_report)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ToporegError as err:
        _fail(type(err).__name__, str(err))
    except OSError as err:
        _fail("IOError", f"{err.strerror}: {err.filename}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
