"""
Command-line interface.

Subcommands: ``generate``, ``estimate``, ``ph``, ``manifold`` and
``bottleneck``. Every subcommand accepts ``--config FILE`` with flat
``key=value`` lines whose keys are the long flag names (dashes or
underscores); flags given on the command line win over the file.

Exit status: 0 success, 2 configuration error, 3 simplex budget exceeded,
4 no stable level, 5 I/O or parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import datagen
from .barcode import render_barcode
from .complexes import DEFAULT_BUDGET
from .errors import CapacityExceeded, ConfigError, LevelHomError, NoStableLevel, ParseError, UnsupportedFormat
from .estimators import default_epsilon, estimate_level_homology, estimate_ph, recover_manifold_homology
from .kernels import KernelSpec, LabeledSample, ModelBounds, recommended_bandwidth, sample_values
from .linalg import RATIONALS, prime_field
from .persistence import PersistenceDiagram, bottleneck, emit_tsv, parse_tsv

EXIT_OK, EXIT_CONFIG, EXIT_CAPACITY, EXIT_NO_STABLE, EXIT_IO = 0, 2, 3, 4, 5


# -- files ---------------------------------------------------------------------


def write_atomic(path: Optional[str], data: bytes):
    """Write ``data`` to ``path`` via a temporary file and rename; ``-``/None is stdout."""
    if path in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_csv(sample: LabeledSample) -> str:
    """Header ``x1,...,xd[,y]`` and 17-significant-digit values."""
    d = sample.d
    header = [f"x{i + 1}" for i in range(d)] + (["y"] if sample.responses is not None else [])
    rows = [",".join(header)]
    cols = sample.points if sample.responses is None else np.column_stack([sample.points, sample.responses])
    for row in cols:
        rows.append(",".join(f"{v:.17g}" for v in row))
    return "\n".join(rows) + "\n"


def read_csv(path: str) -> LabeledSample:
    try:
        with open(path, newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty file", 1) from None
    header = [h.strip() for h in header]
    has_y = bool(header) and header[-1] == "y"
    xcols = header[:-1] if has_y else header
    if not xcols or xcols != [f"x{i + 1}" for i in range(len(xcols))]:
        raise ParseError("header must be x1,...,xd with an optional trailing y", 1)
    rows = []
    for no, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", no)
        try:
            vals = [float(c) for c in row]
        except ValueError as exc:
            raise ParseError(str(exc), no) from None
        if not all(math.isfinite(v) for v in vals):
            raise ParseError("non-finite value", no)
        rows.append(vals)
    if not rows:
        raise ParseError("no data rows", 2)
    arr = np.asarray(rows, dtype=float)
    if has_y:
        return LabeledSample(arr[:, :-1], arr[:, -1])
    return LabeledSample(arr)


def read_tsv(path: str) -> dict[int, PersistenceDiagram]:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    return parse_tsv(text)


def dump_json(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, indent=2) + "\n").encode()


# -- configuration -------------------------------------------------------------


@dataclass
class RunConfig:
    """Validated parameters of one command."""

    command: str
    values: dict

    def __getattr__(self, name):
        try:
            return self.values[name]
        except KeyError:
            raise AttributeError(name) from None

    def validate(self):
        v = self.values
        eps = v.get("epsilon")
        if eps is not None and not eps > 0:
            raise ConfigError("epsilon must be positive")
        if v.get("r") is not None and not v["r"] > 0:
            raise ConfigError("r must be positive")
        if v.get("k_max") is not None and v["k_max"] < 0:
            raise ConfigError("k_max must be >= 0")
        if v.get("n") is not None and v["n"] < 1:
            raise ConfigError("n must be >= 1")
        if v.get("sigma") is not None and v["sigma"] < 0:
            raise ConfigError("sigma must be >= 0")
        if v.get("budget_simplices") is not None and v["budget_simplices"] < 1:
            raise ConfigError("budget-simplices must be positive")
        if v.get("threads") is not None and v["threads"] < 1:
            raise ConfigError("threads must be >= 1")
        if v.get("bandwidth_rule") == "theory" and v.get("r") is None:
            if v.get("p_max") is None or v.get("epsilon") is None:
                raise ConfigError("the theory bandwidth rule needs p_max and epsilon")
        return self


def load_config_file(path: str) -> dict[str, str]:
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    out = {}
    for no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{no}: expected key=value")
        key, value = (p.strip() for p in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _resolve(parser: argparse.ArgumentParser, args: argparse.Namespace) -> RunConfig:
    """Merge defaults, config file and explicit flags (in increasing priority)."""
    actions = {a.dest: a for a in parser._actions if a.dest not in ("help", "config")}
    values = {dest: action.default for dest, action in actions.items()}
    if args.config:
        for key, raw in load_config_file(args.config).items():
            action = actions.get(key)
            if action is None or not action.option_strings:
                raise ConfigError(f"unknown config key {key!r}")
            try:
                value = action.type(raw) if action.type else raw
            except (TypeError, ValueError):
                raise ConfigError(f"bad value for {key}: {raw!r}") from None
            if action.choices is not None and value not in action.choices:
                raise ConfigError(f"{key} must be one of {sorted(action.choices)}")
            values[key] = value
    for dest in getattr(args, "_explicit", ()):
        values[dest] = getattr(args, dest)
    if "paths" in actions:
        values["paths"] = args.paths
    return RunConfig(args.command, values).validate()


class _Track(argparse.Action):
    """Store the value and remember that the flag was given explicitly."""

    def __call__(self, parser, namespace, values, option_string=None):
        setattr(namespace, self.dest, values)
        explicit = getattr(namespace, "_explicit", set())
        explicit.add(self.dest)
        namespace._explicit = explicit


def _add(p, *flags, **kw):
    if kw.get("action") is None:
        kw["action"] = _Track
    p.add_argument(*flags, **kw)


def _common(p, with_input=True):
    p.add_argument("--config", help="key=value file; explicit flags override it")
    if with_input:
        _add(p, "--input", required=False, help="CSV point cloud")
    _add(p, "--seed", type=int, default=0, help="seed recorded in the report")
    _add(p, "--budget-simplices", dest="budget_simplices", type=int, default=DEFAULT_BUDGET)
    _add(p, "--threads", type=int, default=1, help="worker threads for kernel sums")
    _add(p, "--out", default="-", help="output path ('-' for stdout)")


def _estimation(p, epsilon_required=True):
    _add(p, "--epsilon", type=float, default=None)
    _add(p, "--r", type=float, default=None, help="radius/bandwidth; overrides the rule")
    _add(p, "--bandwidth-rule", dest="bandwidth_rule", choices=["fallback", "theory"], default="fallback")
    _add(p, "--p-max", dest="p_max", type=float, default=None)
    _add(p, "--p-min", dest="p_min", type=float, default=None)
    _add(p, "--y-max", dest="y_max", type=float, default=None)
    _add(p, "--kernel-shape", dest="kernel_shape", choices=["truncated_gaussian", "bump"], default="truncated_gaussian")
    _add(p, "--kernel-width", dest="kernel_width", type=float, default=0.3)
    _add(p, "--field", choices=["rational", "prime"], default="rational")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="levelhom", description="Homology of estimated super-level sets.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic sample as CSV")
    _common(g, with_input=False)
    _add(g, "--family", choices=list(datagen.FAMILIES), default=None)
    _add(g, "--n", type=int, default=None)
    _add(g, "--sigma", type=float, default=None)
    _add(g, "--scale", type=float, default=1.0, help="torus poloidal angle spread")

    e = sub.add_parser("estimate", help="image homology between two filtered samples")
    _common(e)
    _estimation(e)
    _add(e, "--level", type=float, default=None)
    _add(e, "--k-max", dest="k_max", type=int, default=1, help="highest homology degree reported")
    _add(e, "--mode", choices=["density", "regression"], default="density")
    _add(e, "--method", choices=["auto", "exact", "persistence"], default="auto")

    h = sub.add_parser("ph", help="persistence diagrams of the estimate")
    _common(h)
    _estimation(h)
    _add(h, "--k-max", dest="k_max", type=int, default=None, help="highest homology degree (default d-1)")
    _add(h, "--mode", choices=["density", "regression"], default="density")
    _add(h, "--svg", default=None, help="also write an SVG barcode here")
    _add(h, "--min-length", dest="min_length", type=float, default=0.0)

    m = sub.add_parser("manifold", help="homology of a noisy manifold by a downward level scan")
    _common(m)
    _estimation(m)
    _add(m, "--m", type=int, default=1, help="manifold dimension")
    _add(m, "--k-max", dest="k_max", type=int, default=None, help="highest homology degree (default m)")

    b = sub.add_parser("bottleneck", help="bottleneck distance between two diagram TSV files")
    b.add_argument("--config", help="key=value file; explicit flags override it")
    _add(b, "--first", default=None)
    _add(b, "--second", default=None)
    b.add_argument("paths", nargs="*", help="two TSV files (alternative to --first/--second)")
    _add(b, "--degree", type=int, default=0)
    return parser


# -- commands ------------------------------------------------------------------


def _kernel(cfg: RunConfig, d: int) -> KernelSpec:
    return KernelSpec(cfg.kernel_shape, d, cfg.kernel_width)


def _bandwidth(cfg: RunConfig, data: LabeledSample, kernel: KernelSpec, mode: str) -> float:
    if cfg.r is not None:
        return cfg.r
    if cfg.bandwidth_rule == "theory":
        bounds = ModelBounds(cfg.p_max, cfg.p_min, cfg.y_max)
        return recommended_bandwidth(data.n, data.d, cfg.epsilon, mode, bounds, kernel)
    return recommended_bandwidth(max(data.n, 2), data.d)


def _need(cfg: RunConfig, *names):
    for name in names:
        if cfg.values.get(name) is None:
            raise ConfigError(f"missing required parameter {name.replace('_', '-')}")


def _sample(cfg: RunConfig, mode: str = "density") -> LabeledSample:
    _need(cfg, "input")
    data = read_csv(cfg.input)
    if mode == "regression":
        if data.responses is None:
            raise ConfigError("regression mode needs a y column")
        if cfg.y_max is not None:
            data = LabeledSample(data.points, data.responses, cfg.y_max)
    return data


def cmd_generate(cfg: RunConfig) -> int:
    _need(cfg, "family", "n")
    spec = datagen.GenSpec(cfg.family, cfg.n, cfg.seed, cfg.sigma, cfg.scale)
    write_atomic(cfg.out, format_csv(datagen.generate(spec)).encode())
    return EXIT_OK


def cmd_estimate(cfg: RunConfig) -> int:
    _need(cfg, "level", "epsilon")
    data = _sample(cfg, cfg.mode)
    kernel = _kernel(cfg, data.d)
    r = _bandwidth(cfg, data, kernel, cfg.mode)
    field = RATIONALS if cfg.field == "rational" else prime_field()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        est = estimate_level_homology(
            data,
            cfg.level,
            cfg.epsilon,
            r,
            cfg.k_max + 1,
            cfg.mode,
            kernel,
            method=cfg.method,
            field=field,
            budget=cfg.budget_simplices,
            threads=cfg.threads,
        )
    report = {"command": "estimate", "mode": cfg.mode, "k_max": cfg.k_max, "n": data.n, "seed": cfg.seed}
    report.update(est.to_dict())
    report["kernel"] = {"shape": kernel.shape, "width": kernel.width, "c_k": kernel.c_k}
    report["field"] = str(field)
    write_atomic(cfg.out, dump_json(report))
    return EXIT_OK


def cmd_ph(cfg: RunConfig) -> int:
    data = _sample(cfg, cfg.mode)
    kernel = _kernel(cfg, data.d)
    r = _bandwidth(cfg, data, kernel, cfg.mode)
    k_max = data.d - 1 if cfg.k_max is None else cfg.k_max
    diagrams = estimate_ph(
        data, cfg.epsilon, r, k_max + 1, cfg.mode, kernel, budget=cfg.budget_simplices, threads=cfg.threads
    )
    write_atomic(cfg.out, emit_tsv(diagrams).encode())
    if cfg.svg:
        write_atomic(cfg.svg, render_barcode(diagrams, "svg", cfg.min_length))
    return EXIT_OK


def cmd_manifold(cfg: RunConfig) -> int:
    data = _sample(cfg)
    kernel = _kernel(cfg, data.d)
    r = _bandwidth(cfg, data, kernel, "density")
    k_max = cfg.m if cfg.k_max is None else cfg.k_max
    values = sample_values(data, r, kernel, "density", threads=cfg.threads)
    epsilon = cfg.epsilon
    if epsilon is None:
        epsilon = default_epsilon(values)
    try:
        res = recover_manifold_homology(
            data, epsilon, cfg.m, r, k_max + 1, kernel, values=values, budget=cfg.budget_simplices
        )
    except NoStableLevel as exc:
        report = {"command": "manifold", "status": "no_stable_level", "message": str(exc), "r": r,
                  "epsilon": epsilon, "trace": [{"i": i, "level": lv, "beta_m": b} for i, lv, b in exc.trace]}
        write_atomic(cfg.out, dump_json(report))
        raise
    report = {"command": "manifold", "status": "ok", "m": cfg.m, "n": data.n, "seed": cfg.seed}
    report.update(res.to_dict())
    write_atomic(cfg.out, dump_json(report))
    return EXIT_OK


def format_distance(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.12g}"


def cmd_bottleneck(cfg: RunConfig) -> int:
    paths = list(cfg.values.get("paths") or [])
    first = cfg.first or (paths[0] if len(paths) > 0 else None)
    second = cfg.second or (paths[1] if len(paths) > 1 else None)
    if first is None or second is None:
        raise ConfigError("bottleneck needs two diagram files")
    k = cfg.degree
    d1 = read_tsv(first).get(k, PersistenceDiagram(k))
    d2 = read_tsv(second).get(k, PersistenceDiagram(k))
    sys.stdout.write(format_distance(bottleneck(d1, d2)) + "\n")
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "estimate": cmd_estimate,
    "ph": cmd_ph,
    "manifold": cmd_manifold,
    "bottleneck": cmd_bottleneck,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    try:
        cfg = _resolve(sub, args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"levelhom: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapacityExceeded as exc:
        print(f"levelhom: simplex budget of {exc.budget} exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except NoStableLevel as exc:
        print(f"levelhom: {exc}", file=sys.stderr)
        return EXIT_NO_STABLE
    except (ParseError, UnsupportedFormat, OSError) as exc:
        print(f"levelhom: {exc}", file=sys.stderr)
        return EXIT_IO
    except (LevelHomError, ValueError) as exc:
        print(f"levelhom: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
