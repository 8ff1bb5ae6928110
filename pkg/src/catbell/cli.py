"""Command-line front end: run protocols, emit grids, sweep parameters.

Subcommands
    epr      momentum-variance paradox check
    lg       single-mode three-time inequality
    lgbell   bipartite three-time inequality
    bell4    four-term two-setting inequality
    figures  joint-density snapshot grids (CSV)
    delayed  delayed-collapse invariance check
    dist     single-mode quadrature distribution (CSV)
    sweep    Cartesian parameter sweep with a resumable manifest

Scalar results are JSON objects with a ``schema_version`` field; grids
are CSV.  Outputs are byte-identical for identical configurations (and
seed, when sampling).  CATBELL_THREADS caps sweep parallelism.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import protocols
from .dynamics import T3, ZERO, EvolutionSchedule, RationalPhase
from .errors import CatbellError
from .fock import cat_state, coherent, default_dim
from .dynamics import evolve_mode
from .quadrature import DEFAULT_POINTS, GridSpec, dist_p, dist_x

SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    """Validated bundle of one invocation's parameters."""

    protocol: str
    alpha: float = 2.0
    beta: float | None = None
    dim: int | None = None
    grid: GridSpec | None = None
    points: int = DEFAULT_POINTS
    collapse_model: str = "branch"
    source: str = "bell"
    state: str = "cat"
    quadrature: str = "x"
    time: RationalPhase = ZERO
    measure_time: RationalPhase = field(default_factory=lambda: RationalPhase(1, 4))
    delay_extra: RationalPhase = ZERO
    seed: int | None = None
    shots: int | None = None
    out: Path | None = None
    alphas: tuple = ()
    betas: tuple | None = None
    dims: tuple | None = None
    sweep_protocol: str | None = None

    def validate(self) -> None:
        if self.protocol in ("epr", "lg", "dist") and not self.alpha >= 0:
            raise ValueError("alpha must be nonnegative")
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots must be positive")
        if self.dim is not None and self.dim < 1:
            raise ValueError("dim must be positive")
        if self.points < 2:
            raise ValueError("grid needs at least 2 points")
        if self.collapse_model not in ("branch", "projective"):
            raise ValueError(f"unknown collapse model {self.collapse_model!r}")
        if self.source not in ("bell", "mixture"):
            raise ValueError(f"unknown source {self.source!r}")
        if self.state not in ("cat", "coherent"):
            raise ValueError(f"unknown state {self.state!r}")
        if self.quadrature not in ("x", "p"):
            raise ValueError(f"unknown quadrature {self.quadrature!r}")

    @property
    def beta_value(self) -> float:
        return self.alpha if self.beta is None else self.beta


def _f(x) -> float:
    return float(x)


def _emit_json(payload: dict, out: Path | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)


def _result_payload(res: protocols.ProtocolResult, config: RunConfig) -> dict:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "protocol": res.protocol,
        "alpha": _f(config.alpha),
        "terms": {k: _f(v) for k, v in res.terms.items()},
        "lhs": _f(res.lhs),
        "bound": _f(res.bound),
        "violated": bool(res.violated),
        "corrections_estimate": _f(res.corrections_estimate),
        "source": res.source,
        "shots": res.shots,
        "seed": res.seed,
    }
    if res.protocol in ("lgbell", "bell4"):
        payload["beta"] = _f(config.beta_value)
    if res.protocol == "lg":
        payload["collapse_model"] = config.collapse_model
    return payload


def _run_epr(config: RunConfig) -> int:
    res = protocols.epr_paradox(config.alpha, dim=config.dim)
    _emit_json(
        {
            "schema_version": SCHEMA_VERSION,
            "protocol": "epr",
            "alpha": _f(res.alpha),
            "variance_p": _f(res.variance_p),
            "variance_p_oracle": _f(res.variance_p_oracle),
            "margin": _f(res.margin),
            "bound": _f(res.bound),
            "paradox": bool(res.paradox),
        },
        config.out,
    )
    return 0


def _run_lg(config: RunConfig) -> int:
    res = protocols.lg_three_time(
        config.alpha,
        collapse_model=config.collapse_model,
        dim=config.dim,
        shots=config.shots,
        seed=config.seed,
    )
    _emit_json(_result_payload(res, config), config.out)
    return 0


def _run_lgbell(config: RunConfig) -> int:
    res = protocols.lg_bell_three(
        config.alpha,
        config.beta_value,
        source=config.source,
        shots=config.shots,
        seed=config.seed,
    )
    _emit_json(_result_payload(res, config), config.out)
    return 0


def _run_bell4(config: RunConfig) -> int:
    res = protocols.bell_four(
        config.alpha,
        config.beta_value,
        source=config.source,
        shots=config.shots,
        seed=config.seed,
    )
    _emit_json(_result_payload(res, config), config.out)
    return 0


def _phase_slug(tau: RationalPhase) -> str:
    sign = "m" if tau.p < 0 else ""
    return f"{sign}{abs(tau.p)}q{tau.q}"


def _write_grid_csv(path: Path, dist) -> None:
    xa = [float(v) for v in dist.grid_a.nodes()]
    xb = [float(v) for v in dist.grid_b.nodes()]
    rows = dist.density.tolist()
    with path.open("w", newline="") as handle:
        handle.write("x_a,x_b,p\n")
        for i, xa_i in enumerate(xa):
            row = rows[i]
            for j, xb_j in enumerate(xb):
                handle.write(f"{xa_i!r},{xb_j!r},{row[j]!r}\n")


def _run_figures(config: RunConfig) -> int:
    out_dir = config.out or Path("catbell_out")
    out_dir.mkdir(parents=True, exist_ok=True)
    grid = config.grid
    snaps = protocols.figure_sequences(
        config.alpha,
        config.beta_value,
        source=config.source,
        points=config.points,
        grid_a=grid,
        grid_b=grid,
    )
    index = []
    for snap in snaps.snapshots:
        name = (
            f"figure_{config.source}_{snap.sequence}_"
            f"ta{_phase_slug(snap.schedule.tau_a)}_tb{_phase_slug(snap.schedule.tau_b)}.csv"
        )
        _write_grid_csv(out_dir / name, snap.dist)
        index.append(
            {
                "sequence": snap.sequence,
                "tau_a": str(snap.schedule.tau_a),
                "tau_b": str(snap.schedule.tau_b),
                "file": name,
                "integral": _f(snap.dist.integral()),
            }
        )
    _emit_json(
        {
            "schema_version": SCHEMA_VERSION,
            "protocol": "figures",
            "alpha": _f(config.alpha),
            "beta": _f(config.beta_value),
            "source": config.source,
            "snapshots": index,
        },
        out_dir / "index.json",
    )
    return 0


def _run_delayed(config: RunConfig) -> int:
    window = EvolutionSchedule((T3 - config.measure_time) + config.delay_extra, ZERO)
    diff = protocols.delayed_collapse_check(
        config.alpha,
        config.beta_value,
        measure_time=config.measure_time,
        collapse_delay=window,
        points=config.points,
    )
    _emit_json(
        {
            "schema_version": SCHEMA_VERSION,
            "protocol": "delayed",
            "alpha": _f(config.alpha),
            "beta": _f(config.beta_value),
            "measure_time": str(config.measure_time),
            "delay_window": str(window),
            "sup_norm_difference": _f(diff),
        },
        config.out,
    )
    return 0


def _run_dist(config: RunConfig) -> int:
    dim = config.dim or default_dim(config.alpha)
    if config.state == "cat":
        state = cat_state(config.alpha, dim)
    else:
        state = coherent(config.alpha, dim)
    state = evolve_mode(state, config.time)
    grid = config.grid or GridSpec.spanning(config.alpha, points=config.points)
    dist = dist_x(state, grid) if config.quadrature == "x" else dist_p(state, grid)
    lines = ["x,p\n"]
    nodes = [float(v) for v in grid.nodes()]
    values = dist.density.tolist()
    for x, p in zip(nodes, values):
        lines.append(f"{x!r},{p!r}\n")
    text = "".join(lines)
    if config.out is None:
        sys.stdout.write(text)
    else:
        config.out.parent.mkdir(parents=True, exist_ok=True)
        config.out.write_text(text)
    return 0


# ---------------------------------------------------------------------------
# sweep

_SWEEP_COLUMNS = ("alpha", "beta", "dim", "status", "lhs", "bound", "violated", "error")


def _sweep_rows(config: RunConfig) -> list[dict]:
    betas = config.betas
    dims = config.dims if config.dims is not None else (None,)
    rows = []
    for a in config.alphas:
        beta_values = betas if betas is not None else (a,)
        for b in beta_values:
            for d in dims:
                rows.append({"alpha": float(a), "beta": float(b), "dim": d})
    return rows


def _row_key(row: dict) -> str:
    d = "auto" if row["dim"] is None else str(row["dim"])
    return f"alpha={row['alpha']!r},beta={row['beta']!r},dim={d}"


def _evaluate_row(protocol: str, row: dict, config: RunConfig) -> dict:
    out = dict(row)
    out["status"] = "ok"
    out["error"] = ""
    try:
        if protocol == "epr":
            res = protocols.epr_paradox(row["alpha"], dim=row["dim"])
            out.update(lhs=res.variance_p, bound=res.bound, violated=res.paradox)
        elif protocol == "lg":
            res = protocols.lg_three_time(
                row["alpha"],
                collapse_model=config.collapse_model,
                dim=row["dim"],
                shots=config.shots,
                seed=config.seed,
            )
            out.update(lhs=res.lhs, bound=res.bound, violated=res.violated)
        elif protocol == "lgbell":
            res = protocols.lg_bell_three(
                row["alpha"], row["beta"], source=config.source,
                shots=config.shots, seed=config.seed,
            )
            out.update(lhs=res.lhs, bound=res.bound, violated=res.violated)
        elif protocol == "bell4":
            res = protocols.bell_four(
                row["alpha"], row["beta"], source=config.source,
                shots=config.shots, seed=config.seed,
            )
            out.update(lhs=res.lhs, bound=res.bound, violated=res.violated)
        else:
            raise ValueError(f"sweep does not support protocol {protocol!r}")
    except (CatbellError, ValueError) as exc:
        out.update(status="error", lhs=None, bound=None, violated=None, error=str(exc))
    return out


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _sweep_worker_count() -> int:
    env = os.environ.get("CATBELL_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _run_sweep(config: RunConfig) -> int:
    out_dir = config.out or Path("catbell_out")
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = out_dir / "manifest.json"
    csv_path = out_dir / "sweep.csv"
    protocol = config.sweep_protocol

    manifest = {"schema_version": SCHEMA_VERSION, "protocol": protocol, "rows": {}}
    if manifest_path.exists():
        previous = json.loads(manifest_path.read_text())
        if previous.get("protocol") == protocol:
            manifest["rows"] = previous.get("rows", {})

    rows = _sweep_rows(config)
    pending = [row for row in rows if _row_key(row) not in manifest["rows"]]

    if pending:
        import warnings as _warnings

        with _warnings.catch_warnings():
            _warnings.simplefilter("ignore")
            with ThreadPoolExecutor(max_workers=_sweep_worker_count()) as pool:
                results = list(
                    pool.map(lambda r: _evaluate_row(protocol, r, config), pending)
                )
        for row, result in zip(pending, results):
            manifest["rows"][_row_key(row)] = result
            _atomic_write(
                manifest_path, json.dumps(manifest, indent=2, sort_keys=True) + "\n"
            )
    else:
        _atomic_write(
            manifest_path, json.dumps(manifest, indent=2, sort_keys=True) + "\n"
        )

    lines = [",".join(_SWEEP_COLUMNS) + "\n"]
    for row in rows:
        rec = manifest["rows"][_row_key(row)]
        cells = [
            _csv_cell(rec["alpha"]),
            _csv_cell(rec["beta"]),
            "auto" if rec["dim"] is None else str(rec["dim"]),
            rec["status"],
            _csv_cell(rec["lhs"]),
            _csv_cell(rec["bound"]),
            _csv_cell(rec["violated"]),
            _csv_cell(rec["error"]),
        ]
        lines.append(",".join(cells) + "\n")
    _atomic_write(csv_path, "".join(lines))
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, default=2.0, help="amplitude of site A")
    parser.add_argument(
        "--beta", type=float, default=None, help="amplitude of site B (default: alpha)"
    )
    parser.add_argument(
        "--dim", type=int, default=None, help="number-basis cutoff (default: auto-sized)"
    )
    parser.add_argument("--grid-min", type=float, default=None)
    parser.add_argument("--grid-max", type=float, default=None)
    parser.add_argument(
        "--grid-points", type=int, default=DEFAULT_POINTS, help="nodes per grid axis"
    )
    parser.add_argument("--seed", type=int, default=None, help="sampling-mode RNG seed")
    parser.add_argument(
        "--shots", type=int, default=None, help="enable shot sampling with this count"
    )
    parser.add_argument("--out", type=Path, default=None, help="output file/directory")


def _comma_floats(text: str) -> tuple:
    items = [t for t in text.split(",") if t.strip()]
    return tuple(float(t) for t in items)


def _comma_ints(text: str) -> tuple:
    items = [t for t in text.split(",") if t.strip()]
    return tuple(int(t) for t in items)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catbell",
        description="Macroscopic-realism tests on coherent-state superpositions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("epr", help="momentum-variance paradox check")
    _add_common(p)

    p = sub.add_parser("lg", help="single-mode three-time inequality")
    _add_common(p)
    p.add_argument(
        "--collapse-model",
        choices=("branch", "projective"),
        default="branch",
        help="middle-time measurement model",
    )

    p = sub.add_parser("lgbell", help="bipartite three-time inequality")
    _add_common(p)
    p.add_argument("--source", choices=("bell", "mixture"), default="bell")

    p = sub.add_parser("bell4", help="four-term two-setting inequality")
    _add_common(p)
    p.add_argument("--source", choices=("bell", "mixture"), default="bell")

    p = sub.add_parser("figures", help="joint-density snapshot grids")
    _add_common(p)
    p.add_argument("--source", choices=("bell", "mixture"), default="bell")

    p = sub.add_parser("delayed", help="delayed-collapse invariance check")
    _add_common(p)
    p.add_argument(
        "--measure-time",
        type=RationalPhase.parse,
        default=RationalPhase(1, 4),
        help="site-B freeze time: '0 pi' or '1/4 pi'",
    )
    p.add_argument(
        "--delay",
        type=RationalPhase.parse,
        default=ZERO,
        help="extra site-A evolution beyond the third waypoint, e.g. '1/4 pi'",
    )

    p = sub.add_parser("dist", help="single-mode quadrature distribution")
    _add_common(p)
    p.add_argument("--state", choices=("cat", "coherent"), default="cat")
    p.add_argument("--quadrature", choices=("x", "p"), default="x")
    p.add_argument(
        "--time",
        type=RationalPhase.parse,
        default=ZERO,
        help="evolution before measuring, e.g. '1/4 pi'",
    )

    p = sub.add_parser("sweep", help="Cartesian parameter sweep")
    _add_common(p)
    p.add_argument(
        "--protocol", choices=("epr", "lg", "lgbell", "bell4"), required=True
    )
    p.add_argument(
        "--alphas", type=_comma_floats, required=True, help="comma list, e.g. 1,2,3"
    )
    p.add_argument("--betas", type=_comma_floats, default=None)
    p.add_argument("--dims", type=_comma_ints, default=None)
    p.add_argument(
        "--collapse-model", choices=("branch", "projective"), default="branch"
    )
    p.add_argument("--source", choices=("bell", "mixture"), default="bell")

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    grid = None
    if args.grid_min is not None or args.grid_max is not None:
        if args.grid_min is None or args.grid_max is None:
            raise ValueError("--grid-min and --grid-max must be given together")
        grid = GridSpec(args.grid_min, args.grid_max, args.grid_points)
    config = RunConfig(
        protocol=args.command,
        alpha=args.alpha,
        beta=args.beta,
        dim=args.dim,
        grid=grid,
        points=args.grid_points,
        collapse_model=getattr(args, "collapse_model", "branch"),
        source=getattr(args, "source", "bell"),
        state=getattr(args, "state", "cat"),
        quadrature=getattr(args, "quadrature", "x"),
        time=getattr(args, "time", ZERO),
        measure_time=getattr(args, "measure_time", RationalPhase(1, 4)),
        delay_extra=getattr(args, "delay", ZERO),
        seed=args.seed,
        shots=args.shots,
        out=args.out,
        alphas=getattr(args, "alphas", ()),
        betas=getattr(args, "betas", None),
        dims=getattr(args, "dims", None),
        sweep_protocol=getattr(args, "protocol", None),
    )
    config.validate()
    return config


_DISPATCH = {
    "epr": _run_epr,
    "lg": _run_lg,
    "lgbell": _run_lgbell,
    "bell4": _run_bell4,
    "figures": _run_figures,
    "delayed": _run_delayed,
    "dist": _run_dist,
    "sweep": _run_sweep,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        return _DISPATCH[args.command](config)
    except (CatbellError, ValueError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(json.dumps(record, sort_keys=True) + "\n")
        return 1


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
