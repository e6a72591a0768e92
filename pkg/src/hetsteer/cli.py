"""Command line interface: ``hetsteer {steer,sweep,evolve,twoqubit,validate}``."""
from __future__ import annotations

import argparse
import math
import re
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import dynamics, export, kernels, states, steering, validation
from .errors import InvalidStateError, TruncationError, ZeroProbabilityOutcome
from .hilbert import default_n_cut
from .steering import OK, SweepGrid, conditioned_operators, sweep_arrays

EXIT_PHYSICS = 3
STATE_KINDS = ("bell", "product", "mixed", "coherent_pair", "jc", "two_qubit")
FORMATS = ("csv", "json", "ply")

_REAL = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX = re.compile(rf"^(?P<re>[+-]?{_REAL})?(?:(?P<sign>[+-])?(?P<im>{_REAL})?i)?$")


def parse_complex(text: str) -> complex:
    """Parse ``a+bi`` / ``a-bi`` / ``a`` / ``bi`` with decimal reals."""
    s = text.strip()
    m = _COMPLEX.match(s)
    if not s or m is None or (m.group("re") is None and not s.endswith("i")):
        raise argparse.ArgumentTypeError(f"{text!r} is not a complex literal of the form a+bi")
    re_part = float(m.group("re")) if m.group("re") else 0.0
    if not s.endswith("i"):
        return complex(re_part, 0.0)
    if m.group("re") and m.group("sign") is None:
        if m.group("im") is None:  # "2i", "-1.5i": the leading number is the imaginary part
            return complex(0.0, re_part)
        raise argparse.ArgumentTypeError(f"{text!r}: missing sign between real and imaginary parts")
    im = float(m.group("im")) if m.group("im") else 1.0
    if m.group("sign") == "-":
        im = -im
    return complex(re_part, im)


def parse_reals(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals: {exc}") from None
    if not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError("values must be finite")
    return vals


@dataclass
class RunConfig:
    state: str = "bell"
    p: float | None = None
    gamma: complex | None = None
    gamma_prime: complex | None = None
    n: int | None = None
    lambda_t: float | None = None
    theta: list[float] | None = None
    r_max: float = 5.0
    n_r: int = 200
    n_phi: int = 64
    spacing: str = "linear"
    n_cut: int | None = None
    out: str | None = None
    fmt: str = "csv"

    def grid(self) -> SweepGrid:
        return SweepGrid.polar(self.r_max, self.n_r, self.n_phi, spacing=self.spacing)

    def resolved_n_cut(self) -> int:
        if self.n_cut is not None:
            return self.n_cut
        if self.state == "coherent_pair":
            return default_n_cut(max(abs(self.gamma), abs(self.gamma_prime)))
        if self.state in ("jc", "product"):
            return max(24, (self.n or 0) + 2)
        return 24

    def describe(self) -> dict:
        d = {"kind": self.state}
        for k in ("p", "n", "lambda_t"):
            if getattr(self, k) is not None:
                d[k] = getattr(self, k)
        for k in ("gamma", "gamma_prime"):
            v = getattr(self, k)
            if v is not None:
                d[k] = [v.real, v.imag]
        return d


class ConfigError(ValueError):
    pass


def _require(cfg: RunConfig, *names: str) -> None:
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise ConfigError(f"state {cfg.state!r} needs {flags}")


def validate_config(cfg: RunConfig) -> None:
    if cfg.state not in STATE_KINDS:
        raise ConfigError(f"--state: unknown state {cfg.state!r}")
    if not cfg.r_max > 0:
        raise ConfigError("--r-max: must be positive")
    if cfg.n_r < 1 or cfg.n_phi < 1:
        raise ConfigError("--n-r/--n-phi: must be >= 1")
    if cfg.n_cut is not None and cfg.n_cut < 2:
        raise ConfigError("--n-cut: must be >= 2")
    if cfg.state == "mixed":
        _require(cfg, "p")
        if not 0.0 <= cfg.p <= 1.0:
            raise ConfigError(f"--p: must lie in [0, 1], got {cfg.p}")
    elif cfg.state == "coherent_pair":
        _require(cfg, "gamma", "gamma_prime")
    elif cfg.state == "product":
        _require(cfg, "n")
        if cfg.n < 0:
            raise ConfigError("--n: must be >= 0")
    elif cfg.state == "jc":
        _require(cfg, "n")
        if cfg.n < 1:
            raise ConfigError("--n: photon number must be >= 1")
        if cfg.lambda_t is not None and cfg.lambda_t < 0:
            raise ConfigError("--lambda-t: must be >= 0")
    elif cfg.state == "two_qubit":
        _require(cfg, "theta")
        if len(cfg.theta) != 16:
            raise ConfigError(f"--theta: expected 16 entries, got {len(cfg.theta)}")


def build_state(cfg: RunConfig):
    nc = cfg.resolved_n_cut()
    if cfg.state == "bell":
        return states.bell(nc)
    if cfg.state == "product":
        return states.product(cfg.n, nc)
    if cfg.state == "mixed":
        return states.mixed(cfg.p, nc)
    if cfg.state == "coherent_pair":
        return states.coherent_pair(cfg.gamma, cfg.gamma_prime, nc)
    if cfg.state == "jc":
        _require(cfg, "lambda_t")
        return dynamics.jc_closed_form_state(cfg.n, cfg.lambda_t, nc)
    raise ConfigError(f"state {cfg.state!r} has no qubit-field form; use the twoqubit command")


def config_from_args(args) -> RunConfig:
    cfg = RunConfig(
        state=args.state,
        p=args.p,
        gamma=args.gamma,
        gamma_prime=args.gamma_prime,
        n=args.n,
        lambda_t=args.lambda_t,
        theta=getattr(args, "theta", None),
        r_max=args.r_max,
        n_r=args.n_r,
        n_phi=args.n_phi,
        spacing=args.spacing,
        n_cut=args.n_cut,
        out=args.out,
        fmt=args.format,
    )
    if getattr(args, "preset", None) == "wide":
        cfg.r_max, cfg.spacing = 30.0, "log"
        cfg.n_r = args.n_r if args.n_r != 200 else 400
    validate_config(cfg)
    return cfg


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        export.write_text(out, text)


def _render(records, cfg: RunConfig, payload: dict) -> str:
    if cfg.fmt == "csv":
        return export.csv_text(records)
    if cfg.fmt == "json":
        payload = dict(payload)
        payload["records"] = [export.record_dict(r) for r in records]
        return export.json_text(payload)
    return export.ply_text(records, comment=f"hetsteer {payload.get('kind', '')} {cfg.state}".strip())


def _payload(kind: str, cfg: RunConfig, n_cut: int) -> dict:
    return {
        "kind": kind,
        "state": cfg.describe(),
        "n_cut": n_cut,
        "grid": {"r_max": cfg.r_max, "n_r": cfg.n_r, "n_phi": cfg.n_phi, "spacing": cfg.spacing},
    }


def cmd_steer(cfg: RunConfig, beta: complex) -> int:
    rho = build_state(cfg)
    f = conditioned_operators(rho)
    try:
        s = steering.heterodyne_steer(f, beta)
    except ZeroProbabilityOutcome as exc:
        print(f"zero_probability: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    r, phi = abs(beta), math.atan2(beta.imag, beta.real) % (2 * math.pi)
    rec = export.SweepRecord(r, phi, beta.real, beta.imag, *s.bloch, s.density, s.raw_overlap, OK)
    payload = _payload("steer", cfg, rho.n_cut)
    del payload["grid"]
    _emit(_render([rec], cfg, payload), cfg.out)
    return 0


def cmd_sweep(cfg: RunConfig) -> int:
    rho = build_state(cfg)
    res = sweep_arrays(conditioned_operators(rho), cfg.grid())
    records = export.records_from_sweep(res)
    _emit(_render(records, cfg, _payload("sweep", cfg, rho.n_cut)), cfg.out)
    return 0


EVOLVE_FIELDS = ("t", "lambda_t", "concurrence", "steering_set", "spread", "n_ok", "n_zero_probability", "max_norm_dev")


def classify(point: dynamics.TrajectoryPoint) -> str:
    pts = point.sweep.points()
    if point.single_point():
        return "single_point"
    if pts.size and np.max(np.abs(np.linalg.norm(pts, axis=1) - 1.0)) < steering.BLOCH_TOL:
        return "sphere_surface"
    return "other"


def evolve_rows(traj) -> list[dict]:
    rows = []
    for p in traj:
        pts = p.sweep.points()
        rows.append(
            {
                "t": p.t,
                "lambda_t": p.lambda_t,
                "concurrence": p.concurrence,
                "steering_set": classify(p),
                "spread": p.spread,
                "n_ok": int(p.sweep.ok.sum()),
                "n_zero_probability": int((~p.sweep.ok).sum()),
                "max_norm_dev": float(np.max(np.abs(np.linalg.norm(pts, axis=1) - 1.0))) if pts.size else math.nan,
            }
        )
    return rows


def cmd_evolve(cfg: RunConfig, times, coupling: float = 1.0, detuning: float = 0.0, sweep_dir: str | None = None) -> int:
    if cfg.state != "jc":
        raise ConfigError("evolve needs --state jc")
    model = dynamics.JCModel(coupling, cfg.resolved_n_cut(), detuning)
    traj = dynamics.steering_trajectory(model, cfg.n, times, cfg.grid())
    rows = evolve_rows(traj)
    if sweep_dir is not None:
        d = Path(sweep_dir)
        d.mkdir(parents=True, exist_ok=True)
        for i, p in enumerate(traj):
            payload = _payload("evolve_step", cfg, model.n_cut)
            payload.update({"t": p.t, "lambda_t": p.lambda_t, "concurrence": p.concurrence})
            export.write_text(d / f"step_{i:04d}.{cfg.fmt}", _render(export.records_from_sweep(p.sweep), cfg, payload))
    if cfg.fmt == "json":
        payload = _payload("evolve", cfg, model.n_cut)
        payload.update({"coupling_lambda": coupling, "detuning": detuning, "steps": rows})
        text = export.json_text(payload)
    else:
        lines = [",".join(EVOLVE_FIELDS)]
        for row in rows:
            lines.append(",".join(_cell(v) for v in row.values()))
        text = "\n".join(lines) + "\n"
    _emit(text, cfg.out)
    return 0


def _cell(v) -> str:
    if isinstance(v, float):
        return export.fmt_real(v)
    return str(v)


def cmd_twoqubit(theta: steering.TwoQubitTheta, samples: int, fmt: str, out: str | None) -> int:
    xs = steering.fibonacci_sphere(samples)
    ys = np.array([steering.two_qubit_steered_point(theta, x) for x in xs])
    if fmt == "ply":
        lines = ["ply", "format ascii 1.0", "comment hetsteer two-qubit steering ellipsoid", f"element vertex {samples}"]
        lines += ["property double x", "property double y", "property double z", "end_header"]
        lines += [" ".join(export.fmt_real(v) for v in y) for y in ys]
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        text = export.json_text(
            {
                "kind": "two_qubit_ellipsoid",
                "theta": theta.theta.tolist(),
                "points": [{"m": x.tolist(), "x": y.tolist()} for x, y in zip(xs, ys)],
            }
        )
    else:
        rows = ["m1,m2,m3,x1,x2,x3"] + [",".join(export.fmt_real(v) for v in (*x, *y)) for x, y in zip(xs, ys)]
        text = "\n".join(rows) + "\n"
    _emit(text, out)
    return 0


def cmd_validate(verbose: bool = True) -> int:
    t0 = time.perf_counter()
    checks = validation.run_all()
    for c in checks:
        print(c.line())
    failed = [c.name for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed in {time.perf_counter() - t0:.1f}s (kernel: {kernels.BACKEND})")
    if failed:
        print("failed: " + ", ".join(failed))
        return 1
    return 0


def _state_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--state", default="bell", choices=STATE_KINDS)
    p.add_argument("--p", type=float, help="mixing weight of |+,2> in the mixed state")
    p.add_argument("--gamma", type=parse_complex, help="coherent amplitude paired with qubit |0>")
    p.add_argument("--gamma-prime", type=parse_complex, help="coherent amplitude paired with qubit |1>")
    p.add_argument("--n", type=int, help="photon number")
    p.add_argument("--lambda-t", type=float, help="dimensionless coupling x time")
    p.add_argument("--n-cut", type=int, help="Fock cutoff override")
    p.add_argument("--r-max", type=float, default=5.0)
    p.add_argument("--n-r", type=int, default=200)
    p.add_argument("--n-phi", type=int, default=64)
    p.add_argument("--spacing", choices=("linear", "log"), default="linear")
    p.add_argument("--format", choices=FORMATS, default="csv")
    p.add_argument("--out", help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hetsteer", description=__doc__)
    ap.add_argument("--kernel", choices=kernels.available(), help="force a sweep kernel backend")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("steer", help="steered Bloch vector for one heterodyne outcome")
    _state_options(p)
    p.add_argument("--beta", type=parse_complex, required=True, help="outcome, e.g. 1+0.5i")

    p = sub.add_parser("sweep", help="steering set over a polar beta grid")
    _state_options(p)
    p.add_argument("--preset", choices=("wide",), help="wide: r_max 30, log radii, 400 radii")

    p = sub.add_parser("evolve", help="steering set along a Jaynes-Cummings trajectory")
    _state_options(p)
    p.add_argument("--times", type=parse_reals, help="comma-separated times")
    p.add_argument("--t-grid", type=parse_reals, help="START,STOP,COUNT (inclusive linspace)")
    p.add_argument("--coupling", type=float, default=1.0, help="lambda (so lambda t = coupling * t)")
    p.add_argument("--detuning", type=float, default=0.0)
    p.add_argument("--sweep-dir", help="also write one sweep file per time into this directory")

    p = sub.add_parser("twoqubit", help="two-qubit steering ellipsoid samples")
    p.add_argument("--theta", type=parse_reals, help="16 entries of Theta, row-major")
    p.add_argument("--a", type=parse_reals, default=[0.0, 0.0, 0.0])
    p.add_argument("--b", type=parse_reals, default=[0.0, 0.0, 0.0])
    p.add_argument("--T", type=parse_reals, default=[0.0] * 9, help="9 entries, row-major")
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--format", choices=FORMATS, default="csv")
    p.add_argument("--out")

    sub.add_parser("validate", help="run the analytic-versus-numeric suite")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.kernel:
        kernels.use(args.kernel)
    try:
        if args.command == "validate":
            return cmd_validate()
        if args.command == "twoqubit":
            if args.theta is not None:
                if len(args.theta) != 16:
                    ap.error(f"--theta: expected 16 entries, got {len(args.theta)}")
                theta = steering.TwoQubitTheta(np.reshape(args.theta, (4, 4)))
            else:
                if len(args.a) != 3 or len(args.b) != 3 or len(args.T) != 9:
                    ap.error("--a/--b need 3 entries and --T needs 9")
                theta = steering.TwoQubitTheta.from_parts(args.a, args.b, np.reshape(args.T, (3, 3)))
            if args.samples < 1:
                ap.error("--samples: must be >= 1")
            return cmd_twoqubit(theta, args.samples, args.format, args.out)
        cfg = config_from_args(args)
        if args.command == "steer":
            return cmd_steer(cfg, args.beta)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        if args.command == "evolve":
            if args.t_grid is not None:
                if len(args.t_grid) != 3 or args.t_grid[2] < 1:
                    ap.error("--t-grid: expected START,STOP,COUNT")
                times = np.linspace(args.t_grid[0], args.t_grid[1], int(args.t_grid[2])).tolist()
            elif args.times is not None:
                times = args.times
            else:
                ap.error("evolve needs --times or --t-grid")
            if any(t < 0 for t in times):
                ap.error("--times: must be >= 0")
            return cmd_evolve(cfg, times, args.coupling, args.detuning, args.sweep_dir)
    except ConfigError as exc:
        ap.error(str(exc))
    except (InvalidStateError, TruncationError, ZeroProbabilityOutcome) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
