"""Batch command-line surface for scans, nodal planes, correlation and sampling.

Subcommands
-----------
``diffract``         coincidence scan of two Gaussian packets (y sweep)
``grating-pattern``  single-mode intensity behind a grating at distance L
``nodal-planes``     distances where two-fermion coincidences vanish
``correlate``        closed-form correlation curves C(eta), optional
                     quadrature cross-check
``sample``           seeded rejection sampling of the two-packet joint
                     density
``validate``         run the oracle cross-check suite and report
                     pass/fail per invariant

All subcommands read a JSON config (schema-validated, unknown keys
rejected), write CSV or JSON tables plus a ``<out>.meta.json`` sidecar
sufficient to re-run the computation, and use atomic file replacement.

Exit codes: 0 success, 1 validation/cross-check failure, 2 config
error, 3 numerical non-convergence or sampling failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np
import jsonschema

from . import __version__
from .core import Axis, ScanTable, Statistics, WavePacket1D, joint_probability_generic, packet_amplitude
from .diffraction import PacketPair, default_y_axis, detection_scan, joint_probability_closed
from .grating import (
    GratingSpec,
    PlaneWaveMode,
    intensity,
    nodal_planes,
    normalize_coefficients,
    pair_probability_on_plane,
    phase_mismatch,
)
from .correlation import (
    correlation_closed,
    correlation_curve,
    correlation_numeric,
    correlation_two_coefficient,
    pair_probability_expanded,
)
from .oracle import ConvergenceError, integrate, sample_joint

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_NONCONVERGENCE = 3
EXIT_IO = 4


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_NONNEG = {"type": "number", "minimum": 0}
_COUNT = {"type": "integer", "minimum": 2}
_SEED = {"type": "integer", "minimum": 0}
_STAT = {"type": "string", "enum": [s.value for s in Statistics]}
_EXCH_STAT = {"type": "string", "enum": ["boson", "fermion", "no-exchange"]}

_RANGE = {
    "type": "object",
    "properties": {"min": _NUM, "max": _NUM, "points": _COUNT},
    "required": ["min", "max", "points"],
    "additionalProperties": False,
}

_GRATING = {
    "type": "object",
    "properties": {
        "d": _POS,
        "coefficients": {
            "type": "object",
            "minProperties": 1,
            "patternProperties": {
                "^-?[0-9]+$": {
                    "type": "array",
                    "items": _NUM,
                    "minItems": 2,
                    "maxItems": 2,
                }
            },
            "additionalProperties": False,
        },
    },
    "required": ["d", "coefficients"],
    "additionalProperties": False,
}

SCHEMAS = {
    "diffract": {
        "type": "object",
        "properties": {
            "k0": _NUM,
            "p0": _NUM,
            "sigma_squared": _POS,
            "hbar_over_m": _POS,
            "t": _NONNEG,
            "y": _RANGE,
        },
        "required": ["k0", "p0", "sigma_squared", "t"],
        "additionalProperties": False,
    },
    "grating-pattern": {
        "type": "object",
        "properties": {
            "grating": _GRATING,
            "k": _POS,
            "L": _NONNEG,
            "points": _COUNT,
        },
        "required": ["grating", "k", "L"],
        "additionalProperties": False,
    },
    "nodal-planes": {
        "type": "object",
        "properties": {
            "d": _POS,
            "lambda_k": _POS,
            "lambda_p": _POS,
            "n_min": {"type": "integer"},
            "n_max": {"type": "integer"},
        },
        "required": ["d", "lambda_k", "lambda_p"],
        "additionalProperties": False,
    },
    "correlate": {
        "type": "object",
        "properties": {
            "grating": _GRATING,
            "k": _POS,
            "p": _POS,
            "L": _NONNEG,
            "eta": _RANGE,
            "statistics": {
                "type": "array",
                "items": _EXCH_STAT,
                "minItems": 1,
            },
            "cross_check": {"type": "boolean"},
            "cross_check_samples": {"type": "integer", "minimum": 1},
            "quadrature_budget": {"type": "integer", "minimum": 15},
            "tol": _POS,
        },
        "required": ["grating", "k", "p", "L"],
        "additionalProperties": False,
    },
    "sample": {
        "type": "object",
        "properties": {
            "statistics": _STAT,
            "k0": _NUM,
            "p0": _NUM,
            "sigma_squared": _POS,
            "hbar_over_m": _POS,
            "t": _NONNEG,
            "domain": {"type": "array", "items": _NUM, "minItems": 4, "maxItems": 4},
            "n": {"type": "integer", "minimum": 1},
            "seed": _SEED,
            "workers": {"type": "integer", "minimum": 1},
        },
        "required": ["statistics", "k0", "p0", "sigma_squared", "t", "domain", "n"],
        "additionalProperties": False,
    },
    "validate": {
        "type": "object",
        "properties": {
            "draws": {"type": "integer", "minimum": 1},
            "gratings": {"type": "integer", "minimum": 1},
            "eta_samples": {"type": "integer", "minimum": 1},
            "seed": _SEED,
        },
        "additionalProperties": False,
    },
}


@dataclass(frozen=True)
class RunConfig:
    """One validated batch run: kind, parameters and output routing."""

    kind: str
    params: dict
    out: str | None
    fmt: str
    tol: float | None
    seed: int | None
    threads: int


def _validate_config(kind: str, params: dict) -> dict:
    validator = jsonschema.Draft202012Validator(SCHEMAS[kind])
    errors = sorted(validator.iter_errors(params), key=lambda e: list(e.path))
    if errors:
        where = "/".join(str(p) for p in errors[0].path) or "(top level)"
        raise ConfigError(f"config invalid at {where}: {errors[0].message}")
    return params


def _grating_from_config(payload: dict) -> GratingSpec:
    coeffs = {int(n): complex(re, im) for n, (re, im) in payload["coefficients"].items()}
    try:
        return normalize_coefficients(GratingSpec(payload["d"], coeffs))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _packet_pair(params: dict) -> PacketPair:
    sigma = math.sqrt(params["sigma_squared"])
    hom = params.get("hbar_over_m", 1.0)
    try:
        return PacketPair(
            WavePacket1D(params["k0"], sigma, hom),
            WavePacket1D(params["p0"], sigma, hom),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _fmt_float(v: float) -> str:
    return format(float(v), ".17g")


def _table_csv(columns, rows) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt_float(v) for v in row))
    return "\n".join(lines) + "\n"


def _scan_table_json(table: ScanTable) -> dict:
    return {
        "axes": [
            {"name": a.name, "min": a.lo, "max": a.hi, "points": a.count, "units": a.units}
            for a in table.axes
        ],
        "columns": list(table.columns),
        "values": table.values.tolist(),
    }


def read_table_csv(path: str) -> tuple[list[str], np.ndarray]:
    """Parse a CSV table emitted by this tool back into columns + values."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln]
    columns = lines[0].split(",")
    values = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return columns, values


def _write_atomic(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".pairwave-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(config: RunConfig, columns, rows, json_payload: dict, derived: dict):
    """Write the main artifact and its metadata sidecar."""
    if config.fmt == "csv":
        _write_atomic(config.out, _table_csv(columns, rows))
    else:
        _write_atomic(config.out, json.dumps(json_payload, indent=2) + "\n")
    meta = {
        "tool": "pairwave",
        "version": __version__,
        "command": config.kind,
        "format": config.fmt,
        "out": os.path.basename(config.out),
        "config": config.params,
        "derived": derived,
    }
    _write_atomic(config.out + ".meta.json", json.dumps(meta, indent=2) + "\n")


def _run_diffract(config: RunConfig):
    params = config.params
    pair = _packet_pair(params)
    t = params["t"]
    if "y" in params:
        y_axis = Axis("y", params["y"]["min"], params["y"]["max"], params["y"]["points"])
    else:
        y_axis = default_y_axis(pair, t)
    table = detection_scan(pair, t, y_axis)
    derived = {
        "mu": pair.mu(t),
        "envelope4": pair.envelope4(t),
        "x0": pair.k_packet.velocity * t,
        "v_k_t": pair.k_packet.velocity * t,
        "v_p_t": pair.p_packet.velocity * t,
        "y_axis": {"min": y_axis.lo, "max": y_axis.hi, "points": y_axis.count},
        "units": "reduced (divided by envelope4)",
    }
    _emit(config, table.columns, table.values, _scan_table_json(table), derived)
    return EXIT_OK


def _run_grating_pattern(config: RunConfig):
    params = config.params
    g = _grating_from_config(params["grating"])
    mode = PlaneWaveMode(params["k"])
    L = params["L"]
    points = params.get("points", 257)
    x_axis = Axis("x", 0.0, g.d, points)
    xs = x_axis.grid()
    vals = intensity(g, mode, L, xs)
    table = ScanTable((x_axis,), ("x", "intensity"), np.column_stack([xs, vals]))
    derived = {
        "wavelength": mode.wavelength,
        "talbot_period": 2.0 * g.d**2 / mode.wavelength,
        "normalized_coefficients": {
            str(n): [c.real, c.imag] for n, c in sorted(g.coefficients.items())
        },
    }
    _emit(config, table.columns, table.values, _scan_table_json(table), derived)
    return EXIT_OK


def _run_nodal_planes(config: RunConfig):
    params = config.params
    k = PlaneWaveMode(2.0 * math.pi / params["lambda_k"])
    p = PlaneWaveMode(2.0 * math.pi / params["lambda_p"])
    n_lo = params.get("n_min", 1)
    n_hi = params.get("n_max", 5)
    try:
        planes = nodal_planes(k, p, params["d"], (n_lo, n_hi))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rows = [(float(n), L) for n, L in planes]
    payload = {
        "degenerate": planes.degenerate,
        "planes": [{"n": n, "L": L} for n, L in planes],
    }
    derived = {
        "lambda_k": params["lambda_k"],
        "lambda_p": params["lambda_p"],
        "delta_lambda": params["lambda_k"] - params["lambda_p"],
        "degenerate": planes.degenerate,
    }
    _emit(config, ("n", "L"), rows, payload, derived)
    return EXIT_OK


def _stat_column(s: Statistics) -> str:
    return "C_" + s.value.replace("-", "_")


def _run_correlate(config: RunConfig):
    params = config.params
    g = _grating_from_config(params["grating"])
    k = PlaneWaveMode(params["k"])
    p = PlaneWaveMode(params["p"])
    L = params["L"]
    stats = [Statistics(s) for s in params.get("statistics", ["boson", "fermion"])]
    if "eta" in params:
        eta_axis = Axis("eta", params["eta"]["min"], params["eta"]["max"], params["eta"]["points"])
    else:
        eta_axis = Axis("eta", 0.0, g.d, 257)
    curve = correlation_curve(g, k, p, stats, L, eta_axis)
    etas = eta_axis.grid()
    columns = ["eta"] + [_stat_column(s) for s in stats]
    rows = np.column_stack([etas] + [curve.values[s] for s in stats])
    derived = {
        "phi_kp": phase_mismatch(k, p, g.d, L) if L > 0 else 0.0,
        "lambda_k": k.wavelength,
        "lambda_p": p.wavelength,
        "n_max": g.n_max,
        "normalized_coefficients": {
            str(n): [c.real, c.imag] for n, c in sorted(g.coefficients.items())
        },
    }

    check_report = None
    if params.get("cross_check", False):
        tol = config.tol if config.tol is not None else params.get("tol", 1e-8)
        budget = params.get("quadrature_budget", 200_000)
        n_check = params.get("cross_check_samples", 5)
        check_idx = np.linspace(0, len(etas) - 1, n_check).astype(int)
        worst = 0.0
        for s in stats:
            if s is Statistics.NO_EXCHANGE:
                continue
            for i in check_idx:
                numeric = correlation_numeric(g, k, p, s, L, etas[i], tol=tol, budget=budget)
                worst = max(worst, abs(numeric - curve.values[s][i]))
        check_report = {"max_abs_difference": worst, "tol": tol, "points_per_curve": int(len(check_idx))}
        derived["cross_check"] = check_report

    _emit(
        config,
        columns,
        rows,
        {
            "axes": [{"name": "eta", "min": eta_axis.lo, "max": eta_axis.hi,
                      "points": eta_axis.count, "units": eta_axis.units}],
            "columns": columns,
            "values": rows.tolist(),
        },
        derived,
    )
    if check_report is not None and check_report["max_abs_difference"] > check_report["tol"]:
        print(
            f"cross-check FAILED: closed vs quadrature differ by "
            f"{check_report['max_abs_difference']:.3e} > tol {check_report['tol']:.1e}",
            file=sys.stderr,
        )
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _run_sample(config: RunConfig):
    params = config.params
    pair = _packet_pair(params)
    s = Statistics(params["statistics"])
    t = params["t"]
    domain = tuple(params["domain"])
    if not (domain[0] < domain[1] and domain[2] < domain[3]):
        raise ConfigError("domain must satisfy xmin < xmax and ymin < ymax")
    seed = config.seed if config.seed is not None else params.get("seed", 0)
    workers = config.threads if config.threads else params.get("workers", 1)

    def density(x, y):
        return joint_probability_closed(pair, s, x, y, t, reduced=True)

    batch = sample_joint(density, domain, params["n"], seed, workers=workers)
    resolved = dict(params)
    resolved["seed"] = int(seed)
    resolved["workers"] = int(workers)
    config = RunConfig(config.kind, resolved, config.out, config.fmt,
                       config.tol, seed, workers)
    derived = {
        "acceptance_rate": batch.acceptance_rate,
        "postselected_discards": batch.postselected_discards,
        "mu": pair.mu(t),
        "density_units": "reduced (divided by envelope4)",
    }
    payload = {
        "seed": batch.seed,
        "acceptance_rate": batch.acceptance_rate,
        "postselected_discards": batch.postselected_discards,
        "domain": list(batch.domain),
        "pairs": batch.pairs.tolist(),
    }
    _emit(config, ("x", "y"), batch.pairs, payload, derived)
    return EXIT_OK


def _validate_checks(params: dict, tol_override: float | None):
    """Yield (name, passed, detail) for each oracle cross-check."""
    rng = np.random.default_rng(params.get("seed", 12345))
    draws = params.get("draws", 200)
    n_gratings = params.get("gratings", 3)
    eta_samples = params.get("eta_samples", 5)

    # packet normalization against quadrature
    packet = WavePacket1D(1.0, math.sqrt(0.125), 1.0)
    tol = tol_override or 1e-8
    worst = 0.0
    for t in (0.0, 0.8, 8.0):
        center = packet.velocity * t
        w = packet.width(t)
        res = integrate(
            lambda x, _t=t: np.abs(packet_amplitude(packet, x, _t)) ** 2,
            center - 10.0 * w, center + 10.0 * w, tol=1e-10,
        )
        worst = max(worst, abs(res.value - 1.0))
    yield "packet-normalization", worst <= tol, f"max |integral - 1| = {worst:.2e} (tol {tol:.0e})"

    # closed form vs generic amplitude composition
    tol = tol_override or 1e-12
    worst = 0.0
    for _ in range(draws):
        k0, p0 = rng.uniform(-3, 3, 2)
        sigma = math.sqrt(rng.uniform(0.05, 1.0))
        t = rng.uniform(0.0, 2.0)
        x, y = rng.uniform(-3, 3, 2)
        pair = PacketPair(WavePacket1D(k0, sigma, 1.0), WavePacket1D(p0, sigma, 1.0))
        psiA = lambda u, tt, _p=pair: packet_amplitude(_p.k_packet, u, tt)
        psiB = lambda u, tt, _p=pair: packet_amplitude(_p.p_packet, u, tt)
        for s in Statistics:
            closed = joint_probability_closed(pair, s, x, y, t)
            generic = joint_probability_generic(psiA, psiB, s, x, y, t)
            worst = max(worst, abs(closed - generic))
    yield "diffraction-closed-vs-generic", worst <= tol, f"max |delta| = {worst:.2e} over {draws} draws (tol {tol:.0e})"

    def random_grating(n_max: int) -> GratingSpec:
        coeffs = {}
        for n in range(-n_max, n_max + 1):
            re, im = rng.normal(size=2)
            coeffs[n] = complex(re, im)
        return normalize_coefficients(GratingSpec(1.0, coeffs))

    # intensity period average = 1
    tol = tol_override or 1e-10
    worst = 0.0
    for _ in range(n_gratings):
        g = random_grating(3)
        mode = PlaneWaveMode(rng.uniform(2.0, 8.0))
        L = rng.uniform(0.1, 5.0)
        res = integrate(lambda x: intensity(g, mode, L, x), 0.0, g.d, tol=1e-12)
        worst = max(worst, abs(res.value / g.d - 1.0))
    yield "intensity-period-average", worst <= tol, f"max |mean - 1| = {worst:.2e} (tol {tol:.0e})"

    # pair probability: amplitude composition vs multi-index expansion
    tol = tol_override or 1e-12
    worst = 0.0
    for _ in range(n_gratings):
        g = random_grating(2)
        k = PlaneWaveMode(rng.uniform(2.0, 8.0))
        p = PlaneWaveMode(rng.uniform(2.0, 8.0))
        L = rng.uniform(0.1, 5.0)
        xs = rng.uniform(0.0, g.d, 16)
        ys = rng.uniform(0.0, g.d, 16)
        for s in Statistics:
            a = pair_probability_on_plane(g, k, p, s, L, xs, ys)
            b = pair_probability_expanded(g, k, p, s, L, xs, ys)
            worst = max(worst, float(np.max(np.abs(a - b))))
    yield "pair-probability-expansion", worst <= tol, f"max |delta| = {worst:.2e} (tol {tol:.0e})"

    # correlation closed vs quadrature
    tol = tol_override or 1e-8
    worst = 0.0
    for _ in range(n_gratings):
        g = random_grating(2)
        k = PlaneWaveMode(rng.uniform(2.0, 8.0))
        p = PlaneWaveMode(rng.uniform(2.0, 8.0))
        L = rng.uniform(0.1, 5.0)
        etas = rng.uniform(0.0, g.d, eta_samples)
        for s in (Statistics.BOSON, Statistics.FERMION):
            closed = correlation_closed(g, k, p, s, L, etas)
            for i, eta in enumerate(etas):
                numeric = correlation_numeric(g, k, p, s, L, eta, tol=1e-9)
                worst = max(worst, abs(closed[i] - numeric))
    yield "correlation-closed-vs-quadrature", worst <= tol, f"max |delta| = {worst:.2e} (tol {tol:.0e})"

    # two-coefficient special case agrees with the general sum
    tol = tol_override or 1e-12
    g2 = normalize_coefficients(GratingSpec(1.0, {0: 0.8, 1: 0.6}))
    k = PlaneWaveMode(2.0 * math.pi / 0.5)
    p = PlaneWaveMode(2.0 * math.pi / 0.3)
    L = 3.7
    phi = phase_mismatch(k, p, g2.d, L)
    etas = np.linspace(0.0, g2.d, 33)
    worst = 0.0
    for s in (Statistics.BOSON, Statistics.FERMION):
        general = correlation_closed(g2, k, p, s, L, etas)
        special = correlation_two_coefficient(0.8, 0.6, phi, s, etas, g2.d)
        worst = max(worst, float(np.max(np.abs(general - special))))
    yield "two-coefficient-reduction", worst <= tol, f"max |delta| = {worst:.2e} (tol {tol:.0e})"


def _run_validate(config: RunConfig):
    all_ok = True
    for name, ok, detail in _validate_checks(config.params, config.tol):
        status = "PASS" if ok else "FAIL"
        all_ok = all_ok and ok
        print(f"{status} {name}: {detail}")
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


_RUNNERS = {
    "diffract": _run_diffract,
    "grating-pattern": _run_grating_pattern,
    "nodal-planes": _run_nodal_planes,
    "correlate": _run_correlate,
    "sample": _run_sample,
    "validate": _run_validate,
}


def run(config: RunConfig) -> int:
    """Execute one validated run; translate failures into exit codes."""
    try:
        return _RUNNERS[config.kind](config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except RuntimeError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pairwave",
        description="Two-particle interference and diffraction observables.",
    )
    parser.add_argument("--version", action="version", version=f"pairwave {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in _RUNNERS:
        p = sub.add_parser(kind, help=f"run the {kind} computation")
        p.add_argument("--config", help="JSON config file (schema-validated)")
        p.add_argument("--out", help="output artifact path")
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--tol", type=float, help="override tolerance for cross-checks")
        p.add_argument("--seed", type=int, help="override the sampling seed")
        p.add_argument("--threads", type=int, default=0,
                       help="sampler worker streams (deterministic per seed+threads)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    kind = args.command

    params: dict = {}
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                params = json.load(fh)
        except OSError as exc:
            print(f"config error: cannot read {args.config}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except json.JSONDecodeError as exc:
            print(f"config error: {args.config} is not valid JSON: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    elif kind != "validate":
        print("config error: --config is required for this command", file=sys.stderr)
        return EXIT_CONFIG

    try:
        params = _validate_config(kind, params)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if kind != "validate" and not args.out:
        print("config error: --out is required for this command", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None and args.seed < 0:
        print("config error: --seed must be non-negative", file=sys.stderr)
        return EXIT_CONFIG

    config = RunConfig(
        kind=kind,
        params=params,
        out=args.out,
        fmt=args.format,
        tol=args.tol,
        seed=args.seed,
        threads=args.threads,
    )
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
