"""Config-driven experiment runner.

Reads a JSON experiment description, builds the model, runs one task
(ness / sweep / gap_scaling / dynamics / oracle_check) and writes one
primary data file (CSV or JSON) plus a metadata sidecar.  Outputs are
deterministic: identical config and code version give identical bytes.

    openquad run config.json [--output-dir DIR] [--workers N]
                             [--format csv|json] [--seed S]

Exit codes: 0 success, 2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
import warnings
from dataclasses import dataclass
from multiprocessing import get_context
from pathlib import Path

import numpy as np

from . import __version__
from .model import (
    DEFAULT_BETA_L,
    DEFAULT_BETA_R,
    DEFAULT_KAPPAS,
    DEFAULT_LAMBDA,
    DEFAULT_LINDBLAD_RATES,
    DEFAULT_THETAS,
    ChainParams,
    xy_lindblad_model,
    xy_redfield_model,
)
from .ness import (
    NonUniqueNESSError,
    ness_two_point,
    observable_report,
    positivity_excess,
    quantum_mutual_information,
)
from .spectra import (
    NonDiagonalizableError,
    ZeroRapidityWarning,
    normal_modes,
    spectral_gap,
    structure_matrix,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "fit_power_law",
    "fit_exponential",
    "fit_karevski",
    "run",
    "main",
]

TASKS = ("ness", "sweep", "gap_scaling", "dynamics", "oracle_check")
# delta_beta sweeps the two temperatures symmetrically about their
# configured mean: beta_{L,R} = mean -+ value/2
SWEEPABLE = ("n", "gamma", "h", "beta_L", "beta_R", "lambda", "delta_beta")


class ConfigError(Exception):
    """Invalid experiment configuration; message names the offending field."""


# ---------------------------------------------------------------------------
# fits


def fit_power_law(xs, ys):
    """Least-squares fit y = prefactor * x^exponent on log-log data.

    Returns (exponent, prefactor, residual) with residual the RMS of the
    log-space misfit.  Needs >= 4 strictly positive points.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) < 4:
        raise ValueError("power-law fit needs at least 4 points")
    if (xs <= 0).any() or (ys <= 0).any():
        raise ValueError("power-law fit needs positive data")
    slope, icpt = np.polyfit(np.log(xs), np.log(ys), 1)
    resid = np.sqrt(np.mean((np.log(ys) - (slope * np.log(xs) + icpt)) ** 2))
    return float(slope), float(np.exp(icpt)), float(resid)


def fit_exponential(ns, ys):
    """Least-squares fit y = prefactor * exp(-rate * n) on semilog data.

    Returns (rate, prefactor, residual); residual is the RMS log misfit.
    """
    ns = np.asarray(ns, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(ns) < 4:
        raise ValueError("exponential fit needs at least 4 points")
    if (ys <= 0).any():
        raise ValueError("exponential fit needs positive data")
    slope, icpt = np.polyfit(ns, np.log(ys), 1)
    resid = np.sqrt(np.mean((np.log(ys) - (slope * ns + icpt)) ** 2))
    return float(-slope), float(np.exp(icpt)), float(resid)


def fit_karevski(lambdas, currents, max_iter: int = 200):
    """Fit Q(lambda) = a lambda^2 / (b + lambda^4).

    Deterministic: a coarse grid over b (with the optimal a given b in
    closed form) seeds a Gauss-Newton refinement of (a, b).  Returns
    (a, b, residual) with residual the RMS misfit in linear space.
    Needs >= 5 points spanning the maximum of the curve.
    """
    lam = np.asarray(lambdas, dtype=float)
    qs = np.asarray(currents, dtype=float)
    if len(lam) < 5:
        raise ValueError("karevski fit needs at least 5 points")
    k = int(np.argmax(qs))
    if k == 0 or k == len(qs) - 1:
        raise ValueError("karevski fit needs data spanning the maximum")
    best = None
    for b in np.logspace(-6, 1, 500):
        g = lam**2 / (b + lam**4)
        a = float(g @ qs / (g @ g))
        r = float(np.sum((qs - a * g) ** 2))
        if best is None or r < best[2]:
            best = (a, b, r)
    a, b, _ = best
    converged = False
    for _ in range(max_iter):
        g = lam**2 / (b + lam**4)
        J = np.stack([g, -a * lam**2 / (b + lam**4) ** 2], axis=1)
        step = np.linalg.lstsq(J, qs - a * g, rcond=None)[0]
        a += step[0]
        b += step[1]
        if np.abs(step).max() < 1e-13 * max(abs(a), abs(b), 1e-300):
            converged = True
            break
    if not converged:
        raise RuntimeError("karevski fit did not converge")
    resid = float(np.sqrt(np.mean((qs - a * lam**2 / (b + lam**4)) ** 2)))
    return float(a), float(b), resid


# ---------------------------------------------------------------------------
# configuration


@dataclass
class ExperimentConfig:
    task: str
    n: int
    gamma: float
    h: float
    bath_type: str = "redfield"
    beta_L: float = DEFAULT_BETA_L
    beta_R: float = DEFAULT_BETA_R
    lam: float = DEFAULT_LAMBDA
    kappa: tuple = DEFAULT_KAPPAS
    theta: tuple = DEFAULT_THETAS
    rates: tuple = DEFAULT_LINDBLAD_RATES
    sweep: dict | None = None
    sizes: tuple | None = None  # gap_scaling
    pairs: tuple = ((1, 2), (1, 2))  # dynamics
    t_max: float = 10.0
    num_times: int = 101
    directory: str = "."
    fmt: str = "csv"

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")
        task = raw.get("task")
        if task not in TASKS:
            raise ConfigError(f"task: expected one of {TASKS}, got {task!r}")
        model = raw.get("model")
        if not isinstance(model, dict) or "n" not in model:
            raise ConfigError("model: object with at least field 'n' required")
        try:
            n = int(model["n"])
            gamma = float(model.get("gamma", 0.5))
            h = float(model.get("h", 0.9))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"model: non-numeric entry ({exc})") from exc
        if n < 2:
            raise ConfigError("model.n: need n >= 2")
        bath = raw.get("bath", {})
        btype = bath.get("type", "redfield")
        if btype not in ("redfield", "lindblad"):
            raise ConfigError(f"bath.type: expected redfield|lindblad, got {btype!r}")
        cfg = cls(
            task=task,
            n=n,
            gamma=gamma,
            h=h,
            bath_type=btype,
            beta_L=float(bath.get("beta_L", DEFAULT_BETA_L)),
            beta_R=float(bath.get("beta_R", DEFAULT_BETA_R)),
            lam=float(bath.get("lambda", DEFAULT_LAMBDA)),
            kappa=tuple(bath.get("kappa", DEFAULT_KAPPAS)),
            theta=tuple(bath.get("theta", DEFAULT_THETAS)),
            rates=tuple(bath.get("rates", DEFAULT_LINDBLAD_RATES)),
        )
        if len(cfg.kappa) != 4 or len(cfg.theta) != 4 or len(cfg.rates) != 4:
            raise ConfigError("bath.kappa/theta/rates: expected 4 entries each")
        if cfg.bath_type == "redfield" and (cfg.beta_L <= 0 or cfg.beta_R <= 0):
            raise ConfigError("bath.beta_L/beta_R: inverse temperatures must be > 0")
        out = raw.get("output", {})
        cfg.directory = str(out.get("directory", "."))
        cfg.fmt = str(out.get("format", "csv"))
        if cfg.fmt not in ("csv", "json"):
            raise ConfigError(f"output.format: expected csv|json, got {cfg.fmt!r}")
        if task == "sweep":
            cfg.sweep = _parse_sweep(raw.get("sweep"))
        if task == "gap_scaling":
            sizes = raw.get("sizes", list(range(16, 97, 8)))
            try:
                cfg.sizes = tuple(int(s) for s in sizes)
            except (TypeError, ValueError) as exc:
                raise ConfigError("sizes: expected integers") from exc
            if len(cfg.sizes) < 4 or min(cfg.sizes) < 2:
                raise ConfigError("sizes: need >= 4 sizes, each >= 2")
        if task == "dynamics":
            dyn = raw.get("dynamics", {})
            pairs = dyn.get("pairs", [[1, 2], [1, 2]])
            try:
                cfg.pairs = tuple(tuple(int(i) for i in p) for p in pairs)
            except (TypeError, ValueError) as exc:
                raise ConfigError("dynamics.pairs: expected two index pairs") from exc
            if len(cfg.pairs) != 2 or any(len(p) != 2 for p in cfg.pairs):
                raise ConfigError("dynamics.pairs: expected two index pairs")
            cfg.t_max = float(dyn.get("t_max", 10.0))
            cfg.num_times = int(dyn.get("num_times", 101))
        if task == "oracle_check" and n > 3:
            raise ConfigError("oracle_check: n must be <= 3")
        return cfg


def _parse_sweep(raw) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError("sweep: object required for task 'sweep'")
    par = raw.get("parameter")
    pars = list(par) if isinstance(par, (list, tuple)) else [par]
    if not 1 <= len(pars) <= 2:
        raise ConfigError("sweep.parameter: one name or a pair of names")
    for p in pars:
        if p not in SWEEPABLE:
            raise ConfigError(
                f"sweep.parameter: {p!r} is not a sweepable field {SWEEPABLE}"
            )
    axes = []
    specs = [raw] if len(pars) == 1 else [raw.get("axis1", raw), raw.get("axis2")]
    if len(pars) == 2 and specs[1] is None:
        raise ConfigError("sweep.axis2: required for 2D sweeps")
    for spec in specs:
        if "values" in spec:
            vals = [float(v) for v in spec["values"]]
        else:
            try:
                start, stop = float(spec["start"]), float(spec["stop"])
                count = int(spec["count"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(
                    "sweep: give 'values' or 'start'/'stop'/'count'"
                ) from exc
            if count < 2:
                raise ConfigError("sweep.count: need at least 2 grid points")
            if spec.get("spacing", "linear") == "log":
                if start <= 0 or stop <= 0:
                    raise ConfigError("sweep: log spacing needs positive bounds")
                vals = list(np.geomspace(start, stop, count))
            else:
                vals = list(np.linspace(start, stop, count))
        if len(vals) < 2:
            raise ConfigError("sweep: grid size must be >= 2")
        axes.append(sorted(vals))
    return {"parameters": pars, "axes": axes}


def build_model(cfg: ExperimentConfig, **overrides):
    """Model for the config, with optional {parameter: value} overrides."""
    get = lambda key, base: overrides.get(key, base)
    params = ChainParams(
        int(get("n", cfg.n)), float(get("gamma", cfg.gamma)), float(get("h", cfg.h))
    )
    if cfg.bath_type == "lindblad":
        return xy_lindblad_model(params, cfg.rates)
    beta_L = float(get("beta_L", cfg.beta_L))
    beta_R = float(get("beta_R", cfg.beta_R))
    if "delta_beta" in overrides:
        mean = 0.5 * (cfg.beta_L + cfg.beta_R)
        db = float(overrides["delta_beta"])
        beta_L, beta_R = mean - db / 2, mean + db / 2
    return xy_redfield_model(
        params,
        beta_L=beta_L,
        beta_R=beta_R,
        lam=float(get("lambda", cfg.lam)),
        kappas=cfg.kappa,
        thetas=cfg.theta,
    )


# ---------------------------------------------------------------------------
# output helpers


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return "nan"
    return format(v, ".17g")


def write_table(path: Path, header: list[str], rows: list[list], fmt: str) -> None:
    if fmt == "csv":
        lines = [",".join(header)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    else:
        payload = [dict(zip(header, row)) for row in rows]
        path.write_text(
            json.dumps(payload, sort_keys=True, indent=1) + "\n", encoding="utf-8"
        )


def write_metadata(path: Path, raw_config: dict, wall_time: float) -> None:
    meta = {"config": raw_config, "version": __version__, "wall_time_s": wall_time}
    path.write_text(json.dumps(meta, sort_keys=True, indent=1) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# tasks


def _steady_state(model, uniqueness_tol=1e-10):
    modes = normal_modes(structure_matrix(model))
    return modes, ness_two_point(modes, uniqueness_tol=uniqueness_tol)


def _task_ness(cfg: ExperimentConfig):
    model = build_model(cfg)
    modes, T = _steady_state(model)
    rep = observable_report(T, model.params, gap=spectral_gap(modes))
    rows = []
    for m, v in enumerate(rep.s_z, start=1):
        rows.append(["s_z", m, "", v])
    n = cfg.n
    for l in range(n):
        for m in range(n):
            rows.append(["C", l + 1, m + 1, rep.correlations[l, m]])
    for r, v in enumerate(rep.correlation_decay):
        rows.append(["C_r", r, "", v])
    rows.append(["C_res", "", "", rep.residual_correlator])
    for m, v in enumerate(rep.heat_current, start=1):
        rows.append(["Q", m, "", v])
    for m, v in enumerate(rep.energy_density, start=1):
        rows.append(["H_m", m, "", v])
    for m, v in enumerate(rep.energy_fluctuation, start=1):
        rows.append(["f", m, "", v])
    rows.append(["entropy_left", "", "", rep.entropy_left])
    rows.append(["entropy_right", "", "", rep.entropy_right])
    rows.append(["entropy_total", "", "", rep.entropy_total])
    rows.append(["qmi", "", "", rep.mutual_information])
    rows.append(["positivity_excess", "", "", rep.positivity_excess])
    rows.append(["spectral_gap", "", "", rep.spectral_gap])
    return ["quantity", "i", "j", "value"], rows


_POINT_COLUMNS = [
    "C_res",
    "Q_mean",
    "s_z_center",
    "qmi",
    "entropy_total",
    "gap",
    "positivity_excess",
]


def _sweep_point(args):
    """One sweep point; returns observable dict or an error string (never raises)."""
    cfg_dict, overrides = args
    cfg = ExperimentConfig.from_dict(cfg_dict)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ZeroRapidityWarning)
            model = build_model(cfg, **overrides)
            modes, T = _steady_state(model)
            from .ness import (
                correlation_matrix,
                heat_current_profile,
                magnetization_profile,
                residual_correlator,
                block_entropy,
            )

            n = model.params.n
            C = correlation_matrix(T)
            out = {
                "C_res": residual_correlator(C, n) if n >= 4 else float("nan"),
                "Q_mean": (
                    float(heat_current_profile(T, model.params)[2:-2].mean())
                    if n >= 7
                    else float("nan")
                ),
                "s_z_center": float(magnetization_profile(T)[n // 2 - 1]),
                "qmi": (
                    quantum_mutual_information(T) if n % 2 == 0 else float("nan")
                ),
                "entropy_total": block_entropy(T, range(1, n + 1)),
                "gap": spectral_gap(modes),
                "positivity_excess": positivity_excess(T),
            }
            return out
    except Exception as exc:  # error rows keep the sweep going
        return f"{type(exc).__name__}: {exc}"


def _task_sweep(cfg: ExperimentConfig, raw_config: dict, workers: int):
    pars = cfg.sweep["parameters"]
    axes = cfg.sweep["axes"]
    if len(pars) == 1:
        points = [(v,) for v in axes[0]]
    else:
        points = [(v1, v2) for v1 in axes[0] for v2 in axes[1]]
    jobs = [(raw_config, dict(zip(pars, pt))) for pt in points]
    if workers > 1:
        with get_context("fork").Pool(workers) as pool:
            results = pool.map(_sweep_point, jobs)
    else:
        results = [_sweep_point(j) for j in jobs]
    header = list(pars) + _POINT_COLUMNS + ["error"]
    rows = []
    for pt, res in zip(points, results):
        row = [*pt]
        if isinstance(res, str):
            row += [""] * len(_POINT_COLUMNS) + [res]
        else:
            row += [res[c] for c in _POINT_COLUMNS] + [""]
        rows.append(row)
    return header, rows


def _task_gap_scaling(cfg: ExperimentConfig):
    sizes = sorted(cfg.sizes)
    gaps = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ZeroRapidityWarning)
        for n in sizes:
            model = build_model(cfg, n=n)
            gaps.append(spectral_gap(normal_modes(structure_matrix(model))))
    expo, pref, resid = fit_power_law(sizes, gaps)
    rows = [[n, g, expo, pref, resid] for n, g in zip(sizes, gaps)]
    return ["n", "gap", "fit_exponent", "fit_prefactor", "fit_residual"], rows


def _task_dynamics(cfg: ExperimentConfig):
    from .dynamics import dynamic_correlator

    model = build_model(cfg)
    modes = normal_modes(structure_matrix(model))
    times = np.linspace(0.0, cfg.t_max, cfg.num_times)
    vals = dynamic_correlator(modes, cfg.pairs[0], cfg.pairs[1], times)
    rows = [[t, v.real, v.imag] for t, v in zip(times, vals)]
    return ["t", "re", "im"], rows


def _task_oracle_check(cfg: ExperimentConfig):
    from .validation import oracle_check_table

    model = build_model(cfg)
    table = oracle_check_table(model)
    rows = [[name, cfg.n, cfg.bath_type, dev] for name, dev in table]
    return ["check", "n", "model", "max_abs_deviation"], rows


def run(
    raw_config: dict,
    output_dir: str | None = None,
    workers: int = 1,
    fmt: str | None = None,
) -> Path:
    """Execute one experiment; returns the path of the primary data file."""
    cfg = ExperimentConfig.from_dict(raw_config)
    if output_dir is not None:
        cfg.directory = output_dir
    if fmt is not None:
        if fmt not in ("csv", "json"):
            raise ConfigError(f"format: expected csv|json, got {fmt!r}")
        cfg.fmt = fmt
    out_dir = Path(cfg.directory)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    if cfg.task == "ness":
        header, rows = _task_ness(cfg)
    elif cfg.task == "sweep":
        header, rows = _task_sweep(cfg, raw_config, workers)
    elif cfg.task == "gap_scaling":
        header, rows = _task_gap_scaling(cfg)
    elif cfg.task == "dynamics":
        header, rows = _task_dynamics(cfg)
    else:
        header, rows = _task_oracle_check(cfg)
    wall = time.perf_counter() - t0
    ext = "csv" if cfg.fmt == "csv" else "json"
    primary = out_dir / f"{cfg.task}.{ext}"
    write_table(primary, header, rows, cfg.fmt)
    write_metadata(out_dir / f"{cfg.task}.meta.json", raw_config, wall)
    return primary


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="openquad", description="Open quadratic fermi systems experiment runner"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run an experiment described by a JSON config")
    runp.add_argument("config", help="path to the JSON experiment config")
    runp.add_argument("--output-dir", default=None, help="override output directory")
    runp.add_argument("--workers", type=int, default=1, help="sweep worker count")
    runp.add_argument(
        "--format", dest="fmt", choices=("csv", "json"), default=None,
        help="override output format",
    )
    runp.add_argument(
        "--seed", type=int, default=None,
        help="reserved; all computations are deterministic",
    )
    args = parser.parse_args(argv)
    try:
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except FileNotFoundError:
        print(f"config file not found: {args.config}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"config is not valid JSON: {exc}", file=sys.stderr)
        return 2
    try:
        primary = run(raw, args.output_dir, args.workers, args.fmt)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (
        NonUniqueNESSError,
        NonDiagonalizableError,
        np.linalg.LinAlgError,
        RuntimeError,
        ValueError,
    ) as exc:
        print(f"numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 3
    print(primary)
    return 0


if __name__ == "__main__":
    sys.exit(main())
