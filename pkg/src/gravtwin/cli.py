"""Command line front end: reproducible runs with manifests.

Configuration is a flat key=value text file; command line flags override
file values.  Every run writes a manifest.json (config hash, versions,
status, summary numbers) into the output directory, also on failure.
Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time as _time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from . import estimates as est
from . import spectrum as spec_mod
from .dynamics import (
    ComplexField,
    FactoredEvolution,
    Grid,
    PropagatorConfig,
    RadialGrid,
    fidelity,
    init_gaussian_pair,
    make_pair_propagator,
)
from .errors import ConfigError, DomainError, NumericalError
from .potential import v_scaled
from .reduction import coherence_length, partial_trace, physical_energy, von_neumann_entropy
from .scenario import PhysicalScenario, load_scenario, scale

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

MODES = ("estimate", "potential", "spectrum", "threshold", "evolve", "sweep")

_FLOAT_KEYS = {
    "mass_g", "radius_cm", "width_cm", "G", "hbar", "k_B",
    "kappa", "lambda0", "extent", "dt", "time", "umax",
    "density", "kappa_star", "u_from", "u_to",
    "mask_width", "mask_strength",
}
_INT_KEYS = {
    "grid", "rel_points", "snap_every", "points", "max_states",
    "num", "seed", "workers", "mc_samples",
}
_STR_KEYS = {"mode", "out", "evolve_mode"}
_BOOL_KEYS = {"mc_check"}
_LIST_KEYS = {"kappa_list"}
_ALL_KEYS = _FLOAT_KEYS | _INT_KEYS | _STR_KEYS | _BOOL_KEYS | _LIST_KEYS

_DEFAULTS = {
    "seed": 0,
    "lambda0": 10.0,
    "grid": 512,
    "extent": 96.0,
    "dt": 0.01,
    "time": 20.0,
    "snap_every": 100,
    "evolve_mode": "factored",
    "mask_width": 0.0,
    "mask_strength": 0.0,
    "umax": 40.0,
    "points": 16384,
    "density": 1.0,
    "u_from": 0.0,
    "u_to": 5.0,
    "num": 201,
    "mc_samples": 10**6,
    "mc_check": False,
}


def _parse_config_file(path: Path) -> dict:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, val = body.partition("=")
        raw[key.strip()] = val.strip()
    return raw


def _coerce(key: str, value):
    if not isinstance(value, str):
        return value
    try:
        if key in _FLOAT_KEYS:
            return float(value)
        if key in _INT_KEYS:
            return int(value)
        if key in _BOOL_KEYS:
            return value.lower() in ("1", "true", "yes", "on")
        if key in _LIST_KEYS:
            return [float(tok) for tok in value.replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"cannot parse config value {key}={value!r}") from None
    return value


_MODE_DEFAULTS = {"evolve": {"kappa": 25.0}, "sweep": {"kappa": 25.0}}


def resolve_config(mode: str, file_values: dict, flag_values: dict) -> dict:
    """Merge file and flag values over defaults; flags win."""
    cfg = dict(_DEFAULTS)
    cfg.update(_MODE_DEFAULTS.get(mode, {}))
    cfg["mode"] = mode
    for source in (file_values, flag_values):
        for key, value in source.items():
            if value is None:
                continue
            if key not in _ALL_KEYS:
                raise ConfigError(f"unknown configuration key {key!r}")
            cfg[key] = _coerce(key, value)
    if cfg["mode"] != mode:
        raise ConfigError(f"config file mode {cfg['mode']!r} conflicts with subcommand {mode!r}")
    return cfg


def _config_hash(cfg: dict) -> str:
    text = "\n".join(f"{k}={cfg[k]!r}" for k in sorted(cfg) if k != "out")
    return hashlib.sha256(text.encode()).hexdigest()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(repr(float(x)) if isinstance(x, float) else str(x)
                             for x in row) + "\n")


def _scenario_from_config(cfg: dict) -> PhysicalScenario:
    missing = [k for k in ("mass_g", "radius_cm", "width_cm") if cfg.get(k) is None]
    if missing:
        raise ConfigError(f"scenario requires keys: {', '.join(missing)}")
    kwargs = {k: cfg[k] for k in ("mass_g", "radius_cm", "width_cm")}
    for k in ("G", "hbar", "k_B"):
        if cfg.get(k) is not None:
            kwargs[k] = cfg[k]
    return PhysicalScenario(**kwargs)


def run_estimate(cfg: dict, out: Path) -> dict:
    scenario = _scenario_from_config(cfg)
    kappa_star = cfg.get("kappa_star") or 1.0
    report = est.report(scenario, kappa_star=kappa_star)
    summary = report.to_dict()
    summary["threshold_mass_g"] = est.threshold_mass(cfg["density"], kappa_star)
    summary["threshold_mass_protons"] = est.threshold_mass_protons(cfg["density"], kappa_star)
    summary["kappa_star_assumed"] = kappa_star
    if cfg["mc_check"]:
        mc_mean, mc_err = est.monte_carlo_potential(
            scenario, samples=cfg["mc_samples"], seed=cfg["seed"])
        summary["mc_potential_mean_erg"] = mc_mean
        summary["mc_potential_stderr_erg"] = mc_err
    (out / "estimates.json").write_text(_json_text(summary))
    lines = [f"{key:>28s} : {value}" for key, value in sorted(summary.items())]
    text = "\n".join(lines) + "\n"
    (out / "estimates.txt").write_text(text)
    print(text)
    print(_json_text(summary))
    return summary


def run_potential(cfg: dict, out: Path) -> dict:
    u_from, u_to, num = cfg["u_from"], cfg["u_to"], cfg["num"]
    if not (0 <= u_from < u_to) or num < 2:
        raise ConfigError("potential table needs 0 <= u_from < u_to and num >= 2")
    u = np.linspace(u_from, u_to, num)
    v = v_scaled(u)
    rows = list(zip(u.tolist(), v.tolist()))
    _write_csv(out / "potential.csv", ["u", "v"], rows)
    for uu, vv in rows:
        print(f"{uu!r},{vv!r}")
    return {"u_from": u_from, "u_to": u_to, "num": num,
            "v_first": v[0], "v_last": float(v[-1])}


def run_spectrum(cfg: dict, out: Path) -> dict:
    kappa = cfg.get("kappa")
    if kappa is None:
        raise ConfigError("spectrum needs --kappa")
    grid = RadialGrid(u_max=cfg["umax"], points=cfg["points"])
    result = spec_mod.radial_shoot(kappa, grid=grid, max_states=cfg.get("max_states"))
    rows = [(k, float(e)) for k, e in zip(result.node_counts, result.eigenvalues)]
    _write_csv(out / "spectrum.csv", ["n", "e_n"], rows)
    for k, e in rows:
        print(f"{k},{e!r}")
    return {"kappa": kappa, "u_max": cfg["umax"], "points": cfg["points"],
            "bound_states": len(result),
            "eigenvalues": [float(e) for e in result.eigenvalues]}


def run_threshold(cfg: dict, out: Path) -> dict:
    kappa_star = spec_mod.threshold_kappa()
    mass_g = est.threshold_mass(cfg["density"], kappa_star)
    summary = {
        "kappa_star": kappa_star,
        "threshold_u_max": spec_mod.THRESHOLD_U_MAX,
        "density_g_cm3": cfg["density"],
        "mass_g": mass_g,
        "mass_proton_masses": est.threshold_mass_protons(cfg["density"], kappa_star),
    }
    (out / "threshold.json").write_text(_json_text(summary))
    print(_json_text(summary))
    return summary


def _snapshot_metrics(dm, rel_energy) -> tuple[dict, object]:
    dm.validate()
    coh = coherence_length(dm)
    metrics = {
        "entropy": von_neumann_entropy(dm),
        "coherence_length": float(coh.length),
        "coherence_decayed": bool(coh.decayed),
        "diagonal_width": dm.diagonal_width(),
        "purity": dm.purity(),
        "energy_mean": rel_energy.mean,
        "energy_std": rel_energy.std,
    }
    return metrics, coh


def run_evolve(cfg: dict, out: Path) -> dict:
    kappa, lam0 = cfg["kappa"], cfg["lambda0"]
    if kappa <= 0 or lam0 <= 0:
        raise ConfigError("kappa and lambda0 must be positive")
    xy_grid = Grid(extent=cfg["extent"], points=cfg["grid"])
    rel_points = cfg.get("rel_points") or 4 * cfg["grid"]
    rel_grid = Grid(extent=2.0 * cfg["extent"], points=rel_points)
    prop_cfg = PropagatorConfig(dt=cfg["dt"], steps_per_snapshot=cfg["snap_every"],
                                mask_width=cfg["mask_width"],
                                mask_strength=cfg["mask_strength"])
    steps_total = int(round(cfg["time"] / cfg["dt"]))
    n_snaps = steps_total // cfg["snap_every"]
    mode = cfg["evolve_mode"]
    if mode not in ("factored", "full2d", "both"):
        raise ConfigError(f"evolve_mode must be factored, full2d or both, got {mode!r}")

    snap_dir = out / "snapshots"
    snap_dir.mkdir(exist_ok=True)

    fac = joint2d = prop2d = None
    if mode in ("factored", "both"):
        fac = FactoredEvolution(lam0, kappa, rel_grid, prop_cfg)
    if mode in ("full2d", "both"):
        joint2d = init_gaussian_pair(lam0, xy_grid)
        prop2d = make_pair_propagator(xy_grid, v_scaled, kappa, prop_cfg)

    rows = []
    series_time = []
    for snap in range(n_snaps + 1):
        t = snap * cfg["snap_every"] * cfg["dt"]
        if fac is not None:
            joint = fac.reconstruct(xy_grid)
            rel_energy = physical_energy(fac.rel, v_scaled, kappa)
            phase = np.angle(fac.rel.values)
            _write_csv(snap_dir / f"relative_{snap:04d}.csv",
                       ["u", "abs2", "phase"],
                       zip(fac.rel.grid.coords.tolist(),
                           fac.rel.density().tolist(), phase.tolist()))
        else:
            joint = joint2d
            rel_energy = physical_energy(joint2d, v_scaled, kappa)
        dm = partial_trace(joint)
        metrics, coh_profile = _snapshot_metrics(dm, rel_energy)
        metrics["time"] = t
        if fac is not None:
            metrics["com_width_ratio"] = fac.com.density_std() / (lam0 / math.sqrt(2.0))
        if mode == "both":
            metrics["fidelity_factored_vs_2d"] = fidelity(joint, joint2d)
        _write_csv(snap_dir / f"marginal_{snap:04d}.csv", ["x", "density"],
                   zip(xy_grid.coords.tolist(), dm.diagonal().tolist()))
        _write_csv(snap_dir / f"coherence_{snap:04d}.csv", ["s", "C"],
                   zip(coh_profile.separations.tolist(), coh_profile.profile.tolist()))
        _write_csv(snap_dir / f"eigenvalues_{snap:04d}.csv", ["k", "p_k"],
                   enumerate(dm.probabilities().tolist()))
        rows.append(metrics)
        series_time.append(t)
        if snap < n_snaps:
            if fac is not None:
                fac.advance(cfg["snap_every"])
            if joint2d is not None:
                joint2d = ComplexField(xy_grid, prop2d.step(joint2d.values, cfg["snap_every"]))

    header = ["time", "entropy", "coherence_length", "coherence_decayed",
              "diagonal_width", "purity", "energy_mean", "energy_std"]
    if fac is not None:
        header.append("com_width_ratio")
    if mode == "both":
        header.append("fidelity_factored_vs_2d")
    _write_csv(out / "entropy_vs_time.csv", header,
               ([row[h] for h in header] for row in rows))

    first, last = rows[0], rows[-1]
    summary = {
        "model": "1d desk analog of the 3d ball problem",
        "kappa": kappa,
        "lambda0": lam0,
        "dt": cfg["dt"],
        "time": series_time[-1],
        "grid": cfg["grid"],
        "extent": cfg["extent"],
        "rel_points": rel_points,
        "evolve_mode": mode,
        "entropy_initial": first["entropy"],
        "entropy_final": last["entropy"],
        "coherence_initial": first["coherence_length"],
        "coherence_final": last["coherence_length"],
        "coherence_shrink_factor": first["coherence_length"] / last["coherence_length"],
        "width_initial": first["diagonal_width"],
        "width_final": last["diagonal_width"],
        "width_shrink_factor": first["diagonal_width"] / last["diagonal_width"],
        "purity_final": last["purity"],
        "energy_mean": last["energy_mean"],
        "energy_std": last["energy_std"],
        "bound_dominance": abs(last["energy_mean"]) / last["energy_std"]
        if last["energy_std"] > 0 else math.inf,
    }
    if fac is not None:
        summary["com_width_ratio_final"] = rows[-1]["com_width_ratio"]
    if mode == "both":
        summary["fidelity_final"] = last["fidelity_factored_vs_2d"]
    (out / "summary.json").write_text(_json_text(summary))
    print(_json_text(summary))
    return summary


def _sweep_one(payload: tuple) -> dict:
    kappa, base_cfg, out_dir = payload
    cfg = dict(base_cfg)
    cfg["kappa"] = kappa
    sub = Path(out_dir) / f"run_kappa_{kappa:g}"
    sub.mkdir(parents=True, exist_ok=True)
    summary = run_evolve(cfg, sub)
    summary["kappa"] = kappa
    return summary


def run_sweep(cfg: dict, out: Path) -> dict:
    kappa_list = cfg.get("kappa_list")
    if not kappa_list:
        raise ConfigError("sweep needs --kappa-list")
    workers = cfg.get("workers") or 1
    payloads = [(k, cfg, str(out)) for k in kappa_list]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_one, payloads))
    else:
        results = [_sweep_one(p) for p in payloads]
    results.sort(key=lambda r: r["kappa"])
    _write_csv(out / "sweep_summary.csv",
               ["kappa", "entropy_final", "coherence_shrink_factor", "width_shrink_factor"],
               [(r["kappa"], r["entropy_final"], r["coherence_shrink_factor"],
                 r["width_shrink_factor"]) for r in results])
    return {"kappa_list": list(kappa_list), "runs": len(results),
            "entropy_final": [r["entropy_final"] for r in results]}


_DISPATCH = {
    "estimate": run_estimate,
    "potential": run_potential,
    "spectrum": run_spectrum,
    "threshold": run_threshold,
    "evolve": run_evolve,
    "sweep": run_sweep,
}


def _write_manifest(out: Path, cfg: dict, status: str, summary, error: str | None,
                    started: str) -> None:
    manifest = {
        "config": {k: v for k, v in sorted(cfg.items()) if k != "out"},
        "config_hash": _config_hash(cfg),
        "mode": cfg.get("mode"),
        "status": status,
        "error": error,
        "summary": summary,
        "versions": {
            "gravtwin": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": sys.version.split()[0],
        },
        "started_at": started,
        "finished_at": _time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    try:
        (out / "manifest.json").write_text(_json_text(manifest))
    except OSError as exc:  # manifest is best effort once the run itself failed
        print(f"could not write manifest: {exc}", file=sys.stderr)


def execute(mode: str, file_values: dict, flag_values: dict) -> int:
    started = _time.strftime("%Y-%m-%dT%H:%M:%S")
    out_name = flag_values.get("out") or file_values.get("out")
    cfg: dict = {"mode": mode, "out": out_name}
    summary = None
    error = None
    try:
        cfg = resolve_config(mode, file_values, flag_values)
        out = Path(cfg.get("out") or f"runs/{mode}-{_config_hash(cfg)[:8]}")
        cfg["out"] = str(out)
        out.mkdir(parents=True, exist_ok=True)
        summary = _DISPATCH[mode](cfg, out)
    except (ConfigError, DomainError) as exc:
        error = f"configuration error: {exc}"
        code = EXIT_CONFIG
    except (NumericalError, FloatingPointError, np.linalg.LinAlgError) as exc:
        error = f"numerical failure: {exc}"
        code = EXIT_NUMERICAL
    else:
        code = EXIT_OK
    if error is not None:
        print(error, file=sys.stderr)
    out_path = Path(cfg.get("out") or f"runs/{mode}")
    try:
        out_path.mkdir(parents=True, exist_ok=True)
        _write_manifest(out_path, cfg, "ok" if code == EXIT_OK else "failed",
                        summary, error, started)
    except OSError as exc:
        print(f"could not create output directory: {exc}", file=sys.stderr)
        if code == EXIT_OK:
            code = EXIT_CONFIG
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gravtwin",
        description="Localization dynamics of a self-gravitating body coupled to its twin copy",
    )
    sub = parser.add_subparsers(dest="mode", required=True)

    def add_common(p):
        p.add_argument("--config", type=Path, help="key=value configuration file")
        p.add_argument("--out", help="output directory (default runs/<mode>-<hash>)")
        p.add_argument("--seed", type=int, help="random seed for Monte-Carlo checks")

    p = sub.add_parser("estimate", help="closed-form estimates for a physical scenario")
    add_common(p)
    p.add_argument("--mass", dest="mass_g", type=float, help="ball mass in grams")
    p.add_argument("--radius", dest="radius_cm", type=float, help="ball radius in cm")
    p.add_argument("--width", dest="width_cm", type=float, help="initial Gaussian width in cm")
    p.add_argument("--kappa-star", dest="kappa_star", type=float,
                   help="threshold coupling from the spectrum module (default 1.0)")
    p.add_argument("--density", type=float, help="density for the threshold mass, g/cm^3")
    p.add_argument("--mc-check", dest="mc_check", action="store_const", const=True,
                   help="cross-check the potential expectation by Monte Carlo")
    p.add_argument("--mc-samples", dest="mc_samples", type=int)

    p = sub.add_parser("potential", help="tabulate the scaled pair potential as CSV")
    add_common(p)
    p.add_argument("--u-from", dest="u_from", type=float)
    p.add_argument("--u-to", dest="u_to", type=float)
    p.add_argument("--num", type=int)

    p = sub.add_parser("spectrum", help="bound levels of the relative motion")
    add_common(p)
    p.add_argument("--kappa", type=float, help="scaled coupling")
    p.add_argument("--umax", type=float, help="outer wall of the radial domain")
    p.add_argument("--points", type=int, help="radial intervals")
    p.add_argument("--max-states", dest="max_states", type=int)

    p = sub.add_parser("threshold", help="self-localization threshold coupling and mass")
    add_common(p)
    p.add_argument("--density", type=float, help="matter density, g/cm^3")

    p = sub.add_parser("evolve", help="desk-scale localization run")
    add_common(p)
    p.add_argument("--kappa", type=float)
    p.add_argument("--lambda0", type=float, help="initial width in ball radii")
    p.add_argument("--grid", type=int, help="points per axis of the 2D grid")
    p.add_argument("--extent", type=float, help="box length of the 2D grid")
    p.add_argument("--rel-points", dest="rel_points", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--time", type=float)
    p.add_argument("--snap-every", dest="snap_every", type=int)
    p.add_argument("--mode", dest="evolve_mode", choices=("factored", "full2d", "both"))
    p.add_argument("--mask-width", dest="mask_width", type=float)
    p.add_argument("--mask-strength", dest="mask_strength", type=float)

    p = sub.add_parser("sweep", help="independent evolve runs over a coupling list")
    add_common(p)
    p.add_argument("--kappa-list", dest="kappa_list", help="comma separated couplings")
    p.add_argument("--workers", type=int)
    p.add_argument("--lambda0", type=float)
    p.add_argument("--grid", type=int)
    p.add_argument("--extent", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--time", type=float)
    p.add_argument("--snap-every", dest="snap_every", type=int)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    mode = args.mode
    file_values: dict = {}
    if args.config is not None:
        if not Path(args.config).exists():
            print(f"config file not found: {args.config}", file=sys.stderr)
            return EXIT_CONFIG
        try:
            file_values = _parse_config_file(Path(args.config))
        except ConfigError as exc:
            print(f"configuration error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    flag_values = {k: v for k, v in vars(args).items()
                   if k not in ("mode", "config") and v is not None}
    return execute(mode, file_values, flag_values)


if __name__ == "__main__":
    sys.exit(main())
