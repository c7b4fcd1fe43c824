"""``lindnet <command> --config <path> [--out <dir>] [--threads <k>] [--print-config]``

Exit codes: 0 success, 1 configuration error, 2 numerical failure, 3 I/O failure.
Site indices in every input and output file are 1-based.
"""
from __future__ import annotations

import argparse
import json
import logging
import platform
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from ._parallel import resolve_threads
from .classical import build_classical, islands, lifshitz_asymptote
from .config import COMMANDS, ExperimentConfig, parse_config
from .dynamics import relaxation_experiment
from .ensemble import BernoulliEnsembleConfig, average_curves
from .errors import ConfigError, InvalidSpecError, LindnetError, NumericalError
from .io import complex_columns, write_csv, write_matrix_csv, write_trajectory_csv
from .spectral import dark_state_analysis, equilibrium, first_moment_gap, second_moment_gap, theta_of_gamma
from .sweep import default_grid, run_sweep

log = logging.getLogger("lindnet")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


def _grid(params):
    if params.get("grid") is not None:
        return np.asarray(params["grid"], dtype=float)
    return default_grid(params["n_points"], params["gamma_min"], params["gamma_max"], params["include_zero"])


class _Outputs:
    def __init__(self, out_dir: Path):
        self.dir = out_dir
        self.files = []

    def path(self, name):
        p = self.dir / name
        self.files.append(p)
        return p

    def cleanup(self):
        for p in self.files:
            try:
                p.unlink()
            except FileNotFoundError:
                pass


def _cmd_spectrum(cfg, out, threads):
    spec, params = cfg.network, cfg.params
    phi = first_moment_gap(spec)
    theta = second_moment_gap(spec, real_form=params["real_form"])
    write_csv(out.path("phi_spectrum.csv"), ["index", *complex_columns("lambda")],
              ((k, z.real, z.imag) for k, z in enumerate(phi.spectrum, 1)))
    write_csv(out.path("theta_spectrum.csv"), ["index", *complex_columns("mu")],
              ((k, z.real, z.imag) for k, z in enumerate(theta.spectrum, 1)))
    return {"phi": phi.gap, "theta": theta.gap, "non_relaxing": theta.non_relaxing or phi.non_relaxing}


def _cmd_equilibrium(cfg, out, threads):
    c = equilibrium(cfg.network).c_eq
    write_matrix_csv(out.path("c_eq.csv"), c)
    off = c - np.diag(np.diag(c))
    return {"max_offdiagonal": float(np.max(np.abs(off), initial=0.0))}


def _cmd_sweep(cfg, out, threads):
    params = cfg.params
    res = run_sweep(cfg.network, _grid(params), refine=params["refine"], tol=params["tol"],
                    with_equilibria=params["equilibria"], threads=threads)
    m = res.coarse_mask
    write_csv(out.path("sweep.csv"), ["gamma", "phi", "theta"],
              zip(res.gamma_grid[m], res.phi[m], res.theta[m]))
    if res.equilibria is not None:
        for k, (keep, c) in enumerate(zip(m, res.equilibria)):
            if keep:
                write_matrix_csv(out.path(f"c_eq_{k:03d}.csv"), c)
    return {"gamma_opt": res.gamma_opt, "theta_max": res.theta_max,
            "bracket": list(res.bracket) if res.bracket else None, "n_grid": int(m.sum())}


def _cmd_classical(cfg, out, threads):
    spec = cfg.network
    try:
        isl = islands(spec)
    except InvalidSpecError:
        isl = None
    rows = []
    for g in cfg.params["gammas"]:
        s = spec.with_dephasing(g)
        model = build_classical(s)
        try:
            asym = lifshitz_asymptote(s)
        except InvalidSpecError:
            asym = ""
        rows.append((g, model.gap, theta_of_gamma(s), asym, isl.l_max if isl else ""))
    write_csv(out.path("classical.csv"), ["gamma", "classical_gap", "theta", "lifshitz", "l_max"], rows)
    return {"islands": [list(r) for r in isl.islands] if isl else None}


def _cmd_evolve(cfg, out, threads):
    p = cfg.params
    exp = relaxation_experiment(cfg.network, p["observable"], decades=p["decades"], dt_max=p["dt_max"],
                                max_time=p["max_time"], window_fraction=p["window_fraction"])
    tr = exp.trajectory
    mean = np.linalg.norm(tr.a_values, axis=1)
    dist = np.linalg.norm(tr.c_values - exp.c_eq, axis=(1, 2))
    write_csv(out.path("decay.csv"), ["time", "mean_norm", "correlation_distance"], zip(tr.times, mean, dist))
    if p["export_trajectory"]:
        write_trajectory_csv(out.path("trajectory.csv"), tr)
    ref = first_moment_gap(cfg.network).gap if p["observable"] == "mean_norm" else theta_of_gamma(cfg.network)
    return {"fitted_rate": exp.rate, "spectral_rate": ref, "t_end": float(tr.times[-1]), "dt": tr.dt}


def _cmd_darkstates(cfg, out, threads):
    modes = dark_state_analysis(cfg.network, cfg.params["tol"], cfg.params["quasi_tol"])
    n = cfg.network.n_sites
    header = ["index", "energy", "leakage", "kind"]
    for i in range(1, n + 1):
        header += complex_columns(f"xi_{i}")
    rows = []
    for d in modes:
        row = [d.index, d.energy, d.leakage, d.kind]
        for z in d.vector.astype(complex):
            row += [z.real, z.imag]
        rows.append(row)
    write_csv(out.path("darkstates.csv"), header, rows)
    return {"dark": sum(d.kind == "dark" for d in modes), "quasi_dark": sum(d.kind == "quasi-dark" for d in modes)}


def _cmd_ensemble(cfg, out, threads):
    p = cfg.params
    econf = BernoulliEnsembleConfig(p=p["p"], gamma=p["gamma"], beta_ratio=p["beta_ratio"],
                                    n_realizations=p["n_realizations"], seed=p["seed"],
                                    base_chain=cfg.base_chain)
    curves = average_curves(econf, _grid(p), threads=threads)
    write_csv(out.path("ensemble.csv"),
              ["gamma", "phi_mean", "phi_stderr", "theta_mean", "theta_stderr", "n_realizations"],
              ((g, a, b, c, d, curves.realization_count) for g, a, b, c, d in
               zip(curves.gamma_grid, curves.phi_mean, curves.phi_stderr, curves.theta_mean, curves.theta_stderr)))
    return {"trapless_realizations": curves.trapless_count}


_HANDLERS = {
    "spectrum": _cmd_spectrum,
    "equilibrium": _cmd_equilibrium,
    "sweep": _cmd_sweep,
    "classical": _cmd_classical,
    "evolve": _cmd_evolve,
    "darkstates": _cmd_darkstates,
    "ensemble": _cmd_ensemble,
}


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    return x


def run(cfg: ExperimentConfig, out_dir=".", threads=None) -> int:
    """Execute one command; writes its CSVs and ``manifest.json`` to ``out_dir``."""
    out_dir = Path(out_dir)
    outputs = _Outputs(out_dir)
    t0 = time.perf_counter()
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        threads = resolve_threads(threads)
        results = _HANDLERS[cfg.command](cfg, outputs, threads)
        manifest = {
            "command": cfg.command,
            "config_path": str(cfg.path) if cfg.path else None,
            "inputs_sha256": cfg.input_hash,
            "config": cfg.normalized(),
            "seed": cfg.params.get("seed"),
            "threads": threads,
            "versions": {"lindnet": __version__, "python": platform.python_version(),
                         "numpy": np.__version__, "scipy": scipy.__version__},
            "wall_time_s": time.perf_counter() - t0,
            "outputs": [p.name for p in outputs.files],
            "results": results,
        }
        mpath = outputs.path("manifest.json")
        mpath.write_text(json.dumps(_jsonable(manifest), indent=2) + "\n", encoding="utf-8")
    except (ConfigError, InvalidSpecError, ValueError) as exc:
        outputs.cleanup()
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except (NumericalError, np.linalg.LinAlgError, ArithmeticError) as exc:
        outputs.cleanup()
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC
    except OSError as exc:
        outputs.cleanup()
        log.error("I/O failure: %s", exc)
        return EXIT_IO
    log.info("%s finished in %.2fs", cfg.command, time.perf_counter() - t0)
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="lindnet", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, type=Path, help="TOML experiment configuration")
    ap.add_argument("--out", type=Path, default=Path("."), help="output directory (default: cwd)")
    ap.add_argument("--threads", type=int, default=None,
                    help="worker threads for sweep/ensemble (fallback: $LINDNET_THREADS, else 1)")
    ap.add_argument("--print-config", action="store_true", help="echo the normalized configuration")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="lindnet: %(levelname)s: %(message)s")
    try:
        cfg = parse_config(args.config, args.command)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("cannot read config: %s", exc)
        return EXIT_IO
    if args.print_config:
        json.dump(_jsonable(cfg.normalized()), sys.stdout, indent=2)
        sys.stdout.write("\n")
    return run(cfg, args.out, args.threads)


if __name__ == "__main__":
    sys.exit(main())
