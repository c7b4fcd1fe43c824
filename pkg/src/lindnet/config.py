"""Experiment configuration files (TOML).

Layout::

    [network]
    n_sites = 21            # chain form; or matrix_file = "hopping.txt"
    hop_rate = 1.0
    dephasing = 0.0
    statistics = "bosonic"
    dissipative = [{node = 2, gamma = 1.2, gain = 0.2}, ...]

    [sweep]                 # one section per command, all keys optional
    n_points = 60

Site numbers are 1-based.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError, InvalidSpecError
from .io import read_hopping_file
from .netmodel import ChainBuilder, NetworkSpec, Statistics, build_chain, validate

COMMANDS = ("spectrum", "equilibrium", "sweep", "classical", "evolve", "darkstates", "ensemble")

_GRID_DEFAULTS = {"gamma_min": 1e-2, "gamma_max": 1e3, "n_points": 60, "include_zero": True, "grid": None}

DEFAULTS = {
    "spectrum": {"real_form": True},
    "equilibrium": {},
    "sweep": {**_GRID_DEFAULTS, "refine": True, "tol": 1e-3, "equilibria": False},
    "classical": {"gammas": [20.0, 50.0, 100.0, 200.0]},
    "evolve": {
        "observable": "correlation_distance",
        "decades": 4.0,
        "dt_max": None,
        "max_time": 1e7,
        "window_fraction": 1 / 3,
        "export_trajectory": False,
    },
    "darkstates": {"tol": 1e-8, "quasi_tol": 1e-2},
    "ensemble": {
        **_GRID_DEFAULTS,
        "grid": [0.0, 0.05, 0.1, 0.15, 0.25, 0.35, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 100.0],
        "p": None,
        "gamma": 1.2,
        "beta_ratio": 1 / 6,
        "n_realizations": 100,
        "seed": 42,
    },
}

_NETWORK_KEYS = {"n_sites", "hop_rate", "matrix_file", "dissipative", "dephasing", "statistics", "reference_rate"}


@dataclass
class ExperimentConfig:
    command: str
    network: NetworkSpec
    network_source: dict
    params: dict
    path: Path | None = None
    input_hash: str = ""
    base_chain: ChainBuilder | None = None
    extra_inputs: list = field(default_factory=list)

    def normalized(self) -> dict:
        return {"command": self.command, "network": self.network_source, self.command: self.params}


def _number(section, key, value, *, integer=False, positive=False, nonneg=False):
    ok_type = isinstance(value, int) if integer else isinstance(value, (int, float))
    if isinstance(value, bool) or not ok_type:
        kind = "an integer" if integer else "a number"
        raise ConfigError(f"[{section}] {key} must be {kind}, got {value!r}")
    if not integer and not math.isfinite(value):
        raise ConfigError(f"[{section}] {key} must be finite")
    if positive and not value > 0:
        raise ConfigError(f"[{section}] {key} must be positive, got {value}")
    if nonneg and value < 0:
        raise ConfigError(f"[{section}] {key} must be >= 0, got {value}")
    return int(value) if integer else float(value)


def _parse_network(raw: dict, base_dir: Path):
    unknown = set(raw) - _NETWORK_KEYS
    if unknown:
        raise ConfigError(f"[network] unknown field(s): {', '.join(sorted(unknown))}")
    stats = raw.get("statistics", "bosonic")
    try:
        stats = Statistics(stats)
    except ValueError:
        raise ConfigError(f"[network] statistics must be 'bosonic' or 'fermionic', got {stats!r}") from None
    dephasing = _number("network", "dephasing", raw.get("dephasing", 0.0), nonneg=True)

    entries = raw.get("dissipative", [])
    if not isinstance(entries, list):
        raise ConfigError("[network] dissipative must be a list of {node, gamma, gain} tables")
    nodes = {}
    for k, item in enumerate(entries):
        if not isinstance(item, dict) or "node" not in item:
            raise ConfigError(f"[network] dissipative[{k}] needs at least a node field")
        extra = set(item) - {"node", "gamma", "gain"}
        if extra:
            raise ConfigError(f"[network] dissipative[{k}] unknown field(s): {', '.join(sorted(extra))}")
        node = _number("network", f"dissipative[{k}].node", item["node"], integer=True)
        if node in nodes:
            raise ConfigError(f"[network] node {node} listed twice in dissipative")
        nodes[node] = (
            _number("network", f"dissipative[{k}].gamma", item.get("gamma", 0.0), nonneg=True),
            _number("network", f"dissipative[{k}].gain", item.get("gain", 0.0), nonneg=True),
        )

    extra_inputs = []
    base_chain = None
    if "matrix_file" in raw:
        if "hop_rate" in raw:
            raise ConfigError("[network] give either hop_rate (chain) or matrix_file, not both")
        mpath = Path(raw["matrix_file"])
        if not mpath.is_absolute():
            mpath = base_dir / mpath
        hopping = read_hopping_file(mpath)
        extra_inputs.append(mpath)
        n = hopping.shape[0]
        if "n_sites" in raw and raw["n_sites"] != n:
            raise ConfigError(f"[network] n_sites={raw['n_sites']} disagrees with matrix_file N={n}")
        for node in nodes:
            if not 1 <= node <= n:
                raise ConfigError(f"[network] dissipative node {node} outside 1..{n}")
        loss, gain = np.zeros(n), np.zeros(n)
        for node, (g, p) in nodes.items():
            loss[node - 1], gain[node - 1] = g, p
        ref = _number("network", "reference_rate", raw.get("reference_rate", 1.0), positive=True)
        spec = NetworkSpec(hopping, loss, gain, dephasing, stats, ref)
        source = {"matrix_file": str(mpath), "n_sites": n}
    else:
        if "n_sites" not in raw:
            raise ConfigError("[network] n_sites is required (or give matrix_file)")
        n = _number("network", "n_sites", raw["n_sites"], integer=True, positive=True)
        hop = _number("network", "hop_rate", raw.get("hop_rate", 1.0), positive=True)
        for node in nodes:
            if not 1 <= node <= n:
                raise ConfigError(f"[network] dissipative node {node} outside 1..{n}")
        base_chain = ChainBuilder(n, hop, nodes, dephasing, stats)
        spec = build_chain(base_chain)
        ref = _number("network", "reference_rate", raw.get("reference_rate", hop), positive=True)
        spec = NetworkSpec(spec.hopping, spec.loss, spec.gain, dephasing, stats, ref)
        source = {"n_sites": n, "hop_rate": hop}

    report = validate(spec)
    if not report.ok:
        raise ConfigError(f"[network] invalid network: {report}")
    source.update(
        {
            "dephasing": dephasing,
            "statistics": stats.value,
            "reference_rate": spec.reference_rate,
            "dissipative": [{"node": k, "gamma": v[0], "gain": v[1]} for k, v in sorted(nodes.items())],
        }
    )
    return spec, source, base_chain, extra_inputs


def _parse_grid(section, params):
    if params.get("grid") is not None:
        grid = params["grid"]
        if not isinstance(grid, list) or not grid:
            raise ConfigError(f"[{section}] grid must be a nonempty list of numbers")
        grid = [_number(section, "grid", g, nonneg=True) for g in grid]
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError(f"[{section}] grid must be strictly increasing")
        params["grid"] = grid
    else:
        lo = _number(section, "gamma_min", params["gamma_min"], positive=True)
        hi = _number(section, "gamma_max", params["gamma_max"], positive=True)
        if hi <= lo:
            raise ConfigError(f"[{section}] gamma_max must exceed gamma_min")
        params["gamma_min"], params["gamma_max"] = lo, hi
        params["n_points"] = _number(section, "n_points", params["n_points"], integer=True, positive=True)
        if not isinstance(params["include_zero"], bool):
            raise ConfigError(f"[{section}] include_zero must be true or false")


def _parse_params(command: str, raw: dict, spec: NetworkSpec, base_chain) -> dict:
    defaults = DEFAULTS[command]
    unknown = set(raw) - set(defaults)
    if unknown:
        raise ConfigError(f"[{command}] unknown field(s): {', '.join(sorted(unknown))}")
    params = {**defaults, **raw}
    if "grid" not in raw and any(k in raw for k in ("gamma_min", "gamma_max", "n_points", "include_zero")):
        params["grid"] = None
    for key in ("real_form", "refine", "equilibria", "export_trajectory", "include_zero"):
        if key in params and not isinstance(params[key], bool):
            raise ConfigError(f"[{command}] {key} must be true or false")

    if command in ("sweep", "ensemble"):
        _parse_grid(command, params)
    if command == "sweep":
        params["tol"] = _number(command, "tol", params["tol"], positive=True)
    elif command == "classical":
        gammas = params["gammas"]
        if not isinstance(gammas, list) or not gammas:
            raise ConfigError("[classical] gammas must be a nonempty list")
        params["gammas"] = [_number(command, "gammas", g, positive=True) for g in gammas]
    elif command == "evolve":
        if params["observable"] not in ("correlation_distance", "mean_norm"):
            raise ConfigError("[evolve] observable must be 'correlation_distance' or 'mean_norm'")
        params["decades"] = _number(command, "decades", params["decades"], positive=True)
        params["max_time"] = _number(command, "max_time", params["max_time"], positive=True)
        params["window_fraction"] = _number(command, "window_fraction", params["window_fraction"], positive=True)
        if params["window_fraction"] > 1:
            raise ConfigError("[evolve] window_fraction must be <= 1")
        if params["dt_max"] is not None:
            params["dt_max"] = _number(command, "dt_max", params["dt_max"], positive=True)
    elif command == "darkstates":
        params["tol"] = _number(command, "tol", params["tol"], positive=True)
        params["quasi_tol"] = _number(command, "quasi_tol", params["quasi_tol"], positive=True)
        if params["quasi_tol"] < params["tol"]:
            raise ConfigError("[darkstates] quasi_tol must be >= tol")
    elif command == "ensemble":
        if params["p"] is None:
            raise ConfigError("[ensemble] p is required")
        p = _number(command, "p", params["p"])
        if not 0 < p < 1:
            raise ConfigError(f"[ensemble] p outside (0,1): {p}")
        params["p"] = p
        params["gamma"] = _number(command, "gamma", params["gamma"], positive=True)
        br = _number(command, "beta_ratio", params["beta_ratio"], nonneg=True)
        if br >= 1:
            raise ConfigError("[ensemble] beta_ratio must be < 1 (bosonic stability)")
        params["beta_ratio"] = br
        params["n_realizations"] = _number(command, "n_realizations", params["n_realizations"], integer=True, positive=True)
        seed = _number(command, "seed", params["seed"], integer=True, nonneg=True)
        if seed >= 2**64:
            raise ConfigError("[ensemble] seed must fit in 64 bits")
        params["seed"] = seed
        if base_chain is None:
            raise ConfigError("[ensemble] needs a chain network (n_sites/hop_rate), not matrix_file")
        if base_chain.dissipative_nodes:
            raise ConfigError("[ensemble] the base network must carry no dissipative entries")
    return params


def parse_config(path, command: str | None = None) -> ExperimentConfig:
    """Read, validate and normalize a configuration file.

    ``command`` selects the section; when omitted the file must contain
    exactly one command section.
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    try:
        raw = tomllib.loads(data.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise ConfigError(f"{path}: not UTF-8 ({exc})") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: syntax error: {exc}") from None

    unknown = set(raw) - set(COMMANDS) - {"network"}
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")
    if "network" not in raw:
        raise ConfigError("missing [network] section")
    present = [c for c in COMMANDS if c in raw]
    if command is None:
        if len(present) != 1:
            raise ConfigError(f"expected exactly one command section, found {present or 'none'}")
        command = present[0]
    elif command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")

    try:
        spec, source, base_chain, extra = _parse_network(raw["network"], path.parent)
    except InvalidSpecError as exc:
        raise ConfigError(f"[network] {exc}") from None
    section = raw.get(command, {})
    if not isinstance(section, dict):
        raise ConfigError(f"[{command}] must be a table")
    params = _parse_params(command, dict(section), spec, base_chain)

    h = hashlib.sha256(data)
    for p in extra:
        h.update(Path(p).read_bytes())
    return ExperimentConfig(command, spec, source, params, path, h.hexdigest(), base_chain, extra)
