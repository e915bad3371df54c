"""
Config-driven runs: validation, dispatch to the simulators, CSV emission and
run records.

A scenario config is a JSON object (schema in ``data/config.schema.json``).
Figure presets are data in ``data/presets.json``: each maps a name to a list
of jobs, and every job writes one CSV plus a ``.run.json`` sidecar.
"""
from __future__ import annotations

import copy
import hashlib
import json
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .core import Trajectory, integrate_schrodinger, su2_propagator
from .errors import (
    ConfigError,
    DegenerateParameters,
    InfiniteTime,
    NoTransfer,
    TruncationTooTight,
)
from .multilevel import (
    STORAGE_LABELS,
    Segment,
    ThreeLevelSchedule,
    n_level_superposition,
    three_level_modulated_evolution,
)
from .open_system import LindbladChannels, decoherence_sweep, evolve_open
from .optimize import SweepSpec, gaussian_search, scan_minimal_time, selectivity_map
from .pulses import (
    SmoothSquareWell,
    UniformNoise,
    gaussian_decomposition,
    gaussian_period_unitaries,
    inversion_pulse_count,
    predicted_transfer,
    pulses_for_inversion,
    rotation_parameters,
    simulate_smooth,
    smooth_field_value,
)
from .rabi import RabiDrive, RabiSystem, coherent_field, rabi_evolution, random_field
from .twolevel import (
    SquareWellDrive,
    best_plateau_index,
    effective_coupling,
    inversion_time,
    minimal_time_first_order,
    one_period_unitary,
    simulate,
    stroboscopic_trajectory,
)

# (required, optional) parameter names per (system, modulation)
PARAMETERS = {
    ("two_level", "none"): (("coupling", "detuning"), ()),
    ("two_level", "intensity"): (("coupling1", "coupling2", "detuning"), ("m",)),
    ("two_level", "frequency"): (("coupling", "detuning1", "detuning2"), ("m",)),
    ("two_level", "smooth"): (("coupling1", "coupling2", "detuning", "hardness"), ()),
    ("two_level", "gaussian"): (("amplitude", "width", "detuning"), ()),
    ("three_level", "none"): (("coupling1", "coupling2", "detuning"), ("delta",)),
    ("three_level", "frequency"): (("coupling1", "coupling2", "detuning_a", "detuning_b"), ("delta", "t1", "t2")),
    ("three_level", "intensity"): (("coupling1", "coupling2", "coupling1_b", "coupling2_b", "detuning"),
                                   ("delta", "t1", "t2")),
    ("three_level", "delta_schedule"): (("coupling1", "coupling2", "detuning", "delta_a", "delta_b"), ("t1", "t2")),
    ("n_level", "frequency"): (("detuning_a", "detuning_b"), ()),
    ("rabi", "none"): (("coupling", "omega0", "omega_b"), ("n_max", "bosonic")),
    ("rabi", "intensity"): (("coupling1", "coupling2", "omega0", "omega_b"), ("n_max", "bosonic")),
}

INITIAL_KEYS = {
    "two_level": {"level"},
    "three_level": {"level", "labels"},
    "n_level": set(),
    "rabi": {"atom", "field", "mean_photons", "seed"},
}


def _resource(name):
    return resources.files("offres").joinpath("data", name)


def load_schema():
    return json.loads(_resource("config.schema.json").read_text())


def load_presets():
    return json.loads(_resource("presets.json").read_text())


# --------------------------------------------------------------------------
# validation


def _schema_error(err):
    path = ".".join(str(p) for p in err.absolute_path)
    if err.validator == "required":
        missing = [k for k in err.validator_value if k not in err.instance]
        name = missing[0] if missing else "?"
        return ConfigError(f"{path}.{name}" if path else name, "is required")
    if err.validator == "additionalProperties":
        extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
        name = extra[0] if extra else "?"
        return ConfigError(f"{path}.{name}" if path else name, "unknown key")
    return ConfigError(path or "<root>", err.message)


def _n_level_couplings(params):
    keys = sorted((k for k in params if k.startswith("coupling") and k[8:].isdigit()), key=lambda k: int(k[8:]))
    expected = [f"coupling{i}" for i in range(1, len(keys) + 1)]
    if keys != expected or len(keys) < 2:
        raise ConfigError("parameters", "n_level needs coupling1..couplingK with K >= 2 and no gaps")
    return [params[k] for k in keys]


def validate_config(config):
    """Check ``config`` and return a normalised deep copy.

    Raises :class:`ConfigError` naming the offending field.
    """
    if not isinstance(config, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(config), key=lambda e: (len(e.absolute_path), e.message))
    if errors:
        raise _schema_error(errors[0])
    cfg = copy.deepcopy(config)
    system, mode = cfg["system"], cfg["modulation"]
    if (system, mode) not in PARAMETERS:
        raise ConfigError("modulation", f"{mode!r} is not supported for system {system!r}")
    required, optional = PARAMETERS[(system, mode)]
    params = cfg["parameters"]
    for name in required:
        if name not in params:
            raise ConfigError(f"parameters.{name}", f"is required for {system}/{mode}")
    allowed = set(required) | set(optional)
    if system == "n_level":
        _n_level_couplings(params)
        allowed |= {k for k in params if k.startswith("coupling")}
    for name in params:
        if name not in allowed:
            raise ConfigError(f"parameters.{name}", f"unknown parameter for {system}/{mode}")
    for name in ("m", "n_max"):
        if name in params and (params[name] != int(params[name]) or params[name] < 0):
            raise ConfigError(f"parameters.{name}", "must be a non-negative integer")
    if "hardness" in params and params["hardness"] <= 0:
        raise ConfigError("parameters.hardness", "must be positive")
    if "width" in params and params["width"] <= 0:
        raise ConfigError("parameters.width", "must be positive")
    for name in cfg.get("initial", {}):
        if name not in INITIAL_KEYS[system]:
            raise ConfigError(f"initial.{name}", f"not used by system {system!r}")
    init = cfg.get("initial", {})
    if system == "rabi" and init.get("field") == "random" and "seed" not in init:
        raise ConfigError("initial.seed", "a random field needs a seed")
    dims = {"two_level": 2, "three_level": 3}
    if "level" in init and init["level"] >= dims.get(system, 0):
        raise ConfigError("initial.level", f"must be < {dims.get(system)}")
    if "decoherence" in cfg and (system, mode) not in (("two_level", "intensity"), ("two_level", "frequency"),
                                                       ("two_level", "none")):
        raise ConfigError("decoherence", "only supported for two-level square-well or constant drives")
    if "noise" in cfg and (system != "two_level" or mode not in ("none", "intensity", "frequency", "smooth")):
        raise ConfigError("noise", "only supported for two-level constant, square-well and smooth drives")
    if "noise" in cfg and "decoherence" in cfg:
        raise ConfigError("noise", "cannot be combined with decoherence")
    if "closed_form" == cfg.get("integrator") and (mode in ("smooth", "gaussian") or "noise" in cfg
                                                   or "decoherence" in cfg):
        raise ConfigError("integrator", "no closed form exists for this configuration")
    for name in cfg.get("overlays", []):
        if name == "envelope" and not (system == "two_level" and mode in ("intensity", "frequency")):
            raise ConfigError("overlays", "envelope needs a two-level square-well drive")
        if name == "rabi_cap" and not (system == "two_level" and mode == "none"):
            raise ConfigError("overlays", "rabi_cap needs a two-level constant drive")
    return cfg


def config_hash(config):
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def apply_overrides(config, seed=None, samples=None):
    """CLI ``--seed`` / ``--samples`` applied to a raw config (returns a copy)."""
    cfg = copy.deepcopy(config)
    if samples is not None:
        cfg.setdefault("time", {})["samples"] = int(samples)
    if seed is not None:
        if "noise" in cfg:
            cfg["noise"]["seed"] = int(seed)
        if cfg.get("initial", {}).get("field") == "random":
            cfg["initial"]["seed"] = int(seed)
    return cfg


# --------------------------------------------------------------------------
# dispatch


@dataclass
class RunResult:
    """Table columns plus diagnostics for the run record."""

    columns: dict
    diagnostics: dict = field(default_factory=dict)
    seed: int | None = None


def drive_from_parameters(mode, p):
    m = int(p.get("m", 0))
    if mode == "intensity":
        return SquareWellDrive.intensity(p["coupling1"], p["coupling2"], p["detuning"], m)
    if mode == "frequency":
        return SquareWellDrive.frequency(p["coupling"], p["detuning1"], p["detuning2"], m)
    raise ConfigError("modulation", f"{mode!r} is not a square-well modulation")


def _trajectory_columns(traj, keys=None):
    cols = {"t": np.asarray(traj.times)}
    for k in keys or traj.observables:
        v = np.asarray(traj.observables[k])
        if v.ndim == 1:
            cols[k] = v
    return cols


def _meta(traj):
    return {k: v for k, v in traj.metadata.items() if isinstance(v, (int, float, str))}


def _basis(level, dim):
    psi = np.zeros(dim, dtype=complex)
    psi[level] = 1.0
    return psi


def _two_level(cfg, times):
    p, mode = cfg["parameters"], cfg["modulation"]
    psi0 = _basis(cfg.get("initial", {}).get("level", 0), 2)
    integrator = cfg.get("integrator", "auto")
    noise_cfg = cfg.get("noise")
    noise = UniformNoise(noise_cfg["amplitude"], times, noise_cfg["seed"]) if noise_cfg else None
    diag, extra = {}, {}
    if mode == "none":
        d = (p["coupling"], 0.0, 0.5 * p["detuning"])
        H = 0.5 * p["detuning"] * np.diag([1.0, -1.0]).astype(complex)
        H[0, 1] = H[1, 0] = p["coupling"]
        if "decoherence" in cfg:
            drive = SquareWellDrive(p["coupling"], p["detuning"], p["coupling"], p["detuning"])
            traj = evolve_open(drive, LindbladChannels(**cfg["decoherence"]), psi0, times)
        elif noise is not None or integrator == "rk4":
            X = np.array([[0, 1], [1, 0]], dtype=complex)
            ham = (lambda t: H + noise(t) * X) if noise is not None else (lambda t: H)
            traj = integrate_schrodinger(ham, psi0, times, bound=float(np.hypot(
                p["coupling"] + (noise_cfg["amplitude"] if noise_cfg else 0.0), 0.5 * p["detuning"])))
        else:
            states = su2_propagator(d, times) @ psi0
            pops = np.abs(states) ** 2
            traj = Trajectory(times, {"P0": pops[:, 0], "P1": pops[:, 1]}, states, {"integrator": "closed-form"},
                              ("P0", "P1"))
        if noise is not None:
            extra["field"] = p["coupling"] + noise(times)
        if "rabi_cap" in cfg.get("overlays", []):
            c, D = p["coupling"], p["detuning"]
            extra["rabi_cap"] = np.full(times.shape, 4 * c**2 / (4 * c**2 + D**2))
    elif mode in ("intensity", "frequency"):
        drive = drive_from_parameters(mode, p)
        pd = one_period_unitary(drive)
        if "decoherence" in cfg:
            traj = evolve_open(drive, LindbladChannels(**cfg["decoherence"]), psi0, times)
        elif noise is not None or integrator == "rk4":
            traj = simulate(drive, psi0, times, noise=noise)
        else:
            traj = stroboscopic_trajectory(drive, psi0, times, pd)
        if noise is not None:
            extra["field"] = drive.coupling_at(times) + noise(times)
        lam = abs(effective_coupling(pd))
        if "envelope" in cfg.get("overlays", []):
            extra["envelope"] = np.sin(lam * times) ** 2
        diag.update(phi=pd.phi, tan_phi=pd.tan_phi, period=drive.period, t1=drive.t1, t2=drive.t2,
                    effective_coupling=lam)
        try:
            diag["inversion_time"] = inversion_time(drive, pd=pd)
        except InfiniteTime:
            diag["inversion_time"] = None
        try:
            diag["first_order_time"] = minimal_time_first_order(drive)
        except DegenerateParameters:
            diag["first_order_time"] = None
        m, res = best_plateau_index(drive)
        diag.update(plateau_index=m, plateau_residual=res)
    elif mode == "smooth":
        fld = SmoothSquareWell(p["coupling1"], p["coupling2"], p["detuning"], p["hardness"])
        amp = noise_cfg["amplitude"] if noise_cfg else 0.0
        traj = simulate_smooth(fld, psi0, times, noise=noise, noise_amplitude=amp, hard=False)
        extra["field"] = np.array([smooth_field_value(fld, t, noise) for t in times], dtype=float)
        diag.update(period=fld.period, t1=fld.t1, t2=fld.t2)
    else:  # gaussian
        train = gaussian_decomposition(p["amplitude"], p["width"], p["detuning"])
        T = train.period
        knots = np.arange(1, int(np.ceil(times[-1] / T)) + 1) * T
        traj = integrate_schrodinger(train.hamiltonian(), psi0, times, breakpoints=knots,
                                     bound=float(np.hypot(train.amplitude, train.detuning / 2)))
        s = (times % T) - 4 * train.width
        extra["field"] = train.amplitude * np.exp(-0.5 * (s / train.width) ** 2)
        diag.update(period=T, P=train.P, Q=train.Q, R=train.R, vartheta=train.vartheta)
        try:
            n, infid = pulses_for_inversion(train)
            diag.update(pulses=n, predicted_infidelity=infid)
        except NoTransfer:
            diag.update(pulses=None)
    cols = _trajectory_columns(traj)
    cols.update(extra)
    diag.update(_meta(traj))
    return RunResult(cols, diag, noise_cfg["seed"] if noise_cfg else None)


def _three_level_schedule(mode, p):
    d = p.get("delta", 0.0)
    c1, c2 = p["coupling1"], p["coupling2"]
    if mode == "none":
        seg = Segment(c1, c2, p["detuning"], d)
        return ThreeLevelSchedule(seg, seg)
    if mode == "frequency":
        first, second = Segment(c1, c2, p["detuning_a"], d), Segment(c1, c2, p["detuning_b"], d)
    elif mode == "intensity":
        first, second = Segment(c1, c2, p["detuning"], d), Segment(p["coupling1_b"], p["coupling2_b"], p["detuning"], d)
    else:
        first = Segment(c1, c2, p["detuning"], p["delta_a"])
        second = Segment(c1, c2, p["detuning"], p["delta_b"])
    return ThreeLevelSchedule(first, second, p.get("t1"), p.get("t2"))


def _three_level(cfg, times):
    p, mode = cfg["parameters"], cfg["modulation"]
    init = cfg.get("initial", {})
    schedule = _three_level_schedule(mode, p)
    labels = STORAGE_LABELS if init.get("labels") == "storage" else ("0", "1", "2")
    psi0 = _basis(init.get("level", 0), 3)
    if cfg.get("integrator") == "rk4":
        t1, T = schedule.durations[0], schedule.period
        n = int(np.ceil(times[-1] / T)) + 1
        knots = np.concatenate([np.arange(1, n) * T, np.arange(n) * T + t1])
        traj = integrate_schrodinger(schedule.hamiltonian(), psi0, times, breakpoints=knots, labels=labels)
    else:
        traj = three_level_modulated_evolution(schedule, psi0, times, labels)
    t1, t2 = schedule.durations
    diag = {"t1": t1, "t2": t2, "period": t1 + t2, **_meta(traj)}
    return RunResult(_trajectory_columns(traj), diag)


def _n_level(cfg, times):
    p = cfg["parameters"]
    res = n_level_superposition(_n_level_couplings(p), p["detuning_a"], p["detuning_b"], t_max=times[-1])
    diag = {"periods_to_target": res.periods, "fidelity": res.fidelity, "rotation": res.rotation,
            **_meta(res.trajectory)}
    return RunResult(_trajectory_columns(res.trajectory), diag)


def _rabi(cfg, times):
    p, mode = cfg["parameters"], cfg["modulation"]
    init = cfg.get("initial", {})
    n_max = int(p.get("n_max", 51))
    sys = RabiSystem(p["omega0"], p["omega_b"], n_max=n_max, bosonic=bool(p.get("bosonic", 0)))
    kind = init.get("field", "coherent")
    if kind == "random":
        fld = random_field(init["seed"], n_max)
    else:
        try:
            fld = coherent_field(init.get("mean_photons", 20.0), n_max, pure=kind == "coherent_pure")
        except TruncationTooTight as exc:
            raise ConfigError("parameters.n_max", str(exc)) from exc
    drive = RabiDrive(p["coupling"]) if mode == "none" else RabiDrive(p["coupling1"], p["coupling2"])
    traj = rabi_evolution(sys, fld, drive, times, init.get("atom", "g"))
    return RunResult(_trajectory_columns(traj), _meta(traj), init.get("seed") if kind == "random" else None)


_DISPATCH = {"two_level": _two_level, "three_level": _three_level, "n_level": _n_level, "rabi": _rabi}


def run(config):
    """Validate and execute one config; returns a :class:`RunResult`."""
    cfg = validate_config(config)
    times = np.linspace(0.0, cfg["time"]["t_max"], cfg["time"]["samples"])
    return _DISPATCH[cfg["system"]](cfg, times)


# --------------------------------------------------------------------------
# output


def format_value(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    return format(float(v), ".12g")


def emit_csv(columns, path):
    """Write equal-length columns as CSV: header, 12 significant digits, LF endings.

    ``columns`` is a mapping name -> 1-D array, or a :class:`Trajectory`.
    """
    if hasattr(columns, "observables"):
        columns = _trajectory_columns(columns)
    names = list(columns)
    data = [np.asarray(columns[k]).ravel() for k in names]
    if not names or len(data[0]) == 0:
        raise ValueError("nothing to write")
    if any(len(c) != len(data[0]) for c in data):
        raise ValueError("columns must have equal length")
    lines = [",".join(names)]
    lines += [",".join(format_value(c[i]) for c in data) for i in range(len(data[0]))]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, float) and not np.isfinite(v):
        return None
    return v


def write_record(csv_path, spec, diagnostics, wall_time, seed=None):
    """RunRecord sidecar ``<csv stem>.run.json`` next to the CSV."""
    csv_path = Path(csv_path)
    record = {
        "output": csv_path.name,
        "config_sha256": config_hash(spec),
        "software_version": __version__,
        "wall_time_s": wall_time,
        "integrator": diagnostics.get("integrator"),
        "max_step": diagnostics.get("max_step"),
        "seed": seed,
        "diagnostics": diagnostics,
        "config": spec,
    }
    side = csv_path.with_suffix(".run.json")
    side.write_text(json.dumps(_jsonable(record), indent=2, sort_keys=True) + "\n")
    return side


def run_to_files(config, prefix=None):
    """Run a config and write ``<prefix>.csv`` and ``<prefix>.run.json``."""
    cfg = validate_config(config)
    prefix = prefix or cfg.get("output") or cfg.get("name") or "run"
    start = time.perf_counter()
    result = run(cfg)
    wall = time.perf_counter() - start
    csv_path = emit_csv(result.columns, f"{prefix}.csv")
    write_record(csv_path, cfg, result.diagnostics, wall, result.seed)
    return [csv_path]


# --------------------------------------------------------------------------
# non-trajectory jobs


def _grid(r):
    return np.linspace(float(r[0]), float(r[1]), int(r[2]))


def _job_scan(job):
    spec = SweepSpec(job["parameter"], job["lo"], job["hi"], int(job["points"]), job.get("mode", "intensity"),
                     job.get("fixed", {}), job.get("spacing", "linear"))
    curve = scan_minimal_time(spec)
    cols = {job["parameter"]: curve.values, "exact_time": curve.exact, "first_order_time": curve.first_order,
            "tan_phi": curve.tan_phi, "gap": curve.gap, "verified_population": curve.verified_population}
    if job.get("asymptote"):
        coupling = spec.fixed.get("coupling", 1.0)
        cols["asymptote"] = np.full(curve.values.shape, np.pi**2 / (4 * coupling))
    ok = (curve.tan_phi < 0.1) & ~curve.gap
    err = curve.relative_error()[ok]
    diag = {"points": len(curve.values), "gaps": int(curve.gap.sum()),
            "max_relative_error_tan_phi_below_0.1": float(err.max()) if err.size else None}
    return RunResult(cols, diag)


def _job_selectivity(job):
    drive = drive_from_parameters(job["mode"], job["drive"])
    sel = selectivity_map(drive, _grid(job["detunings"]), _grid(job["deviations"]), job.get("horizon", 3))
    D, E = np.meshgrid(sel.detunings, sel.deviations, indexing="ij")
    cols = {"detuning": D.ravel(), "deviation": E.ravel(), "at_design": sel.at_design.ravel(),
            "peak": sel.peak.ravel()}
    return RunResult(cols, {"design_periods": sel.design_periods})


def _job_decoherence(job):
    drive = drive_from_parameters(job["mode"], job["drive"])
    sw = decoherence_sweep(drive, _grid(job["gamma01"]), _grid(job["gamma11"]), samples=job.get("samples", 201))
    G1, G2 = np.meshgrid(sw.gamma01, sw.gamma11, indexing="ij")
    cols = {"gamma01": G1.ravel(), "gamma11": G2.ravel(), "at_time": sw.at_time.ravel(), "peak": sw.peak.ravel()}
    return RunResult(cols, {"eval_time": sw.eval_time})


def _job_population_map(job):
    values = _grid(job["values"])
    times = np.linspace(0.0, job["t_max"], int(job["samples"]))
    rows = {"t": [], job["parameter"]: [], "P1": []}
    for v in values:
        p = dict(job["drive"], **{job["parameter"]: float(v)})
        traj = stroboscopic_trajectory(drive_from_parameters(job["mode"], p), (1, 0), times)
        rows["t"].append(times)
        rows[job["parameter"]].append(np.full(times.shape, v))
        rows["P1"].append(traj["P1"])
    return RunResult({k: np.concatenate(v) for k, v in rows.items()}, {"cells": len(values) * len(times)})


def _job_gaussian_grid(job):
    A, X = np.meshgrid(_grid(job["a_range"]), _grid(job["xi_range"]), indexing="ij")
    m = int(job.get("m", 0))
    U = gaussian_period_unitaries(A, X, job["delta"])
    P, Q, R, _, vt = rotation_parameters(U)
    with np.errstate(divide="ignore"):
        Ne = inversion_pulse_count(vt, m)
    N = np.maximum(1, np.rint(np.nan_to_num(Ne, posinf=0))).astype(int)
    cols = {"amplitude": A.ravel(), "width": X.ravel(), "P": P.ravel(), "Q": Q.ravel(), "R": R.ravel(),
            "vartheta": vt.ravel(), "pulses_exact": Ne.ravel(), "pulses": N.ravel(),
            "predicted": predicted_transfer(Q, R, vt, N).ravel()}
    return RunResult(cols, {"cells": int(A.size)})


def _job_gaussian_search(job):
    cands = gaussian_search(job["delta"], job["a_range"], job["xi_range"], m=int(job.get("m", 0)),
                            q_threshold=job.get("q_threshold", 1e-3), pulses=job.get("pulses"))
    cols = {k: np.array([getattr(c, k) for c in cands]) for k in
            ("amplitude", "width", "pulses", "pulses_exact", "q_prime", "predicted", "simulated")}
    return RunResult(cols, {"candidates": len(cands)})


def rydberg_table(coupling1, coupling2, detuning, stated):
    """Segment durations, period and first-order time with their power-of-ten split.

    ``stated`` maps quantity -> [mantissa, unit] as printed in the source;
    the table reports the ratio between the computed and the stated value.
    """
    drive = SquareWellDrive.intensity(coupling1, coupling2, detuning)
    values = {"t1": drive.t1, "t2": drive.t2, "period": drive.period,
              "total_time": minimal_time_first_order(drive)}
    to_us = {"fs": 1e-9, "ps": 1e-6, "ns": 1e-3, "us": 1.0}
    rows = {k: [] for k in ("value_us", "mantissa", "exponent", "stated_mantissa", "stated_value_us", "ratio")}
    names = []
    for name, v in values.items():
        e = int(np.floor(np.log10(v)))
        mant, unit = stated[name]
        sv = mant * to_us[unit]
        names.append(name)
        for k, x in zip(rows, (v, v / 10.0**e, e, mant, sv, v / sv)):
            rows[k].append(x)
    return names, {k: np.array(v, dtype=float) for k, v in rows.items()}


def _job_rydberg(job):
    names, cols = rydberg_table(job["coupling1"], job["coupling2"], job["detuning"], job["stated"])
    cols = {"index": np.arange(len(names)), **cols}
    ratio = cols["ratio"]
    diag = {"quantities": names, "ratio_to_stated": [float(r) for r in ratio],
            "consistent_factor": float(np.exp(np.mean(np.log(ratio))))}
    return RunResult(cols, diag)


JOB_KINDS = {
    "scan": _job_scan,
    "selectivity": _job_selectivity,
    "decoherence": _job_decoherence,
    "population_map": _job_population_map,
    "gaussian_grid": _job_gaussian_grid,
    "gaussian_search": _job_gaussian_search,
    "rydberg": _job_rydberg,
}


def preset_names():
    return list(load_presets())


def figure(name, out_dir=".", seed=None, samples=None):
    """Run every job of preset ``name``; returns the written CSV paths."""
    presets = load_presets()
    if name not in presets:
        raise ConfigError("preset", f"unknown preset {name!r}; choose from {', '.join(presets)}")
    out = []
    for job in presets[name]["jobs"]:
        suffix = job.get("suffix", "")
        path = Path(out_dir) / (f"{name}_{suffix}.csv" if suffix else f"{name}.csv")
        start = time.perf_counter()
        if job["kind"] == "run":
            spec = validate_config(apply_overrides(job["config"], seed, samples))
            result = run(spec)
        else:
            spec = job
            result = JOB_KINDS[job["kind"]](job)
        wall = time.perf_counter() - start
        emit_csv(result.columns, path)
        write_record(path, {"preset": name, **spec}, result.diagnostics, wall, result.seed)
        out.append(path)
    return out


def scan_to_files(spec, prefix=None):
    """Run a sweep spec (a ``scan``-style job object) and write its CSV and record."""
    kind = spec.get("kind", "scan")
    if kind not in JOB_KINDS:
        raise ConfigError("kind", f"unknown kind {kind!r}; choose from {', '.join(JOB_KINDS)}")
    job = {k: v for k, v in spec.items() if k != "output"}
    prefix = prefix or spec.get("output") or "scan"
    start = time.perf_counter()
    try:
        result = JOB_KINDS[kind](job)
    except KeyError as exc:
        raise ConfigError(str(exc.args[0]), "is required") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(kind, str(exc)) from exc
    path = emit_csv(result.columns, f"{prefix}.csv")
    write_record(path, spec, result.diagnostics, time.perf_counter() - start, result.seed)
    return [path]
