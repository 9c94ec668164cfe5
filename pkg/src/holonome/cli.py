"""Command-line interface.

Subcommands::

    holonome gate      print a gate unitary and its pulse plan
    holonome transfer  photon transfer time series (NOT loop)
    holonome entangle  entanglement time series (Hadamard loop)
    holonome sweep     fidelity over a (kappa, gamma_m) damping grid
    holonome verify    parallel-transport and gate-algebra identities

Runs are configured by flags, a JSON config file (``--config``), or both;
explicit flags win over file values and every override is recorded in the
run manifest.  All quoted quantities carry their unit in the key or flag
name (``g0_mhz_over_2pi``, ``dt_us``, ...); damping rates additionally need
a ``rate_convention`` ("angular" or "linear") saying how to read the MHz
numbers.

With ``--out DIR`` each run writes its artifacts (CSV/JSON/SVG) plus a
``manifest.json`` that pins the fully resolved configuration; feeding a
manifest back through ``--config`` reproduces the run byte for byte (the
timestamp line aside).  Exit codes: 0 success, 2 configuration error,
3 numerical failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import __version__, _core
from ._render import heatmap_svg, series_svg
from .errors import ConfigError, NumericalError, ValidationError
from .experiments import (
    DEFAULT_G0_MHZ_OVER_2PI,
    GAMMA_RANGE_MHZ,
    KAPPA_RANGE_MHZ,
    ObservableSeries,
    SweepGrid,
    run_entanglement,
    run_state_transfer,
    run_sweep,
)
from .fock import standard_space
from .holonomy import (
    GATE_NAMES,
    GateSpec,
    catalog,
    compose,
    gate_unitary,
    holonomy_connection,
    holonomy_exponential,
    plan_pulse,
    verify_parallel_transport,
)
from .lindblad import IntegratorConfig, NoiseParams
from .model import BlochAngles
from .units import RATE_CONVENTIONS, coupling_from_mhz_over_2pi, rate_from_quoted_mhz

__all__ = ["main", "build_parser", "parse_config", "dispatch", "RunConfig",
           "emit_csv", "emit_json", "emit_plot", "run_manifest"]

EXPERIMENTS = ("gate", "transfer", "entangle", "sweep", "verify")
FORMATS = ("csv", "json", "svg")

_DEFAULT_DOC: dict = {
    "experiment": None,
    "gate": None,
    "theta_rad": None,
    "phi_rad": None,
    "g0_mhz_over_2pi": DEFAULT_G0_MHZ_OVER_2PI,
    "noise": {
        "kappa_mhz": 0.0,
        "kappa2_mhz": None,
        "gamma_m_mhz": 0.0,
        "n_th": 0.0,
        "rate_convention": "angular",
    },
    "integrator": {
        "dt_us": None,
        "hermitize_every": 50,
        "truncation_check_threshold": 1e-5,
    },
    "space": {"mech_cutoff": 15, "cavity_cutoff": 2},
    "samples": None,
    "sweep": {
        "kappa_range_mhz": list(KAPPA_RANGE_MHZ),
        "gamma_range_mhz": list(GAMMA_RANGE_MHZ),
        "points": [21, 21],
    },
    "output": {"directory": None, "formats": ["csv", "svg"]},
}

_RATE_KEYS = ("kappa_mhz", "kappa2_mhz", "gamma_m_mhz")


# ---------------------------------------------------------------- config

@dataclass(frozen=True, eq=False)
class RunConfig:
    """Fully resolved run configuration (defaults materialized)."""

    doc: dict
    overrides: tuple[str, ...] = ()

    @property
    def experiment(self) -> str:
        return self.doc["experiment"]

    def g0(self) -> float:
        return coupling_from_mhz_over_2pi(self.doc["g0_mhz_over_2pi"])

    def space(self):
        sp = self.doc["space"]
        return standard_space(mech_dim=int(sp["mech_cutoff"]), cavity_dim=int(sp["cavity_cutoff"]))

    def noise(self) -> NoiseParams:
        blk = self.doc["noise"]
        kappa2 = blk["kappa2_mhz"] if blk["kappa2_mhz"] is not None else blk["kappa_mhz"]
        return NoiseParams.from_quoted_mhz(
            kappa1=float(blk["kappa_mhz"]),
            kappa2=float(kappa2),
            gamma_m=float(blk["gamma_m_mhz"]),
            n_th=float(blk["n_th"]),
            convention=blk["rate_convention"],
        )

    def integrator(self) -> IntegratorConfig:
        blk = self.doc["integrator"]
        return IntegratorConfig(
            dt=None if blk["dt_us"] is None else float(blk["dt_us"]),
            hermitize_every=int(blk["hermitize_every"]),
            truncation_check_threshold=float(blk["truncation_check_threshold"]),
        )

    def samples(self, default: int) -> int:
        return default if self.doc["samples"] is None else int(self.doc["samples"])

    def gate_specs(self, default: str = "NOT") -> tuple[GateSpec, ...]:
        if self.doc["theta_rad"] is not None:
            phi = 0.0 if self.doc["phi_rad"] is None else float(self.doc["phi_rad"])
            return (GateSpec(BlochAngles(float(self.doc["theta_rad"]), phi), name="CUSTOM"),)
        entry = catalog(self.doc["gate"] or default)
        return entry if isinstance(entry, tuple) else (entry,)

    def outdir(self) -> Optional[Path]:
        d = self.doc["output"]["directory"]
        return None if d is None else Path(d)

    def formats(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(self.doc["output"]["formats"]))


def _load_json(path: Union[str, Path]) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return doc


def _merge(defaults: dict, incoming: dict, path: str = "") -> dict:
    out = {k: copy.deepcopy(v) for k, v in defaults.items()}
    for key, value in incoming.items():
        if key not in out:
            raise ConfigError(f"unknown config key {path + key!r}")
        if isinstance(out[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"config key {path + key!r} must be an object")
            out[key] = _merge(out[key], value, path + key + ".")
        else:
            out[key] = value
    return out


def _set_override(doc: dict, keys: Sequence[str], value, notes: list[str], file_had: dict):
    blk = doc
    src = file_had
    for k in keys[:-1]:
        blk = blk[k]
        src = src.get(k, {}) if isinstance(src, dict) else {}
    leaf = keys[-1]
    had = isinstance(src, dict) and leaf in src
    old = blk[leaf]
    if had and old != value:
        notes.append(f"{'.'.join(keys)}: file={old!r} overridden by flag={value!r}")
    blk[leaf] = value


def _parse_pair(text: str, flag: str) -> list[float]:
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) != 2:
        raise ConfigError(f"{flag} expects LO,HI, got {text!r}")
    try:
        return [float(parts[0]), float(parts[1])]
    except ValueError as exc:
        raise ConfigError(f"{flag} expects numbers, got {text!r}") from exc


def _parse_grid(text: str) -> list[int]:
    parts = str(text).lower().split("x")
    if len(parts) != 2:
        raise ConfigError(f"--grid expects NKxNG, got {text!r}")
    try:
        return [int(parts[0]), int(parts[1])]
    except ValueError as exc:
        raise ConfigError(f"--grid expects integers, got {text!r}") from exc


def parse_config(source) -> RunConfig:
    """Resolve a config from a JSON file path, a dict, or parsed CLI flags.

    Flags win over file values; a manifest produced by an earlier run is
    accepted wherever a config file is (its ``config`` block is used).
    """
    flags: Optional[argparse.Namespace] = None
    if isinstance(source, (str, Path)):
        incoming = _load_json(source)
    elif isinstance(source, dict):
        incoming = copy.deepcopy(source)
    elif isinstance(source, argparse.Namespace):
        flags = source
        incoming = _load_json(flags.config) if getattr(flags, "config", None) else {}
    else:
        raise ConfigError(f"cannot parse config from {type(source).__name__}")

    if "artifact" in incoming and "config" in incoming:
        incoming = incoming["config"]  # accept a manifest verbatim
        if not isinstance(incoming, dict):
            raise ConfigError("manifest config block must be an object")

    if "noise" in incoming and isinstance(incoming["noise"], dict):
        blk = incoming["noise"]
        if any(k in blk for k in _RATE_KEYS) and "rate_convention" not in blk:
            raise ConfigError(
                "noise rates in a config file need an explicit rate_convention "
                "('angular' or 'linear')"
            )

    doc = _merge(_DEFAULT_DOC, incoming)
    notes: list[str] = []

    if flags is not None:
        simple = [
            (("gate",), "gate"),
            (("theta_rad",), "theta"),
            (("phi_rad",), "phi"),
            (("g0_mhz_over_2pi",), "g0_mhz_over_2pi"),
            (("noise", "kappa_mhz"), "kappa"),
            (("noise", "gamma_m_mhz"), "gamma_m"),
            (("noise", "n_th"), "nth"),
            (("noise", "rate_convention"), "rate_convention"),
            (("integrator", "dt_us"), "dt"),
            (("space", "mech_cutoff"), "mech_cutoff"),
            (("samples",), "samples"),
            (("output", "directory"), "out"),
        ]
        for keys, attr in simple:
            value = getattr(flags, attr, None)
            if value is not None:
                _set_override(doc, keys, value, notes, incoming)
        if getattr(flags, "format", None):
            _set_override(doc, ("output", "formats"), list(flags.format), notes, incoming)
        if getattr(flags, "grid", None):
            _set_override(doc, ("sweep", "points"), _parse_grid(flags.grid), notes, incoming)
        if getattr(flags, "kappa_range", None):
            _set_override(
                doc, ("sweep", "kappa_range_mhz"),
                _parse_pair(flags.kappa_range, "--kappa-range"), notes, incoming,
            )
        if getattr(flags, "gamma_range", None):
            _set_override(
                doc, ("sweep", "gamma_range_mhz"),
                _parse_pair(flags.gamma_range, "--gamma-range"), notes, incoming,
            )
        command = getattr(flags, "command", None)
        if command:
            if incoming.get("experiment") not in (None, command):
                notes.append(
                    f"experiment: file={incoming['experiment']!r} overridden by "
                    f"subcommand {command!r}"
                )
            doc["experiment"] = command

    _validate(doc)
    return RunConfig(doc=doc, overrides=tuple(notes))


def _require_number(doc_value, path: str, minimum=None) -> float:
    if isinstance(doc_value, bool) or not isinstance(doc_value, (int, float)):
        raise ConfigError(f"config key {path!r} must be a number, got {doc_value!r}")
    v = float(doc_value)
    if not math.isfinite(v):
        raise ConfigError(f"config key {path!r} must be finite")
    if minimum is not None and v < minimum:
        raise ConfigError(f"config key {path!r} must be >= {minimum}, got {v}")
    return v


def _validate(doc: dict):
    if doc["experiment"] not in EXPERIMENTS:
        raise ConfigError(
            f"experiment must be one of {EXPERIMENTS}, got {doc['experiment']!r}"
        )
    exp = doc["experiment"]

    if doc["gate"] is not None:
        if doc["theta_rad"] is not None or doc["phi_rad"] is not None:
            raise ConfigError("give either a gate name or theta/phi angles, not both")
        catalog(doc["gate"])  # raises for unknown names
    if doc["phi_rad"] is not None and doc["theta_rad"] is None:
        raise ConfigError("phi_rad given without theta_rad")
    if doc["theta_rad"] is not None:
        phi = 0.0 if doc["phi_rad"] is None else doc["phi_rad"]
        BlochAngles(_require_number(doc["theta_rad"], "theta_rad"),
                    _require_number(phi, "phi_rad"))
    if exp in ("transfer", "entangle"):
        if doc["gate"] is not None or doc["theta_rad"] is not None:
            raise ConfigError(
                f"{exp} runs a fixed loop (NOT or HADAMARD); gate/theta flags do not apply"
            )
    if exp == "sweep" and doc["theta_rad"] is not None:
        raise ConfigError("sweeps take a named single-loop gate, not custom angles")

    _require_number(doc["g0_mhz_over_2pi"], "g0_mhz_over_2pi", minimum=1e-12)

    blk = doc["noise"]
    _require_number(blk["kappa_mhz"], "noise.kappa_mhz", minimum=0.0)
    if blk["kappa2_mhz"] is not None:
        _require_number(blk["kappa2_mhz"], "noise.kappa2_mhz", minimum=0.0)
    _require_number(blk["gamma_m_mhz"], "noise.gamma_m_mhz", minimum=0.0)
    _require_number(blk["n_th"], "noise.n_th", minimum=0.0)
    if blk["rate_convention"] not in RATE_CONVENTIONS:
        raise ConfigError(
            f"rate_convention must be one of {RATE_CONVENTIONS}, got {blk['rate_convention']!r}"
        )

    it = doc["integrator"]
    if it["dt_us"] is not None:
        _require_number(it["dt_us"], "integrator.dt_us", minimum=1e-12)
    _require_number(it["hermitize_every"], "integrator.hermitize_every", minimum=1)
    _require_number(
        it["truncation_check_threshold"], "integrator.truncation_check_threshold"
    )

    sp = doc["space"]
    for key in ("mech_cutoff", "cavity_cutoff"):
        if _require_number(sp[key], f"space.{key}", minimum=2) != int(sp[key]):
            raise ConfigError(f"space.{key} must be an integer")

    if doc["samples"] is not None:
        if _require_number(doc["samples"], "samples", minimum=2) != int(doc["samples"]):
            raise ConfigError("samples must be an integer")

    sw = doc["sweep"]
    for key in ("kappa_range_mhz", "gamma_range_mhz"):
        rng = sw[key]
        if not (isinstance(rng, (list, tuple)) and len(rng) == 2):
            raise ConfigError(f"sweep.{key} must be [lo, hi]")
        lo = _require_number(rng[0], f"sweep.{key}[0]", minimum=0.0)
        hi = _require_number(rng[1], f"sweep.{key}[1]", minimum=0.0)
        if not 0.0 < lo < hi:
            raise ConfigError(f"sweep.{key} must satisfy 0 < lo < hi")
    pts = sw["points"]
    if not (isinstance(pts, (list, tuple)) and len(pts) == 2):
        raise ConfigError("sweep.points must be [nk, ng]")
    for p in pts:
        if _require_number(p, "sweep.points", minimum=2) != int(p):
            raise ConfigError("sweep.points must be integers")

    out = doc["output"]
    if out["directory"] is not None and not isinstance(out["directory"], str):
        raise ConfigError("output.directory must be a string path")
    fmts = out["formats"]
    if not (isinstance(fmts, (list, tuple)) and fmts):
        raise ConfigError("output.formats must be a non-empty list")
    for f in fmts:
        if f not in FORMATS:
            raise ConfigError(f"unknown output format {f!r}; choose from {FORMATS}")


# ---------------------------------------------------------------- emitters

def _repr_float(v) -> str:
    return repr(float(v))


def _atomic_write(path: Path, text: str):
    path = Path(path)
    tmp = path.with_name(f"{path.name}.tmp-{os.getpid()}")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def emit_csv(obj: Union[ObservableSeries, SweepGrid], path: Union[str, Path]):
    """Write a time series (t,P1,P2,P3,F) or sweep (kappa,gamma_m,F) CSV."""
    if isinstance(obj, ObservableSeries):
        lines = ["t,P1,P2,P3,F"]
        for k in range(len(obj.times)):
            lines.append(
                ",".join(
                    _repr_float(x)
                    for x in (obj.times[k], obj.p1[k], obj.p2[k], obj.p3[k], obj.f[k])
                )
            )
    elif isinstance(obj, SweepGrid):
        lines = ["kappa,gamma_m,F"]
        for i, kv in enumerate(obj.kappa_values):
            for j, gv in enumerate(obj.gamma_values):
                lines.append(
                    f"{_repr_float(kv)},{_repr_float(gv)},{_repr_float(obj.fidelities[i, j])}"
                )
    else:
        raise ValidationError(f"cannot emit CSV for {type(obj).__name__}")
    _atomic_write(Path(path), "\n".join(lines) + "\n")


def emit_json(obj: Union[ObservableSeries, SweepGrid], path: Union[str, Path]):
    """Write the same data as emit_csv, as a JSON document."""
    if isinstance(obj, ObservableSeries):
        doc = {
            "t": [float(v) for v in obj.times],
            "P1": [float(v) for v in obj.p1],
            "P2": [float(v) for v in obj.p2],
            "P3": [float(v) for v in obj.p3],
            "F": [float(v) for v in obj.f],
        }
    elif isinstance(obj, SweepGrid):
        doc = {
            "kappa": [float(v) for v in obj.kappa_values],
            "gamma_m": [float(v) for v in obj.gamma_values],
            "F": [[float(v) for v in row] for row in obj.fidelities],
            "rate_convention": obj.convention,
            "n_th": obj.n_th,
        }
    else:
        raise ValidationError(f"cannot emit JSON for {type(obj).__name__}")
    _atomic_write(Path(path), json.dumps(doc, indent=2) + "\n")


def emit_plot(obj: Union[ObservableSeries, SweepGrid], path: Union[str, Path]):
    """Render a deterministic SVG chart for a series or sweep."""
    if isinstance(obj, ObservableSeries):
        gate = obj.metadata.get("gate", "")
        text = series_svg(obj, title=f"{gate} loop: populations and fidelity".strip())
    elif isinstance(obj, SweepGrid):
        gate = obj.metadata.get("gate", "")
        text = heatmap_svg(
            obj, title=f"{gate} fidelity vs damping (n_th = {obj.n_th:g})".strip()
        )
    else:
        raise ValidationError(f"cannot plot {type(obj).__name__}")
    _atomic_write(Path(path), text)


def run_manifest(
    config: RunConfig,
    derived: dict,
    invariants: Optional[dict],
    outputs: Sequence[str],
) -> dict:
    """Manifest pinning a run: resolved config, derived quantities, outputs.

    The timestamp lives in its own designated line; everything else is a
    pure function of the configuration and the installed version.
    """
    return {
        "artifact": {"name": "holonome", "version": __version__},
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "config": config.doc,
        "overrides": list(config.overrides),
        "derived": derived,
        "invariants": invariants or {},
        "outputs": list(outputs),
    }


def _write_artifacts(config: RunConfig, obj, stem: str, derived: dict, invariants):
    outdir = config.outdir()
    if outdir is None:
        return []
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for fmt in config.formats():
        name = f"{stem}.{fmt}"
        path = outdir / name
        if fmt == "csv":
            emit_csv(obj, path)
        elif fmt == "json":
            emit_json(obj, path)
        else:
            emit_plot(obj, path)
        written.append(name)
    manifest = run_manifest(config, derived, invariants, written)
    _atomic_write(outdir / "manifest.json", json.dumps(manifest, indent=2) + "\n")
    for name in written + ["manifest.json"]:
        print(f"wrote {outdir / name}")
    return written


# ---------------------------------------------------------------- commands

def _fmt_complex(z: complex) -> str:
    return f"{z.real:+.9f}{z.imag:+.9f}j"


def _print_unitary(u: np.ndarray):
    for row in u:
        print("    [" + ", ".join(_fmt_complex(z) for z in row) + "]")


def _loop_payload(spec: GateSpec, g0: float) -> dict:
    plan = plan_pulse(spec, g0)
    return {
        "name": spec.name,
        "theta_rad": spec.angles.theta,
        "phi_rad": spec.angles.phi,
        "g1_rad_per_us": [plan.couplings.g1.real, plan.couplings.g1.imag],
        "g2_rad_per_us": [plan.couplings.g2.real, plan.couplings.g2.imag],
        "g0_rad_per_us": plan.couplings.g0,
        "tau_us": plan.duration_tau,
        "pulse_area": plan.pulse_area,
    }


def _cmd_gate(config: RunConfig) -> int:
    specs = config.gate_specs()
    u = compose(specs)
    g0 = config.g0()
    loops = [_loop_payload(spec, g0) for spec in specs]
    label = config.doc["gate"] or specs[0].name or "gate"
    print(f"{label}: {len(specs)} loop(s), G0 = {g0:.6f} rad/us")
    for loop in loops:
        print(
            f"  loop {loop['name']}: theta = {loop['theta_rad']:.6f}, "
            f"phi = {loop['phi_rad']:.6f}, tau = {loop['tau_us']:.6f} us, "
            f"G1 = {loop['g1_rad_per_us'][0]:+.6f}{loop['g1_rad_per_us'][1]:+.6f}j, "
            f"G2 = {loop['g2_rad_per_us'][0]:+.6f}{loop['g2_rad_per_us'][1]:+.6f}j rad/us"
        )
    print("  unitary:")
    _print_unitary(u)

    outdir = config.outdir()
    if outdir is not None:
        outdir.mkdir(parents=True, exist_ok=True)
        payload = {
            "gate": label,
            "loops": loops,
            "unitary_re": [[float(z.real) for z in row] for row in u],
            "unitary_im": [[float(z.imag) for z in row] for row in u],
        }
        _atomic_write(outdir / "gate.json", json.dumps(payload, indent=2) + "\n")
        manifest = run_manifest(config, {"loops": loops}, None, ["gate.json"])
        _atomic_write(outdir / "manifest.json", json.dumps(manifest, indent=2) + "\n")
        print(f"wrote {outdir / 'gate.json'}")
        print(f"wrote {outdir / 'manifest.json'}")
    return 0


def _verify_rows(config: RunConfig) -> list[dict]:
    if config.doc["gate"] is not None or config.doc["theta_rad"] is not None:
        specs = list(config.gate_specs())
    else:
        specs = []
        for name in GATE_NAMES:
            entry = catalog(name)
            specs.extend(entry if isinstance(entry, tuple) else (entry,))
    samples = config.samples(default=100)
    rows = []
    for spec in specs:
        report = verify_parallel_transport(spec, samples=samples)
        u_direct = gate_unitary(spec)
        u_holonomy = holonomy_exponential(holonomy_connection(spec))
        holonomy_dev = float(np.max(np.abs(u_direct - u_holonomy)))
        unitarity_dev = float(
            np.max(np.abs(u_direct @ u_direct.conj().T - np.eye(2)))
        )
        ok = report.passed and holonomy_dev < 1e-10 and unitarity_dev < 1e-12
        rows.append(
            {
                "loop": spec.name,
                "theta_rad": spec.angles.theta,
                "phi_rad": spec.angles.phi,
                "samples": report.samples,
                "max_transport_violation": report.max_transport_violation,
                "cyclicity_deviation": report.cyclicity_deviation,
                "dark_phase": report.dark_phase,
                "bright_phase": report.bright_phase,
                "holonomy_vs_gate_dev": holonomy_dev,
                "unitarity_dev": unitarity_dev,
                "ok": bool(ok),
            }
        )
    return rows


def _cmd_verify(config: RunConfig) -> int:
    rows = _verify_rows(config)
    for row in rows:
        status = "OK" if row["ok"] else "FAIL"
        print(
            f"{row['loop']}: transport {row['max_transport_violation']:.2e}, "
            f"cyclic {row['cyclicity_deviation']:.2e}, "
            f"phases ({row['dark_phase']:.3f}, {row['bright_phase']:.3f}), "
            f"holonomy dev {row['holonomy_vs_gate_dev']:.2e} ... {status}"
        )
    outdir = config.outdir()
    if outdir is not None:
        outdir.mkdir(parents=True, exist_ok=True)
        _atomic_write(outdir / "verify.json", json.dumps({"loops": rows}, indent=2) + "\n")
        manifest = run_manifest(config, {}, None, ["verify.json"])
        _atomic_write(outdir / "manifest.json", json.dumps(manifest, indent=2) + "\n")
        print(f"wrote {outdir / 'verify.json'}")
        print(f"wrote {outdir / 'manifest.json'}")
    if not all(row["ok"] for row in rows):
        raise NumericalError("gate identity checks failed; see report above")
    return 0


def _series_derived(config: RunConfig, series: ObservableSeries) -> tuple[dict, dict]:
    md = series.metadata
    derived = {
        "gate": md["gate"],
        "theta_rad": md["theta"],
        "phi_rad": md["phi"],
        "pulse": md["pulse"],
        "dt_us": md["dt"],
        "n_steps": md["n_steps"],
        "samples": len(series.times),
        "space_dims": md["space_dims"],
        "noise_rad_per_us": md["noise"],
        "backend": md["backend"],
    }
    return derived, md["invariants"]


def _cmd_series(config: RunConfig) -> int:
    noise = config.noise()
    runner = run_state_transfer if config.experiment == "transfer" else run_entanglement
    series = runner(
        noise,
        config.integrator(),
        g0=config.g0(),
        space=config.space(),
        n_samples=config.samples(default=201),
    )
    p1, p2, p3 = series.p1[-1], series.p2[-1], series.p3[-1]
    print(
        f"{config.experiment}: tau = {series.times[-1]:.6f} us, "
        f"final P1 = {p1:.6f}, P2 = {p2:.6f}, P3 = {p3:.6f}, F = {series.f[-1]:.6f}"
    )
    derived, invariants = _series_derived(config, series)
    _write_artifacts(config, series, config.experiment, derived, invariants)
    return 0


def _cmd_sweep(config: RunConfig) -> int:
    sw = config.doc["sweep"]
    convention = config.doc["noise"]["rate_convention"]
    nk, ng = (int(p) for p in sw["points"])
    kappa = np.geomspace(
        rate_from_quoted_mhz(sw["kappa_range_mhz"][0], convention),
        rate_from_quoted_mhz(sw["kappa_range_mhz"][1], convention),
        nk,
    )
    gamma = np.geomspace(
        rate_from_quoted_mhz(sw["gamma_range_mhz"][0], convention),
        rate_from_quoted_mhz(sw["gamma_range_mhz"][1], convention),
        ng,
    )
    grid = run_sweep(
        gate=config.doc["gate"] or "NOT",
        kappa_values=kappa,
        gamma_values=gamma,
        n_th=float(config.doc["noise"]["n_th"]),
        config=config.integrator(),
        g0=config.g0(),
        convention=convention,
        space=config.space(),
    )
    f = grid.fidelities
    print(
        f"sweep {grid.metadata['gate']}: {nk}x{ng} grid, n_th = {grid.n_th:g}, "
        f"convention = {grid.convention}"
    )
    print(
        f"  F(best corner)  = {f[0, 0]:.4f} at kappa = {kappa[0]:.4g}, "
        f"gamma_m = {gamma[0]:.4g} rad/us"
    )
    print(
        f"  F(worst corner) = {f[-1, -1]:.4f} at kappa = {kappa[-1]:.4g}, "
        f"gamma_m = {gamma[-1]:.4g} rad/us"
    )
    derived = {
        "gate": grid.metadata["gate"],
        "tau_us": grid.metadata["tau_us"],
        "dt_us": grid.metadata["dt"],
        "kappa_rad_per_us": [float(kappa[0]), float(kappa[-1])],
        "gamma_rad_per_us": [float(gamma[0]), float(gamma[-1])],
        "points": [nk, ng],
        "n_th": grid.n_th,
        "rate_convention": grid.convention,
        "space_dims": grid.metadata["space_dims"],
        "backend": grid.metadata["backend"],
        "workers": grid.metadata["workers"],
    }
    _write_artifacts(config, grid, "sweep", derived, grid.metadata["invariants"])
    return 0


def dispatch(config: RunConfig) -> int:
    """Route a resolved configuration to its experiment."""
    exp = config.experiment
    if exp == "gate":
        return _cmd_gate(config)
    if exp == "verify":
        return _cmd_verify(config)
    if exp in ("transfer", "entangle"):
        return _cmd_series(config)
    if exp == "sweep":
        return _cmd_sweep(config)
    raise ConfigError(f"unknown experiment {exp!r}")


# ---------------------------------------------------------------- parser

def _add_common_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", metavar="PATH", help="JSON config file (or a previous manifest)")
    p.add_argument("--gate", metavar="NAME", help=f"gate name: {', '.join(GATE_NAMES)}")
    p.add_argument("--theta", type=float, metavar="RAD", help="custom polar angle")
    p.add_argument("--phi", type=float, metavar="RAD", help="custom azimuth")
    p.add_argument(
        "--g0-mhz-over-2pi", type=float, metavar="MHZ",
        help=f"collective coupling G0/2pi in MHz (default {DEFAULT_G0_MHZ_OVER_2PI:g})",
    )
    p.add_argument("--kappa", type=float, metavar="MHZ", help="cavity damping as quoted, both cavities")
    p.add_argument("--gamma-m", type=float, metavar="MHZ", help="mechanical damping as quoted")
    p.add_argument("--nth", type=float, metavar="N", help="mechanical bath occupation")
    p.add_argument(
        "--rate-convention", choices=RATE_CONVENTIONS,
        help="how quoted MHz damping rates are read (default angular)",
    )
    p.add_argument("--dt", type=float, metavar="US", help="RK4 step upper bound in us")
    p.add_argument("--mech-cutoff", type=int, metavar="N", help="mechanical Fock levels (default 15)")
    p.add_argument("--samples", type=int, metavar="N", help="stored samples per run")
    p.add_argument("--out", metavar="DIR", help="artifact directory (nothing is written without it)")
    p.add_argument(
        "--format", action="append", choices=FORMATS, metavar="FMT",
        help="artifact formats, repeatable (default csv,svg)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="holonome",
        description="Holonomic single-qubit gates on a two-cavity optomechanical system",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "gate": "print a gate unitary and its pulse plan",
        "transfer": "photon-transfer time series (NOT loop)",
        "entangle": "entanglement time series (HADAMARD loop)",
        "sweep": "gate fidelity over a (kappa, gamma_m) damping grid",
        "verify": "check parallel-transport and holonomy identities",
    }
    for name in EXPERIMENTS:
        sp = sub.add_parser(name, help=helps[name])
        _add_common_flags(sp)
        if name == "sweep":
            sp.add_argument("--grid", metavar="NKxNG", help="grid points per axis (default 21x21)")
            sp.add_argument("--kappa-range", metavar="LO,HI", help="kappa range as quoted MHz")
            sp.add_argument("--gamma-range", metavar="LO,HI", help="gamma_m range as quoted MHz")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = parse_config(args)
    except ValidationError as exc:  # ConfigError included
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return dispatch(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
