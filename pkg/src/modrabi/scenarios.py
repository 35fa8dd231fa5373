"""Scenario files: parsing, validation, execution, and file output.

A scenario is a JSON document with explicit units in the key names
(``*_ghz``, ``*_mhz``, ``*_khz`` are ordinary frequencies and are multiplied
by 2 pi on ingestion; ``*_ns`` are nanoseconds).  Drive amplitudes may be
given either normalized (``eta1``) or as the modulation amplitude product
(``amp1_ghz``, i.e. eta1 * Omega1), matching how hardware settings are
usually quoted.

``run_simulation`` executes one scenario: the frame-exact generator under
the master equation (or Schrodinger equation when dissipation is off),
and/or the constant effective model, plus the overlap fidelity between the
two when both are requested.  ``run_sweep`` repeats it over one scalar
parameter, optionally on a worker pool bounded by MODRABI_THREADS.

Output files are written atomically (temp + rename).  CSV is RFC 4180 with
a header row and shortest round-trip decimals, so identical scenarios with
fixed-step integration reproduce byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .dynamics import (DEFAULT_OBSERVABLES, IntegratorConfig, Trajectory,
                       evolve_master, evolve_schrodinger, fidelity,
                       loss_dissipators)
from .errors import ValidationError
from .hamiltonians import effective_hamiltonian, rotated_hamiltonian
from .hilbert import HilbertSpace, basis_state
from .modulation import (DriveParams, SystemParams, detunings,
                         effective_params, validity_report)

SCHEMA_VERSION = 1
TWO_PI = 2.0 * math.pi
NS = 1e-9

_UNIT_SCALE = {"ghz": TWO_PI * 1e9, "mhz": TWO_PI * 1e6, "khz": TWO_PI * 1e3}

MODELS = ("rotated_exact", "effective", "both")
INITIAL_STATES = ("vac_g", "vac_e")
OUTPUT_NAMES = ("sigma_pop", "photon_number", "fidelity", "trace", "purity",
                "top_fock_pop")
SWEEPABLE = ("drive.eta1", "drive.eta2", "drive.phi1", "drive.phi2",
             "drive.omega1_ghz", "drive.omega2_ghz",
             "drive.amp1_ghz", "drive.amp2_ghz",
             "fock_cutoff", "grid.t_end_ns")


@dataclass(frozen=True)
class Scenario:
    name: str
    system: SystemParams
    drive: DriveParams
    model: str
    dissipation: bool
    initial_state: str
    t_end: float          # seconds
    samples: int
    integrator: IntegratorConfig | None
    fock_cutoff: int
    outputs: tuple
    highlight: dict | None
    raw: dict


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _angular(section: dict, field: str, path: str, required: bool = True,
             default: float = 0.0) -> float:
    hits = [(suffix, section[f"{field}_{suffix}"]) for suffix in _UNIT_SCALE
            if f"{field}_{suffix}" in section]
    if not hits:
        if required:
            raise ValidationError(
                f"{path}.{field}: exactly one of "
                + "/".join(f"{field}_{s}" for s in _UNIT_SCALE) + " required")
        return default
    if len(hits) > 1:
        raise ValidationError(f"{path}.{field}: multiple unit spellings given")
    suffix, value = hits[0]
    if not isinstance(value, (int, float)):
        raise ValidationError(f"{path}.{field}_{suffix}: must be a number")
    return float(value) * _UNIT_SCALE[suffix]


def _amplitude(drive: dict, tone: int, omega: float) -> float:
    eta_key = f"eta{tone}"
    amp_keys = [k for k in (f"amp{tone}_ghz", f"amp{tone}_mhz") if k in drive]
    if eta_key in drive and amp_keys:
        raise ValidationError(f"drive.{eta_key}: give eta or amp, not both")
    if eta_key in drive:
        val = drive[eta_key]
        if not isinstance(val, (int, float)) or val < 0:
            raise ValidationError(f"drive.{eta_key}: must be a number >= 0")
        return float(val)
    if amp_keys:
        scale = _UNIT_SCALE["ghz"] if amp_keys[0].endswith("ghz") else _UNIT_SCALE["mhz"]
        amp = float(drive[amp_keys[0]]) * scale
        return amp / omega
    raise ValidationError(f"drive.eta{tone}: eta{tone} or amp{tone}_ghz required")


def _drive_from_targets(design: dict, system: SystemParams) -> DriveParams:
    """Resolve a drive from model targets instead of explicit tone settings.

    Accepted keys: anisotropy (required; 'inf' allowed), g_r_over_omega_eff,
    delta1_hz / delta1_mhz (default 0).
    """
    from .modulation import drive_for_detunings, effective_params, solve_amplitudes
    if not isinstance(design, dict) or "anisotropy" not in design:
        raise ValidationError("drive.design: needs at least {anisotropy}")
    lam = design["anisotropy"]
    lam = math.inf if lam == "inf" else float(lam)
    eta1, eta2 = solve_amplitudes(lam)
    if "delta1_hz" in design and "delta1_mhz" in design:
        raise ValidationError("drive.design: give delta1_hz or delta1_mhz, not both")
    if "delta1_hz" in design:
        delta1 = float(design["delta1_hz"]) * TWO_PI
    else:
        delta1 = float(design.get("delta1_mhz", 0.0)) * _UNIT_SCALE["mhz"]
    gratio = design.get("g_r_over_omega_eff")
    if gratio is not None:
        probe = drive_for_detunings(delta1, delta1, system, eta1, eta2)
        g_r_abs = abs(effective_params(system, probe).g_r)
        if g_r_abs == 0.0 or gratio <= 0:
            raise ValidationError("drive.design: g_r_over_omega_eff unreachable")
        delta2 = 2.0 * g_r_abs / float(gratio) - delta1
    else:
        delta2 = delta1
    return drive_for_detunings(delta1, delta2, system, eta1, eta2)


def parse_scenario(doc: dict, name: str = "scenario") -> Scenario:
    if not isinstance(doc, dict):
        raise ValidationError("scenario: top level must be a JSON object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValidationError(f"schema_version: expected {SCHEMA_VERSION}, got {version!r}")

    sys_doc = doc.get("system")
    if not isinstance(sys_doc, dict):
        raise ValidationError("system: required object")
    system = SystemParams(
        epsilon=_angular(sys_doc, "epsilon", "system"),
        omega=_angular(sys_doc, "omega", "system"),
        g=_angular(sys_doc, "g", "system"),
        kappa=_angular(sys_doc, "kappa", "system", required=False),
        gamma=_angular(sys_doc, "gamma", "system", required=False))

    drv_doc = doc.get("drive")
    if not isinstance(drv_doc, dict):
        raise ValidationError("drive: required object")
    if "design" in drv_doc:
        if len(drv_doc) != 1:
            raise ValidationError("drive.design: replaces explicit tone settings")
        drive = _drive_from_targets(drv_doc["design"], system)
    else:
        omega1 = _angular(drv_doc, "omega1", "drive")
        omega2 = _angular(drv_doc, "omega2", "drive")
        drive = DriveParams(
            omega1=omega1, omega2=omega2,
            eta1=_amplitude(drv_doc, 1, omega1),
            eta2=_amplitude(drv_doc, 2, omega2),
            phi1=float(drv_doc.get("phi1", 0.0)),
            phi2=float(drv_doc.get("phi2", 0.0)))

    model = doc.get("model", "both")
    if model not in MODELS:
        raise ValidationError(f"model: must be one of {MODELS}, got {model!r}")
    dissipation = doc.get("dissipation", False)
    if not isinstance(dissipation, bool):
        raise ValidationError("dissipation: must be true or false")
    initial = doc.get("initial_state", "vac_g")
    if initial not in INITIAL_STATES:
        raise ValidationError(f"initial_state: must be one of {INITIAL_STATES}")

    grid = doc.get("grid")
    if not isinstance(grid, dict):
        raise ValidationError("grid: required object")
    t_end_ns = grid.get("t_end_ns")
    if not isinstance(t_end_ns, (int, float)) or t_end_ns <= 0:
        raise ValidationError("grid.t_end_ns: must be a number > 0")
    samples = grid.get("samples")
    if not isinstance(samples, int) or samples < 2:
        raise ValidationError("grid.samples: must be an integer >= 2")

    cutoff = doc.get("fock_cutoff", 30)
    if not isinstance(cutoff, int) or cutoff < 2:
        raise ValidationError("fock_cutoff: must be an integer >= 2")

    integ_doc = doc.get("integrator", {})
    if not isinstance(integ_doc, dict):
        raise ValidationError("integrator: must be an object")
    integrator = None
    if integ_doc:
        kwargs = {}
        if "method" in integ_doc:
            kwargs["method"] = integ_doc["method"]
        if "dt_ns" in integ_doc:
            kwargs["dt"] = float(integ_doc["dt_ns"]) * NS
        for key in ("rtol", "atol", "store_every"):
            if key in integ_doc:
                kwargs[key] = integ_doc[key]
        try:
            integrator = IntegratorConfig(**kwargs)
        except (ValidationError, TypeError) as err:
            raise ValidationError(f"integrator: {err}") from err

    outputs = tuple(doc.get("outputs", [n for n in OUTPUT_NAMES
                                        if n != "fidelity" or model == "both"]))
    for out in outputs:
        if out not in OUTPUT_NAMES:
            raise ValidationError(f"outputs: unknown observable {out!r}")
        if out == "fidelity" and model != "both":
            raise ValidationError("outputs: fidelity needs model == 'both'")

    highlight = doc.get("highlight")
    if highlight is not None:
        if not (isinstance(highlight, dict)
                and isinstance(highlight.get("param"), str)
                and isinstance(highlight.get("value"), (int, float))):
            raise ValidationError("highlight: needs {param: str, value: number}")

    return Scenario(name=doc.get("name", name), system=system, drive=drive,
                    model=model, dissipation=dissipation, initial_state=initial,
                    t_end=float(t_end_ns) * NS, samples=samples,
                    integrator=integrator, fock_cutoff=cutoff, outputs=outputs,
                    highlight=highlight, raw=doc)


def load_scenario_document(ref: str) -> tuple[dict, str]:
    """Read a scenario JSON from a path or from the packaged library."""
    p = Path(ref)
    if p.exists():
        with open(p, "r", encoding="utf-8") as fh:
            return json.load(fh), p.stem
    name = ref[:-5] if ref.endswith(".json") else ref
    packaged = resources.files("modrabi").joinpath("data", f"{name}.json")
    if packaged.is_file():
        return json.loads(packaged.read_text(encoding="utf-8")), name
    raise ValidationError(f"scenario {ref!r}: no such file and no packaged scenario")


def load_scenario(ref: str) -> Scenario:
    doc, name = load_scenario_document(ref)
    return parse_scenario(doc, name=name)


def packaged_scenarios() -> list[str]:
    data = resources.files("modrabi").joinpath("data")
    return sorted(p.name[:-5] for p in data.iterdir() if p.name.endswith(".json"))


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------

def _integrator_for(scn: Scenario, side: str) -> IntegratorConfig:
    if scn.integrator is not None:
        return scn.integrator
    if side == "exact":
        # multi-GHz phases: uniform small steps beat adaptivity
        return IntegratorConfig(method="fixed_rk4")
    return IntegratorConfig(method="adaptive_rk45", rtol=1e-10, atol=1e-12)


@dataclass
class SimulationResult:
    scenario: Scenario
    manifest: dict
    header: list
    rows: list
    exact: Trajectory | None
    effective: Trajectory | None


def run_simulation(scn: Scenario) -> SimulationResult:
    space = HilbertSpace(1, scn.fock_cutoff)
    eff = effective_params(scn.system, scn.drive)
    det = detunings(scn.system, scn.drive)
    validity = validity_report(scn.system, scn.drive)
    times = np.linspace(0.0, scn.t_end, scn.samples)
    psi0 = basis_state(space, "g" if scn.initial_state == "vac_g" else "e", 0)
    base_obs = DEFAULT_OBSERVABLES

    exact_traj = None
    eff_traj = None
    if scn.model in ("rotated_exact", "both"):
        H = rotated_hamiltonian(scn.system, scn.drive, space)
        cfg = _integrator_for(scn, "exact")
        if scn.dissipation:
            exact_traj = evolve_master(H, loss_dissipators(scn.system, space),
                                       psi0.density_matrix(), times, cfg,
                                       observables=base_obs,
                                       store_states=(scn.model == "both"))
        else:
            exact_traj = evolve_schrodinger(H, psi0, times, cfg,
                                            observables=base_obs,
                                            store_states=(scn.model == "both"))
    if scn.model in ("effective", "both"):
        H_eff = effective_hamiltonian(eff, space)
        cfg_eff = _integrator_for(scn, "effective")
        if scn.model == "effective" and scn.dissipation:
            eff_traj = evolve_master(H_eff, loss_dissipators(scn.system, space),
                                     psi0.density_matrix(), times, cfg_eff,
                                     observables=base_obs)
        else:
            # in 'both' mode the effective run is the ideal (lossless)
            # reference entering the fidelity
            eff_traj = evolve_schrodinger(H_eff, psi0, times, cfg_eff,
                                          observables=base_obs,
                                          store_states=(scn.model == "both"))

    fid = None
    if scn.model == "both":
        fid = np.array([fidelity(eff_traj.states[i], exact_traj.states[i])
                        for i in range(len(times))])
        exact_traj.observables["fidelity"] = fid

    primary = exact_traj if exact_traj is not None else eff_traj
    header = ["time_s", "sigma_pop", "photon_number"]
    if fid is not None:
        header.append("fidelity")
    header += ["trace", "purity", "top_fock_pop"]
    if scn.model == "both":
        header += ["sigma_pop_eff", "photon_number_eff"]

    rows = []
    obs = primary.observables
    for i, t in enumerate(times):
        row = [t, obs["sigma_pop"][i], obs["photon_number"][i]]
        if fid is not None:
            row.append(fid[i])
        row += [obs["trace"][i], obs["purity"][i], obs["top_fock_pop"][i]]
        if scn.model == "both":
            row += [eff_traj.observables["sigma_pop"][i],
                    eff_traj.observables["photon_number"][i]]
        rows.append(row)

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "scenario": scn.raw,
        "name": scn.name,
        "resolved": {
            "system_rad_s": {"epsilon": scn.system.epsilon, "omega": scn.system.omega,
                             "g": scn.system.g, "kappa": scn.system.kappa,
                             "gamma": scn.system.gamma},
            "drive_rad_s": {"omega1": scn.drive.omega1, "omega2": scn.drive.omega2,
                            "eta1": scn.drive.eta1, "eta2": scn.drive.eta2,
                            "phi1": scn.drive.phi1, "phi2": scn.drive.phi2},
            "detunings_rad_s": {"delta1": det.delta1, "delta2": det.delta2,
                                "delta_minus": det.delta_minus,
                                "delta_plus": det.delta_plus},
            "effective": effective_summary(eff),
            "validity": validity.as_dict(),
            "fock_cutoff": scn.fock_cutoff,
            "initial_state": scn.initial_state,
            "model": scn.model,
            "dissipation": scn.dissipation,
            "grid": {"t_end_s": scn.t_end, "samples": scn.samples},
        },
        "diagnostics": {
            "exact": None if exact_traj is None else exact_traj.diagnostics,
            "effective": None if eff_traj is None else eff_traj.diagnostics,
        },
        "csv_columns": header,
    }
    return SimulationResult(scenario=scn, manifest=manifest, header=header,
                            rows=rows, exact=exact_traj, effective=eff_traj)


def effective_summary(eff) -> dict:
    ratio_r = abs(eff.g_r / eff.omega_eff) if eff.omega_eff else math.inf
    ratio_cr = abs(eff.g_cr / eff.omega_eff) if eff.omega_eff else math.inf
    return {
        "g_r_rad_s": eff.g_r, "g_cr_rad_s": eff.g_cr,
        "omega_eff_rad_s": eff.omega_eff, "epsilon_eff_rad_s": eff.epsilon_eff,
        "theta": eff.theta, "anisotropy": _json_float(eff.anisotropy),
        "delta1_rad_s": eff.delta1, "delta2_rad_s": eff.delta2,
        "g_r_over_omega_eff": _json_float(ratio_r),
        "g_cr_over_omega_eff": _json_float(ratio_cr),
    }


def _json_float(x: float):
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

def apply_sweep_value(doc: dict, param: str, value: float) -> dict:
    if param not in SWEEPABLE:
        raise ValidationError(f"sweep param must be one of {SWEEPABLE}, got {param!r}")
    out = json.loads(json.dumps(doc))  # deep copy
    section, _, field = param.partition(".")
    if param == "fock_cutoff":
        out["fock_cutoff"] = int(round(value))
        return out
    target = out.setdefault(section, {})
    if field.startswith("eta"):
        tone = field[-1]
        target.pop(f"amp{tone}_ghz", None)
        target.pop(f"amp{tone}_mhz", None)
        target[field] = value
    elif field == "t_end_ns":
        target[field] = value
    else:
        target[field] = value
    return out


def _sweep_point(args):
    doc, param, value, name = args
    try:
        scn = parse_scenario(apply_sweep_value(doc, param, value), name=name)
        res = run_simulation(scn)
        obs = (res.exact or res.effective).observables
        times = np.linspace(0.0, scn.t_end, scn.samples)
        return {"value": value, "ok": True,
                "times": times.tolist(),
                "sigma_pop": obs["sigma_pop"].tolist(),
                "photon_number": obs["photon_number"].tolist(),
                "effective": effective_summary(effective_params(scn.system, scn.drive)),
                "diagnostics": (res.exact or res.effective).diagnostics}
    except Exception as err:  # per-point failure is data, not a crash
        return {"value": value, "ok": False,
                "error": f"{type(err).__name__}: {err}"}


def run_sweep(doc: dict, param: str, values: list[float], name: str = "sweep",
              threads: int | None = None) -> tuple[dict, list, list]:
    """Run one scenario per value; returns (manifest, header, rows)."""
    if len(values) < 2:
        raise ValidationError("sweep needs at least 2 points")
    # validate the base document and every point before any compute
    for v in values:
        parse_scenario(apply_sweep_value(doc, param, v), name=name)

    if threads is None:
        threads = int(os.environ.get("MODRABI_THREADS", os.cpu_count() or 1))
    threads = max(1, min(threads, len(values)))
    jobs = [(doc, param, v, name) for v in values]
    if threads == 1:
        points = [_sweep_point(j) for j in jobs]
    else:
        import multiprocessing as mp
        with mp.get_context("fork").Pool(threads) as pool:
            points = pool.map(_sweep_point, jobs)

    header = ["sweep_value", "time_s", "sigma_pop", "photon_number"]
    rows = []
    failures = []
    point_meta = []
    for pt in points:
        if not pt["ok"]:
            failures.append({"value": pt["value"], "error": pt["error"]})
            continue
        for t, sig, pho in zip(pt["times"], pt["sigma_pop"], pt["photon_number"]):
            rows.append([pt["value"], t, sig, pho])
        point_meta.append({"value": pt["value"], "effective": pt["effective"],
                           "diagnostics": pt["diagnostics"]})
    base = parse_scenario(doc, name=name)
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "name": name,
        "sweep": {"param": param, "values": list(values), "threads": threads},
        "scenario": doc,
        "highlight": base.highlight,
        "points": point_meta,
        "failures": failures,
        "status": "complete" if not failures else "partial",
        "csv_columns": header,
    }
    return manifest, header, rows


# ---------------------------------------------------------------------------
# file output
# ---------------------------------------------------------------------------

def _atomic_write(path: Path, writer):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            writer(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))  # shortest round-trip decimal
    return str(value)


def write_csv(path: Path, header: list, rows: list):
    def do(fh):
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    _atomic_write(Path(path), do)


def write_json(path: Path, obj: dict):
    def do(fh):
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _atomic_write(Path(path), do)
