"""Command-line front end.

Subcommands: simulate, design, sweep, applications (cat | gate), validate.
Exit codes: 0 success, 2 validation failure, 3 numerical failure,
4 unreachable design target.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .applications import (cat_evolution, cnot_equivalence_check,
                           conditional_cat, conditional_probability,
                           cross_parity_population, entangling_power,
                           gate_at_period, magnus_phase,
                           theta_from_coupling_ratio)
from .errors import NumericsError, UnreachableTargetError, ValidationError
from .hilbert import HilbertSpace
from .modulation import (SystemParams, amplitudes_for_coupling, detunings,
                         drive_for_detunings, effective_params,
                         solve_amplitudes, validity_report)
from .scenarios import (SCHEMA_VERSION, effective_summary, load_scenario,
                        load_scenario_document, packaged_scenarios,
                        parse_scenario, run_simulation, run_sweep, write_csv,
                        write_json)

TWO_PI = 2.0 * math.pi
GHZ = TWO_PI * 1e9
MHZ = TWO_PI * 1e6
NS = 1e-9


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="modrabi",
        description="Two-tone frequency-modulation simulator for tunable "
                    "anisotropic Rabi models.")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one scenario and write CSV + manifest")
    sim.add_argument("scenario", help="scenario JSON path or packaged name "
                     f"({', '.join(packaged_scenarios())})")
    sim.add_argument("-o", "--output", default="out", help="output directory")

    des = sub.add_parser("design", help="solve drive settings for a target model")
    des.add_argument("--lambda", dest="anisotropy", type=float, required=True,
                     help="target coupling ratio g_cr/g_r (inf allowed)")
    des.add_argument("--gratio", type=float, default=None,
                     help="target |g_r|/omega_eff")
    des.add_argument("--gr-mhz", type=float, default=None,
                     help="target |g_r|/2pi in MHz (solved over the amplitude family)")
    des.add_argument("--delta1-hz", type=float, default=None,
                     help="red-sideband detuning delta1/2pi in Hz (default 0)")
    des.add_argument("--delta1-mhz", type=float, default=None,
                     help="same, in MHz")
    des.add_argument("--epsilon-ghz", type=float, default=5.4)
    des.add_argument("--omega-ghz", type=float, default=2.2)
    des.add_argument("--g-mhz", type=float, default=70.0)
    des.add_argument("--kappa-mhz", type=float, default=0.05)
    des.add_argument("--gamma-mhz", type=float, default=0.012)
    des.add_argument("-o", "--output", default=None,
                     help="also write design.json into this directory")

    swp = sub.add_parser("sweep", help="repeat a scenario over one parameter")
    swp.add_argument("scenario")
    swp.add_argument("--param", required=True, help="e.g. drive.eta2")
    swp.add_argument("--from", dest="start", type=float, required=True)
    swp.add_argument("--to", dest="stop", type=float, required=True)
    swp.add_argument("--points", type=int, required=True)
    swp.add_argument("--threads", type=int, default=None,
                     help="worker processes (default: MODRABI_THREADS or CPU count)")
    swp.add_argument("-o", "--output", default="out")

    app = sub.add_parser("applications", help="closed-form protocol outputs")
    app_sub = app.add_subparsers(dest="which", required=True)

    cat = app_sub.add_parser("cat", help="cat-state preparation data")
    cat.add_argument("--g-ratio", type=float, required=True,
                     help="effective coupling over effective frequency")
    cat.add_argument("--omega-mhz", type=float, default=35.03,
                     help="effective frequency omega_eff/2pi in MHz")
    cat.add_argument("--time-ns", type=float, default=None,
                     help="preparation time (default: half period, max displacement)")
    cat.add_argument("--samples", type=int, default=201)
    cat.add_argument("--fock-cutoff", type=int, default=40)
    cat.add_argument("-o", "--output", default="out")

    gat = app_sub.add_parser("gate", help="two-qubit gate at one full period")
    gat.add_argument("--g-ratio", type=float, default=0.25)
    gat.add_argument("-o", "--output", default="out")

    val = sub.add_parser("validate", help="check a scenario file and report")
    val.add_argument("scenario")

    return p


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    scn = load_scenario(args.scenario)
    res = run_simulation(scn)
    out = Path(args.output)
    write_json(out / "manifest.json", res.manifest)
    write_csv(out / "timeseries.csv", res.header, res.rows)
    ratio = res.manifest["resolved"]["effective"]["g_r_over_omega_eff"]
    print(f"{scn.name}: wrote {out / 'timeseries.csv'} "
          f"({len(res.rows)} rows), |g_r/omega_eff| = {ratio}")
    return 0


def cmd_design(args) -> int:
    sys_params = SystemParams(epsilon=args.epsilon_ghz * GHZ,
                              omega=args.omega_ghz * GHZ,
                              g=args.g_mhz * MHZ,
                              kappa=args.kappa_mhz * MHZ,
                              gamma=args.gamma_mhz * MHZ)
    lam = args.anisotropy
    if args.gr_mhz is not None:
        eta1, eta2 = amplitudes_for_coupling(args.gr_mhz * MHZ, lam, sys_params.g)
    else:
        eta1, eta2 = solve_amplitudes(lam)
    if args.delta1_hz is not None and args.delta1_mhz is not None:
        raise ValidationError("give --delta1-hz or --delta1-mhz, not both")
    if args.delta1_hz is not None:
        delta1 = args.delta1_hz * TWO_PI
    elif args.delta1_mhz is not None:
        delta1 = args.delta1_mhz * MHZ
    else:
        delta1 = 0.0
    probe = drive_for_detunings(delta1, delta1, sys_params, eta1, eta2)
    g_r_abs = abs(effective_params(sys_params, probe).g_r)
    if args.gratio is not None:
        if args.gratio <= 0:
            raise UnreachableTargetError("--gratio must be > 0")
        if g_r_abs == 0.0:
            raise UnreachableTargetError(
                "g_r vanishes for this anisotropy; |g_r|/omega_eff is unreachable")
        omega_eff = g_r_abs / args.gratio
        delta2 = 2.0 * omega_eff - delta1
    else:
        delta2 = delta1
    drive = drive_for_detunings(delta1, delta2, sys_params, eta1, eta2)
    eff = effective_params(sys_params, drive)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "targets": {"anisotropy": _inf(lam), "g_r_over_omega_eff": args.gratio,
                    "g_r_mhz": args.gr_mhz, "delta1_rad_s": delta1},
        "drive": {
            "omega1_ghz": drive.omega1 / GHZ, "omega2_ghz": drive.omega2 / GHZ,
            "eta1": drive.eta1, "eta2": drive.eta2,
            "amp1_ghz": drive.eta1 * drive.omega1 / GHZ,
            "amp2_ghz": drive.eta2 * drive.omega2 / GHZ,
            "phi1": drive.phi1, "phi2": drive.phi2,
        },
        "effective": effective_summary(eff),
        "validity": validity_report(sys_params, drive).as_dict(),
    }
    text = json.dumps(doc, indent=2, sort_keys=True)
    print(text)
    if args.output is not None:
        write_json(Path(args.output) / "design.json", doc)
    return 0


def _inf(x):
    if x is None or (not math.isinf(x) and not math.isnan(x)):
        return x
    return "inf" if x > 0 else "nan"


def cmd_sweep(args) -> int:
    doc, name = load_scenario_document(args.scenario)
    if args.points < 2:
        raise ValidationError("--points must be >= 2")
    values = np.linspace(args.start, args.stop, args.points).tolist()
    manifest, header, rows = run_sweep(doc, args.param, values,
                                       name=f"{name}_{args.param.replace('.', '_')}",
                                       threads=args.threads)
    out = Path(args.output)
    write_json(out / "manifest.json", manifest)
    write_csv(out / "sweep.csv", header, rows)
    print(f"sweep {args.param}: {args.points} points, status {manifest['status']}, "
          f"wrote {out / 'sweep.csv'}")
    if manifest["status"] != "complete":
        for failure in manifest["failures"]:
            print(f"  failed at {failure['value']}: {failure['error']}",
                  file=sys.stderr)
        return 3
    return 0


def cmd_applications_cat(args) -> int:
    omega_eff = args.omega_mhz * MHZ
    g_eff = args.g_ratio * omega_eff
    t_end = args.time_ns * NS if args.time_ns is not None else math.pi / omega_eff
    space = HilbertSpace(1, args.fock_cutoff)
    times = np.linspace(0.0, t_end, args.samples)
    rows = []
    for t in times:
        ph = magnus_phase(g_eff, omega_eff, float(t))
        rows.append([float(t), ph.xi.real, ph.xi.imag, abs(ph.xi), ph.phi])
    psi = cat_evolution(g_eff, omega_eff, t_end, space)
    cat_g, p_g = conditional_cat(psi, "g")
    cat_e, p_e = conditional_cat(psi, "e")
    xi_end = magnus_phase(g_eff, omega_eff, t_end).xi
    fock_rows = [[n, float(np.abs(cat_g.state.amplitudes[n]) ** 2),
                  float(np.abs(cat_e.state.amplitudes[n]) ** 2)]
                 for n in range(args.fock_cutoff)]
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "params": {"g_ratio": args.g_ratio, "omega_eff_rad_s": omega_eff,
                   "g_eff_rad_s": g_eff, "t_end_s": t_end,
                   "fock_cutoff": args.fock_cutoff},
        "displacement": {"xi_re": xi_end.real, "xi_im": xi_end.imag,
                         "xi_abs": abs(xi_end),
                         "xi_abs_max_possible": 2.0 * abs(args.g_ratio)},
        "conditional": {
            "p_g_measured": p_g, "p_e_measured": p_e,
            "p_g_closed_form": conditional_probability(xi_end, "g"),
            "p_e_closed_form": conditional_probability(xi_end, "e"),
            "even_cat_cross_parity": cross_parity_population(cat_g),
            "odd_cat_cross_parity": cross_parity_population(cat_e),
        },
        "csv_files": {"cat_path.csv": ["time_s", "xi_re", "xi_im", "xi_abs", "phase"],
                      "cat_fock.csv": ["n", "pop_even", "pop_odd"]},
    }
    out = Path(args.output)
    write_json(out / "manifest.json", manifest)
    write_csv(out / "cat_path.csv", ["time_s", "xi_re", "xi_im", "xi_abs", "phase"], rows)
    write_csv(out / "cat_fock.csv", ["n", "pop_even", "pop_odd"], fock_rows)
    print(f"cat: |xi| = {abs(xi_end)} at t = {t_end} s, P(g) = {p_g}, "
          f"wrote {out / 'cat_path.csv'}")
    return 0


def cmd_applications_gate(args) -> int:
    gate = gate_at_period(args.g_ratio, 1.0)
    theta = theta_from_coupling_ratio(args.g_ratio)
    power = entangling_power(theta)
    check = cnot_equivalence_check(gate)
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "params": {"g_ratio": args.g_ratio, "theta": theta},
        "gate_re": np.real(gate).tolist(),
        "gate_im": np.imag(gate).tolist(),
        "entangling_power": power,
        "cnot_equivalence": {
            "equivalent": check.equivalent,
            "residual": check.residual,
            "ordering": check.ordering,
            "residuals": check.residuals,
        },
    }
    out = Path(args.output)
    write_json(out / "manifest.json", manifest)
    print(f"gate: theta = {theta}, entangling power = {power}, "
          f"CNOT residual = {check.residual}")
    return 0


def cmd_validate(args) -> int:
    doc, name = load_scenario_document(args.scenario)
    scn = parse_scenario(doc, name=name)
    det = detunings(scn.system, scn.drive)
    eff = effective_params(scn.system, scn.drive)
    report = {
        "schema_version": SCHEMA_VERSION,
        "name": scn.name,
        "valid": True,
        "detunings_rad_s": {"delta1": det.delta1, "delta2": det.delta2},
        "effective": effective_summary(eff),
        "validity": validity_report(scn.system, scn.drive).as_dict(),
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return cmd_simulate(args)
        if args.command == "design":
            return cmd_design(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        if args.command == "applications":
            if args.which == "cat":
                return cmd_applications_cat(args)
            return cmd_applications_gate(args)
        if args.command == "validate":
            return cmd_validate(args)
        parser.error(f"unknown command {args.command!r}")
    except ValidationError as err:
        print(f"validation error: {err}", file=sys.stderr)
        return 2
    except NumericsError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        if err.diagnostics:
            print(json.dumps(err.diagnostics, indent=2, default=str), file=sys.stderr)
        return 3
    except UnreachableTargetError as err:
        print(f"unreachable target: {err}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
