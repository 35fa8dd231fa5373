"""Hamiltonian builders: lab frame, exact rotating frame, effective models.

The rotating frame is the product of two commuting diagonal unitaries: the
first removes the bare energies and the accumulated drive phase
Phi(t) = sum_j eta_j sin(Omega_j t + phi_j) acting on sigma_z, the second
deposits the effective frequencies omega_eff and epsilon_eff.  Written per
basis state |s1..sN, m>, the combined frame is

    U(t) = diag exp(-i [ (omega - omega_eff) m t
                         + (sum_i s_i) ((epsilon - epsilon_eff) t / 2 + Phi(t)) ]).

Because U is diagonal, the transformed Hamiltonian
H~ = U+ H U - i U+ dU/dt is computed analytically: the derivative term
cancels the bare and drive parts exactly and leaves

    H~(t) = omega_eff a+a + epsilon_eff Jz
            + g sum_i [ e^{i(2 chi - mu)} sigma_i+ a
                        + e^{-i(2 chi + mu)} sigma_i- a + h.c. ],

with chi(t) = (epsilon - epsilon_eff) t / 2 + Phi(t) and
mu(t) = (omega - omega_eff) t.  No numerical differentiation of U is ever
involved; at GHz phase scales that cancellation must be exact to survive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ValidationError
from .hilbert import (HilbertSpace, Operator, annihilation,
                      collective_qubit_operator, number_operator,
                      qubit_operator)
from .modulation import (DriveParams, EffectiveParams, SystemParams,
                         effective_params)

MODEL_KINDS = ("qrm", "jc", "ajc", "degenerate_aqrm")
_CONSTRAINT_RTOL = 1e-9


@dataclass(frozen=True)
class TimeDependentHamiltonian:
    """A total mapping t -> Hermitian matrix plus a record of its construction."""

    space: HilbertSpace
    evaluate: Callable[[float], np.ndarray]
    descriptor: dict = field(default_factory=dict)
    is_static: bool = False

    def matrix(self, t: float) -> np.ndarray:
        return self.evaluate(t)

    def operator(self, t: float) -> Operator:
        return Operator(self.space, self.evaluate(t))


@dataclass(frozen=True)
class FramePhases:
    """Per-basis-state phase decomposition of the diagonal frame unitary.

    theta_k(t) = linear_k * t + sz_total_k * Phi(t); U(t) = diag(exp(-i theta)).
    """

    space: HilbertSpace
    linear: np.ndarray     # rad/s per basis state
    sz_total: np.ndarray   # sum of sigma_z eigenvalues per basis state
    drive: DriveParams

    def drive_phase(self, t: float) -> float:
        d = self.drive
        return (d.eta1 * math.sin(d.omega1 * t + d.phi1)
                + d.eta2 * math.sin(d.omega2 * t + d.phi2))

    def drive_phase_rate(self, t: float) -> float:
        d = self.drive
        return (d.eta1 * d.omega1 * math.cos(d.omega1 * t + d.phi1)
                + d.eta2 * d.omega2 * math.cos(d.omega2 * t + d.phi2))

    def phases(self, t: float) -> np.ndarray:
        return self.linear * t + self.sz_total * self.drive_phase(t)

    def unitary_diag(self, t: float) -> np.ndarray:
        return np.exp(-1j * self.phases(t))

    def unitary(self, t: float) -> Operator:
        return Operator(self.space, np.diag(self.unitary_diag(t)))


def frame_phases(sys: SystemParams, drive: DriveParams,
                 space: HilbertSpace) -> FramePhases:
    eff = effective_params(sys, drive)
    fock = np.arange(space.fock_cutoff, dtype=float)
    fock_part = np.tile(fock, space.qubit_dim)
    sz_total = 2.0 * np.real(np.diag(
        collective_qubit_operator(space, "jz").matrix)) if space.n_qubits else \
        np.zeros(space.dim)
    linear = (sys.omega - eff.omega_eff) * fock_part \
        + 0.5 * (sys.epsilon - eff.epsilon_eff) * sz_total
    return FramePhases(space=space, linear=linear, sz_total=sz_total, drive=drive)


def _coupling_matrices(space: HilbertSpace):
    a = annihilation(space).matrix
    sp_a = sum(qubit_operator(space, k, "sp").matrix @ a
               for k in range(space.n_qubits))
    sm_a = sum(qubit_operator(space, k, "sm").matrix @ a
               for k in range(space.n_qubits))
    return sp_a, sm_a


class _ScatterSum:
    """static + sum_k c_k M_k evaluated by copying static and scattering the
    few nonzeros of each M_k; the coupling matrices are band-sparse, so this
    beats dense scaled adds by an order of magnitude in the stepper."""

    def __init__(self, static: np.ndarray, mats: list[np.ndarray]):
        self.static = static
        self.parts = []
        for m in mats:
            rows, cols = np.nonzero(m)
            self.parts.append((rows, cols, m[rows, cols]))

    def build(self, coeffs) -> np.ndarray:
        out = self.static.copy()
        for (rows, cols, vals), c in zip(self.parts, coeffs):
            out[rows, cols] += c * vals
        return out


def _suggest_dt(sys: SystemParams, drive: DriveParams) -> float:
    w_max = max(sys.epsilon + sys.omega, drive.omega1 + drive.omega2)
    return 2.0 * math.pi / w_max / 40.0


def lab_hamiltonian(sys: SystemParams, drive: DriveParams,
                    space: HilbertSpace) -> TimeDependentHamiltonian:
    """Bare system plus interaction plus the sigma_z frequency modulation."""
    if space.n_qubits < 1:
        raise ValidationError("lab Hamiltonian needs at least one qubit")
    num = number_operator(space).matrix
    a = annihilation(space).matrix
    x = a + a.conj().T
    sz = sum(qubit_operator(space, k, "sz").matrix for k in range(space.n_qubits))
    sx = sum(qubit_operator(space, k, "sx").matrix for k in range(space.n_qubits))
    static = sys.omega * num + 0.5 * sys.epsilon * sz + sys.g * (x @ sx)
    builder = _ScatterSum(static, [sz])
    d = drive

    def evaluate(t: float) -> np.ndarray:
        rate = (d.eta1 * d.omega1 * math.cos(d.omega1 * t + d.phi1)
                + d.eta2 * d.omega2 * math.cos(d.omega2 * t + d.phi2))
        return builder.build((rate,))

    return TimeDependentHamiltonian(
        space=space, evaluate=evaluate,
        descriptor={"kind": "lab", "system": sys, "drive": drive,
                    "suggested_dt": _suggest_dt(sys, drive)})


def rotated_hamiltonian(sys: SystemParams, drive: DriveParams,
                        space: HilbertSpace) -> TimeDependentHamiltonian:
    """Exact frame-transformed Hamiltonian; no sideband series truncation."""
    if space.n_qubits < 1:
        raise ValidationError("rotated Hamiltonian needs at least one qubit")
    eff = effective_params(sys, drive)
    num = number_operator(space).matrix
    jz2 = sum(qubit_operator(space, k, "sz").matrix for k in range(space.n_qubits))
    static = eff.omega_eff * num + 0.5 * eff.epsilon_eff * jz2
    sp_a, sm_a = _coupling_matrices(space)
    builder = _ScatterSum(static, [sp_a, sp_a.conj().T, sm_a, sm_a.conj().T])
    g = sys.g
    d_eps = sys.epsilon - eff.epsilon_eff
    d_om = sys.omega - eff.omega_eff
    d = drive

    def evaluate(t: float) -> np.ndarray:
        phi_t = (d.eta1 * math.sin(d.omega1 * t + d.phi1)
                 + d.eta2 * math.sin(d.omega2 * t + d.phi2))
        two_chi = d_eps * t + 2.0 * phi_t
        mu = d_om * t
        c_rot = g * complex(math.cos(two_chi - mu), math.sin(two_chi - mu))
        c_cnt = g * complex(math.cos(two_chi + mu), -math.sin(two_chi + mu))
        return builder.build((c_rot, c_rot.conjugate(), c_cnt, c_cnt.conjugate()))

    return TimeDependentHamiltonian(
        space=space, evaluate=evaluate,
        descriptor={"kind": "rotated_exact", "system": sys, "drive": drive,
                    "effective": eff, "suggested_dt": _suggest_dt(sys, drive)})


def effective_hamiltonian(eff: EffectiveParams,
                          space: HilbertSpace) -> TimeDependentHamiltonian:
    """Constant anisotropic Rabi Hamiltonian with explicit drive phases."""
    num = number_operator(space).matrix
    jz2 = sum(qubit_operator(space, k, "sz").matrix for k in range(space.n_qubits))
    sp_a, sm_a = _coupling_matrices(space)
    rot = eff.g_r * np.exp(-1j * eff.phi1) * sp_a
    cnt = eff.g_cr * np.exp(1j * eff.phi2) * sm_a
    h0 = (eff.omega_eff * num + 0.5 * eff.epsilon_eff * jz2
          + rot + rot.conj().T + cnt + cnt.conj().T)

    return TimeDependentHamiltonian(
        space=space, evaluate=lambda t: h0,
        descriptor={"kind": "effective", "effective": eff,
                    "suggested_dt": _static_dt(h0)},
        is_static=True)


def _static_dt(h: np.ndarray) -> float:
    scale = float(np.linalg.norm(h, ord=2)) if h.size else 1.0
    if scale == 0.0:
        return math.inf
    return 2.0 * math.pi / scale / 40.0


def _phase_defect(phi: float) -> float:
    return abs(math.remainder(phi, 2.0 * math.pi))


def model(kind: str, eff: EffectiveParams,
          space: HilbertSpace) -> TimeDependentHamiltonian:
    """Specialized effective model; validates instead of silently projecting.

    kind in {'qrm', 'jc', 'ajc', 'degenerate_aqrm'}.  The supplied parameters
    must actually realize the specialization (relative defect below 1e-9), so
    a scenario cannot claim a model its drives do not produce.
    """
    kind = kind.lower()
    if kind not in MODEL_KINDS:
        raise ValidationError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")
    scale = max(abs(eff.g_r), abs(eff.g_cr))
    tol = _CONSTRAINT_RTOL * scale

    def need(ok: bool, msg: str):
        if not ok:
            raise ValidationError(f"model '{kind}' constraint violated: {msg}")

    num = number_operator(space).matrix
    jz2 = sum(qubit_operator(space, k, "sz").matrix for k in range(space.n_qubits))
    sp_a, sm_a = _coupling_matrices(space)
    rt = sp_a + sp_a.conj().T
    crt = sm_a + sm_a.conj().T

    if kind == "qrm":
        need(abs(eff.g_r - eff.g_cr) <= tol,
             f"|g_r - g_cr| = {abs(eff.g_r - eff.g_cr):.3e} exceeds {tol:.3e}")
        need(_phase_defect(eff.phi1) <= _CONSTRAINT_RTOL
             and _phase_defect(eff.phi2) <= _CONSTRAINT_RTOL,
             "drive phases must vanish (mod 2 pi)")
        h0 = eff.omega_eff * num + 0.5 * eff.epsilon_eff * jz2 + eff.g_r * (rt + crt)
    elif kind == "jc":
        need(abs(eff.g_cr) <= tol, f"|g_cr| = {abs(eff.g_cr):.3e} exceeds {tol:.3e}")
        need(_phase_defect(eff.phi1) <= _CONSTRAINT_RTOL,
             "rotating-term phase must vanish (mod 2 pi)")
        h0 = eff.omega_eff * num + 0.5 * eff.epsilon_eff * jz2 + eff.g_r * rt
    elif kind == "ajc":
        need(abs(eff.g_r) <= tol, f"|g_r| = {abs(eff.g_r):.3e} exceeds {tol:.3e}")
        need(_phase_defect(eff.phi2) <= _CONSTRAINT_RTOL,
             "counter-rotating-term phase must vanish (mod 2 pi)")
        h0 = eff.omega_eff * num + 0.5 * eff.epsilon_eff * jz2 + eff.g_cr * crt
    else:  # degenerate_aqrm
        need(abs(eff.omega_eff) <= tol and abs(eff.epsilon_eff) <= tol,
             f"effective frequencies ({eff.omega_eff:.3e}, {eff.epsilon_eff:.3e}) "
             f"must vanish relative to the couplings")
        need(_phase_defect(eff.phi1) <= _CONSTRAINT_RTOL
             and _phase_defect(eff.phi2) <= _CONSTRAINT_RTOL,
             "drive phases must vanish (mod 2 pi)")
        h0 = eff.g_r * rt + eff.g_cr * crt

    return TimeDependentHamiltonian(
        space=space, evaluate=lambda t: h0,
        descriptor={"kind": kind, "effective": eff, "suggested_dt": _static_dt(h0)},
        is_static=True)


def dicke_hamiltonian(eff: EffectiveParams, space: HilbertSpace,
                      interaction_picture: bool = True) -> TimeDependentHamiltonian:
    """Collective-qubit generalization with J+- in place of sigma+-.

    All qubits share the transition frequency and see the same two-tone
    drive.  With interaction_picture=True the effective frequencies appear as
    explicit phase factors exp(-i(delta1 t + phi1)) on a J+ and
    exp(-i(delta2 t - phi2)) on a J-; otherwise they stay as static
    omega_eff a+a + epsilon_eff Jz terms.
    """
    if space.n_qubits < 1:
        raise ValidationError("Dicke Hamiltonian needs at least one qubit")
    a = annihilation(space).matrix
    jp_a = collective_qubit_operator(space, "jp").matrix @ a
    jm_a = collective_qubit_operator(space, "jm").matrix @ a
    d1, d2 = eff.delta1, eff.delta2
    g_r, g_cr = eff.g_r, eff.g_cr
    phi1, phi2 = eff.phi1, eff.phi2

    if interaction_picture:
        builder = _ScatterSum(np.zeros((space.dim, space.dim), dtype=complex),
                              [jp_a, jp_a.conj().T, jm_a, jm_a.conj().T])

        def evaluate(t: float) -> np.ndarray:
            c1 = g_r * complex(math.cos(d1 * t + phi1), -math.sin(d1 * t + phi1))
            c2 = g_cr * complex(math.cos(d2 * t - phi2), -math.sin(d2 * t - phi2))
            return builder.build((c1, c1.conjugate(), c2, c2.conjugate()))

        static_flag = (d1 == 0.0 and d2 == 0.0)
    else:
        num = number_operator(space).matrix
        jz = collective_qubit_operator(space, "jz").matrix
        c1 = g_r * np.exp(-1j * phi1)
        c2 = g_cr * np.exp(1j * phi2)
        h0 = (eff.omega_eff * num + eff.epsilon_eff * jz
              + c1 * jp_a + np.conj(c1) * jp_a.conj().T
              + c2 * jm_a + np.conj(c2) * jm_a.conj().T)

        def evaluate(t: float) -> np.ndarray:
            return h0

        static_flag = True

    scale = max(abs(g_r), abs(g_cr), abs(d1), abs(d2), 1e-300)
    return TimeDependentHamiltonian(
        space=space, evaluate=evaluate,
        descriptor={"kind": "dicke", "effective": eff,
                    "interaction_picture": interaction_picture,
                    "suggested_dt": 2.0 * math.pi / scale / 40.0},
        is_static=static_flag)


def jx_field_hamiltonian(g_eff: float, omega_eff: float,
                         space: HilbertSpace) -> TimeDependentHamiltonian:
    """Balanced degenerate collective model g (a+ e^{i w t} + a e^{-i w t}) Jx."""
    if space.n_qubits < 1:
        raise ValidationError("collective field Hamiltonian needs at least one qubit")
    jx = collective_qubit_operator(space, "jx").matrix
    jx_a = jx @ annihilation(space).matrix
    builder = _ScatterSum(np.zeros((space.dim, space.dim), dtype=complex),
                          [jx_a, jx_a.conj().T])

    def evaluate(t: float) -> np.ndarray:
        c = g_eff * complex(math.cos(omega_eff * t), -math.sin(omega_eff * t))
        return builder.build((c, c.conjugate()))

    scale = max(abs(g_eff), abs(omega_eff), 1e-300)
    return TimeDependentHamiltonian(
        space=space, evaluate=evaluate,
        descriptor={"kind": "jx_field", "g_eff": g_eff, "omega_eff": omega_eff,
                    "suggested_dt": 2.0 * math.pi / scale / 40.0},
        is_static=(omega_eff == 0.0))
