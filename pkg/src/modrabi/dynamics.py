"""Time evolution: Schrodinger and Lindblad propagation, observables, periods.

Density matrices are integrated in matrix form; at the dimensions used here
(<= ~160) the right-hand side is a couple of dense multiplies, which beats a
vectorized superoperator both in memory and in cache behavior.  The Lindblad
right-hand side is

    d rho / dt = K rho + rho K+  +  sum_j r_j L_j rho L_j+,
    K = -i H(t) - sum_j (r_j / 2) L_j+ L_j,

with the (rate/2)(2 L rho L+ - rho L+L - L+L rho) normalization, so a pure
decay run gives <n>(t) = e^{-gamma t} exactly.  Two structural fast paths
matter in the hot loop: diagonal L+L damping folds into the generator K,
and jump operators that factor over the tensor structure (qubit decay
sigma- and the resonator ladder a both do) apply as block-sliced outer
products instead of two more matrix products.

Hermiticity is restored by rho <- (rho + rho+)/2 at stored steps only, never
inside the stepper, so an integrator bug cannot hide behind symmetrization.
Positivity is monitored, not projected: a violation beyond the floor aborts,
because it is evidence of a cutoff or step-size misconfiguration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import NumericsError, ValidationError
from .hamiltonians import TimeDependentHamiltonian
from .hilbert import (DensityMatrix, HilbertSpace, Operator, PureState,
                      annihilation, qubit_operator)
from .modulation import SystemParams

METHODS = ("fixed_rk4", "adaptive_rk45")

STATE_NORM_TOL = 1e-6       # wrapping tolerance for stored trajectory states
POSITIVITY_FLOOR = -1e-6
CUTOFF_POP_LIMIT = 1e-6


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "adaptive_rk45"
    dt: float | None = None          # fixed-step target; default from the Hamiltonian
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = math.inf
    store_every: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValidationError(f"integrator method must be one of {METHODS}")
        if self.dt is not None and self.dt <= 0:
            raise ValidationError("dt must be > 0")
        if self.rtol <= 0 or self.atol <= 0:
            raise ValidationError("rtol and atol must be > 0")
        if self.store_every < 1:
            raise ValidationError("store_every must be >= 1")


@dataclass(frozen=True)
class Dissipator:
    """Lindblad channel: jump operator and rate."""

    jump: Operator
    rate: float

    def __post_init__(self):
        if self.rate < 0:
            raise ValidationError("dissipator rate must be >= 0")


def loss_dissipators(sys: SystemParams, space: HilbertSpace) -> list[Dissipator]:
    """Qubit decay (sigma-, rate kappa) and resonator loss (a, rate gamma)."""
    out = []
    if sys.kappa > 0:
        out.append(Dissipator(qubit_operator(space, 0, "sm"), sys.kappa))
    if sys.gamma > 0:
        out.append(Dissipator(annihilation(space), sys.gamma))
    return out


@dataclass
class Trajectory:
    """Stored grid, per-step states, and named real observable series."""

    times: np.ndarray
    observables: dict[str, np.ndarray]
    states: list | None = None
    diagnostics: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# observables
# ---------------------------------------------------------------------------

class _ObservableSet:
    def __init__(self, space: HilbertSpace, names: Sequence[str]):
        self.space = space
        self.names = list(names)
        self.mats: dict[str, np.ndarray] = {}
        top = space.fock_cutoff - 1
        self.top_idx = np.arange(space.qubit_dim) * space.fock_cutoff + top
        for name in self.names:
            if name == "sigma_pop":
                sp = qubit_operator(space, 0, "sp").matrix
                self.mats[name] = sp @ sp.conj().T
            elif name == "photon_number":
                a = annihilation(space).matrix
                self.mats[name] = a.conj().T @ a
            elif name in ("trace", "purity", "top_fock_pop"):
                pass
            else:
                raise ValidationError(f"unknown observable {name!r}")

    def from_vector(self, psi: np.ndarray) -> dict[str, float]:
        out = {}
        for name in self.names:
            if name == "trace":
                out[name] = float(np.real(np.vdot(psi, psi)))
            elif name == "purity":
                out[name] = float(np.real(np.vdot(psi, psi)) ** 2)
            elif name == "top_fock_pop":
                out[name] = float(np.sum(np.abs(psi[self.top_idx]) ** 2))
            else:
                out[name] = float(np.real(np.vdot(psi, self.mats[name] @ psi)))
        return out

    def from_matrix(self, rho: np.ndarray) -> dict[str, float]:
        out = {}
        diag = np.real(np.diagonal(rho))
        for name in self.names:
            if name == "trace":
                out[name] = float(diag.sum())
            elif name == "purity":
                # Tr(rho^2) = sum |rho_ij|^2 for the symmetrized matrix
                out[name] = float(np.real(np.vdot(rho, rho)))
            elif name == "top_fock_pop":
                out[name] = float(diag[self.top_idx].sum())
            else:
                out[name] = float(np.real(np.trace(self.mats[name] @ rho)))
        return out


DEFAULT_OBSERVABLES = ("sigma_pop", "photon_number", "trace", "purity", "top_fock_pop")


# ---------------------------------------------------------------------------
# steppers
# ---------------------------------------------------------------------------

def _rk4_span(rhs, t0: float, y0: np.ndarray, t1: float, dt_target: float) -> np.ndarray:
    """Fixed-step classical RK4 from t0 to t1 with step <= dt_target."""
    span = t1 - t0
    if span == 0.0:
        return y0
    nsub = max(1, int(math.ceil(span / dt_target)))
    h = span / nsub
    y = y0
    for k in range(nsub):
        t = t0 + k * h
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * h, y + (0.5 * h) * k1)
        k3 = rhs(t + 0.5 * h, y + (0.5 * h) * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    return y


class _MatrixRk4:
    """Classical RK4 on density matrices with preallocated stage buffers.

    The right-hand side is -i (K rho - (K rho)+) plus the jump terms, exact
    for Hermitian rho, which every stage of the flow preserves.
    """

    def __init__(self, generator, jumps, dim: int):
        self.generator = generator
        self.jumps = jumps
        self.m = np.empty((dim, dim), dtype=complex)
        self.k1 = np.empty_like(self.m)
        self.k2 = np.empty_like(self.m)
        self.k3 = np.empty_like(self.m)
        self.k4 = np.empty_like(self.m)
        self.tmp = np.empty_like(self.m)

    def rhs_into(self, t: float, rho: np.ndarray, out: np.ndarray):
        np.dot(self.generator(t), rho, out=self.m)
        np.conjugate(self.m.T, out=out)
        out -= self.m
        out *= 1j
        for j in self.jumps:
            j.add_to(out, rho)

    def advance(self, t0: float, y: np.ndarray, t1: float, dt_target: float):
        """Step y from t0 to t1 in place."""
        span = t1 - t0
        if span == 0.0:
            return
        nsub = max(1, int(math.ceil(span / dt_target)))
        h = span / nsub
        k1, k2, k3, k4, tmp = self.k1, self.k2, self.k3, self.k4, self.tmp
        for k in range(nsub):
            t = t0 + k * h
            self.rhs_into(t, y, k1)
            np.multiply(k1, 0.5 * h, out=tmp)
            tmp += y
            self.rhs_into(t + 0.5 * h, tmp, k2)
            np.multiply(k2, 0.5 * h, out=tmp)
            tmp += y
            self.rhs_into(t + 0.5 * h, tmp, k3)
            np.multiply(k3, h, out=tmp)
            tmp += y
            self.rhs_into(t + h, tmp, k4)
            k2 += k3
            k2 *= 2.0
            k1 += k4
            k1 += k2
            k1 *= h / 6.0
            y += k1


def _pick_dt(cfg: IntegratorConfig, H: TimeDependentHamiltonian) -> float:
    if cfg.dt is not None:
        return cfg.dt
    dt = H.descriptor.get("suggested_dt")
    if dt is None or not math.isfinite(dt):
        raise ValidationError("fixed_rk4 needs an explicit dt for this Hamiltonian")
    return dt


def _check_grid(times: np.ndarray) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise ValidationError("time grid must contain at least two points")
    if np.any(np.diff(times) <= 0):
        raise ValidationError("time grid must be strictly increasing")
    return times


# ---------------------------------------------------------------------------
# Schrodinger propagation
# ---------------------------------------------------------------------------

def evolve_schrodinger(H: TimeDependentHamiltonian, psi0: PureState,
                       times: np.ndarray, cfg: IntegratorConfig | None = None,
                       observables: Sequence[str] = DEFAULT_OBSERVABLES,
                       store_states: bool = True) -> Trajectory:
    """Propagate |psi> under H; norm is a monitored quality metric, not enforced."""
    if psi0.space != H.space:
        raise ValidationError("initial state and Hamiltonian spaces differ")
    cfg = cfg or IntegratorConfig()
    times = _check_grid(times)
    obs = _ObservableSet(H.space, observables)
    evaluate = H.evaluate

    def rhs(t, y):
        return -1j * (evaluate(t) @ y)

    stored_t = times[::cfg.store_every]
    vectors = _propagate(rhs, psi0.amplitudes.copy(), times, cfg, H)
    vectors = vectors[::cfg.store_every]

    series = {name: np.empty(len(stored_t)) for name in obs.names}
    norm_drift = 0.0
    for i, v in enumerate(vectors):
        vals = obs.from_vector(v)
        for name, val in vals.items():
            series[name][i] = val
        norm_drift = max(norm_drift, abs(np.linalg.norm(v) - 1.0))
    top = series.get("top_fock_pop")
    cutoff_ok = bool(np.all(top < CUTOFF_POP_LIMIT)) if top is not None else None

    states = None
    if store_states:
        states = [PureState(H.space, v / np.linalg.norm(v), norm_tol=STATE_NORM_TOL)
                  for v in vectors]
    return Trajectory(times=stored_t, observables=series, states=states,
                      diagnostics={"norm_drift": norm_drift, "cutoff_ok": cutoff_ok,
                                   "method": cfg.method})


def _propagate(rhs, y0: np.ndarray, times: np.ndarray,
               cfg: IntegratorConfig, H: TimeDependentHamiltonian) -> list[np.ndarray]:
    if cfg.method == "fixed_rk4":
        dt = _pick_dt(cfg, H)
        out = [y0]
        y = y0
        for t0, t1 in zip(times[:-1], times[1:]):
            y = _rk4_span(rhs, t0, y, t1, dt)
            out.append(y)
        return out
    # adaptive_rk45
    sol = solve_ivp(rhs, (times[0], times[-1]), y0, method="RK45",
                    t_eval=times, rtol=cfg.rtol, atol=cfg.atol,
                    max_step=cfg.max_step)
    if not sol.success:
        raise NumericsError(f"adaptive integration failed: {sol.message}")
    return [sol.y[:, k] for k in range(sol.y.shape[1])]


# ---------------------------------------------------------------------------
# Lindblad propagation
# ---------------------------------------------------------------------------

class _JumpApplier:
    """r * L rho L+ with structural fast paths for this model's channels.

    Qubit channels factor as K (x) I_fock and resonator ladders as
    I_qubits (x) B with a single off-diagonal band; both apply as block
    slices on the (Q, N, Q, N) view of rho instead of two more dense
    products.  Anything else falls back to matrix multiplication.
    """

    def __init__(self, L: np.ndarray, rate: float, qubit_dim: int, fock: int):
        self.rate = rate
        self.mode = "dense"
        self.L = L
        self.Ld = L.conj().T
        self.q = qubit_dim
        self.n = fock
        L4 = L.reshape(qubit_dim, fock, qubit_dim, fock)

        qpart = L4[:, 0, :, 0]
        if np.array_equal(L, np.kron(qpart, np.eye(fock))):
            nz = list(zip(*np.nonzero(qpart)))
            if 0 < len(nz) <= 4:
                self.mode = "qubit"
                self.pairs = [(i, k, j, l, rate * qpart[i, k] * np.conj(qpart[j, l]))
                              for (i, k) in nz for (j, l) in nz]
                return

        bpart = L4[0, :, 0, :]
        if np.array_equal(L, np.kron(np.eye(qubit_dim), bpart)):
            for offset in (1, -1):
                band = np.diagonal(bpart, offset)
                trial = np.diag(band, offset)
                if band.size and np.array_equal(bpart, trial):
                    self.mode = "band"
                    self.offset = offset
                    self.weight = rate * np.outer(band, band.conj())
                    return

    def add_to(self, out: np.ndarray, rho: np.ndarray):
        q, n = self.q, self.n
        if self.mode == "qubit":
            rho4 = rho.reshape(q, n, q, n)
            out4 = out.reshape(q, n, q, n)
            for i, k, j, l, w in self.pairs:
                out4[i, :, j, :] += w * rho4[k, :, l, :]
        elif self.mode == "band":
            rho4 = rho.reshape(q, n, q, n)
            out4 = out.reshape(q, n, q, n)
            w = self.weight[None, :, None, :]
            if self.offset == 1:      # lowering ladder: source levels shift down
                out4[:, :n - 1, :, :n - 1] += w * rho4[:, 1:, :, 1:]
            else:
                out4[:, 1:, :, 1:] += w * rho4[:, :n - 1, :, :n - 1]
        else:
            out += self.rate * (self.L @ rho @ self.Ld)


def evolve_master(H: TimeDependentHamiltonian, dissipators: Sequence[Dissipator],
                  rho0: DensityMatrix, times: np.ndarray,
                  cfg: IntegratorConfig | None = None,
                  observables: Sequence[str] = DEFAULT_OBSERVABLES,
                  store_states: bool = False,
                  positivity_floor: float = POSITIVITY_FLOOR) -> Trajectory:
    """Propagate rho under H plus Lindblad loss channels."""
    if rho0.space != H.space:
        raise ValidationError("initial state and Hamiltonian spaces differ")
    for d in dissipators:
        if d.jump.space != H.space:
            raise ValidationError("dissipator and Hamiltonian spaces differ")
    cfg = cfg or IntegratorConfig()
    times = _check_grid(times)
    dim = H.space.dim
    obs = _ObservableSet(H.space, observables)
    evaluate = H.evaluate

    # Fold the anticommutator part into a non-Hermitian generator
    # K(t) = H(t) - i sum_j (r_j/2) L_j+ L_j; for Hermitian rho the coherent
    # plus damping part of the flow is -i (K rho - (K rho)+), one product per
    # evaluation.  The flow preserves Hermiticity exactly, and the defect of
    # the raw state is recorded at stored steps so a stepper bug cannot hide.
    damping = np.zeros(dim, dtype=complex)
    damping_diag = True
    damping_mat = np.zeros((dim, dim), dtype=complex)
    jumps = []
    for d in dissipators:
        if d.rate == 0.0:
            continue
        L = d.jump.matrix
        LdL = L.conj().T @ L
        damping_mat += 0.5 * d.rate * LdL
        if np.max(np.abs(LdL - np.diag(np.diagonal(LdL)))) > 0.0:
            damping_diag = False
        else:
            damping += 0.5 * d.rate * np.real(np.diagonal(LdL))
        jumps.append(_JumpApplier(L, d.rate, H.space.qubit_dim, H.space.fock_cutoff))
    diag_idx = np.arange(dim)

    if H.is_static:
        k_static = np.array(evaluate(times[0]), dtype=complex, copy=True)
        if jumps:
            if damping_diag:
                k_static[diag_idx, diag_idx] -= 1j * damping
            else:
                k_static -= 1j * damping_mat
        def generator(t: float) -> np.ndarray:
            return k_static
    else:
        kbuf = np.empty((dim, dim), dtype=complex)
        def generator(t: float) -> np.ndarray:
            np.copyto(kbuf, evaluate(t))
            if jumps:
                if damping_diag:
                    kbuf[diag_idx, diag_idx] -= 1j * damping
                else:
                    np.subtract(kbuf, 1j * damping_mat, out=kbuf)
            return kbuf

    def rhs_alloc(t, y):
        rho = y.reshape(dim, dim)
        m = generator(t) @ rho
        out = m.conj().T
        out -= m
        out *= 1j          # -i (m - m+)
        for j in jumps:
            j.add_to(out, rho)
        return out.reshape(-1) if y.ndim == 1 else out

    stored_t = times[::cfg.store_every]
    series = {name: np.empty(len(stored_t)) for name in obs.names}
    states = [] if store_states else None
    trace_drift = 0.0
    min_eig = math.inf
    herm_defect = 0.0

    def record(i, rho):
        nonlocal trace_drift, min_eig, herm_defect
        herm_defect = max(herm_defect, float(np.max(np.abs(rho - rho.conj().T))))
        rho = 0.5 * (rho + rho.conj().T)
        lo = float(np.linalg.eigvalsh(rho).min())
        min_eig = min(min_eig, lo)
        if lo < positivity_floor:
            raise NumericsError(
                f"density matrix lost positivity at t = {stored_t[i]:.6g}",
                diagnostics={"time": float(stored_t[i]), "min_eigenvalue": lo,
                             "positivity_floor": positivity_floor})
        vals = obs.from_matrix(rho)
        for name, val in vals.items():
            series[name][i] = val
        trace_drift = max(trace_drift, abs(float(np.real(np.trace(rho))) - 1.0))
        if states is not None:
            states.append(DensityMatrix(H.space, rho, trace_tol=STATE_NORM_TOL,
                                        eig_floor=positivity_floor))
        return rho

    if cfg.method == "fixed_rk4":
        dt = _pick_dt(cfg, H)
        rho = rho0.matrix.copy()
        rho = record(0, rho).copy()
        stepper = _MatrixRk4(generator, jumps, dim)
        k = 0
        for t0, t1 in zip(times[:-1], times[1:]):
            stepper.advance(t0, rho, t1, dt)
            k += 1
            if k % cfg.store_every == 0:
                rho = record(k // cfg.store_every, rho).copy()
    else:
        sol = solve_ivp(rhs_alloc, (times[0], times[-1]), rho0.matrix.reshape(-1),
                        method="RK45", t_eval=stored_t, rtol=cfg.rtol,
                        atol=cfg.atol, max_step=cfg.max_step)
        if not sol.success:
            raise NumericsError(f"adaptive integration failed: {sol.message}")
        for i in range(sol.y.shape[1]):
            record(i, sol.y[:, i].reshape(dim, dim))

    top = series.get("top_fock_pop")
    cutoff_ok = bool(np.all(top < CUTOFF_POP_LIMIT)) if top is not None else None
    return Trajectory(times=stored_t, observables=series, states=states,
                      diagnostics={"trace_drift": trace_drift, "min_eigenvalue": min_eig,
                                   "cutoff_ok": cutoff_ok, "method": cfg.method})


# ---------------------------------------------------------------------------
# scalar diagnostics
# ---------------------------------------------------------------------------

def fidelity(psi_ideal: PureState, state) -> float:
    """|<psi|rho|psi>|, or |<psi|phi>|^2 for a pure comparison state."""
    if psi_ideal.space != state.space:
        raise ValidationError("states live on different spaces")
    v = psi_ideal.amplitudes
    if isinstance(state, PureState):
        return float(abs(np.vdot(v, state.amplitudes)) ** 2)
    return float(abs(np.vdot(v, state.matrix @ v)))


@dataclass(frozen=True)
class PeriodEstimate:
    period: float
    spread: float
    peak_times: tuple


def extract_period(times: np.ndarray, series: np.ndarray,
                   min_prominence: float = 0.05) -> PeriodEstimate:
    """Oscillation period from the mean spacing of interpolated maxima.

    Maxima are selected by prominence (at least `min_prominence` of the full
    range), which keeps sideband micromotion ripples riding on a slow
    oscillation from being counted as cycles, then refined with a
    three-point parabola.  The spread of the gaps is the uncertainty.
    """
    from scipy.signal import find_peaks

    t = np.asarray(times, dtype=float)
    s = np.asarray(series, dtype=float)
    if t.shape != s.shape or t.size < 5:
        raise ValidationError("need matching series with at least 5 samples")
    lo, hi = float(s.min()), float(s.max())
    if hi - lo <= 0:
        raise ValidationError("no oscillation detected: series is constant")
    idx, _ = find_peaks(s, prominence=min_prominence * (hi - lo))
    peaks = []
    for i in idx:
        if i == 0 or i == len(s) - 1:
            continue
        denom = s[i - 1] - 2.0 * s[i] + s[i + 1]
        shift = 0.0 if denom == 0 else 0.5 * (s[i - 1] - s[i + 1]) / denom
        peaks.append(t[i] + shift * (t[i] - t[i - 1]))
    if len(peaks) < 2:
        raise ValidationError("no oscillation detected: fewer than 2 interior maxima")
    gaps = np.diff(peaks)
    return PeriodEstimate(period=float(np.mean(gaps)),
                          spread=float(np.max(gaps) - np.min(gaps)) if len(gaps) > 1 else 0.0,
                          peak_times=tuple(float(p) for p in peaks))


def dissipator_frame_defect(u_diag: np.ndarray, jump: np.ndarray,
                            rate: float = 1.0) -> float:
    """Max entrywise difference between the superoperators of L and U+ L U.

    U = diag(u_diag).  Builds both dim^2 x dim^2 superoperators explicitly
    (row-major vec), so keep the dimension small.  A diagonal frame leaves the
    loss channels of this model invariant; this measures the defect directly.
    """
    L = np.asarray(jump, dtype=complex)
    Lp = (u_diag.conj()[:, None] * L) * u_diag[None, :]

    def superop(M):
        MdM = M.conj().T @ M
        eye = np.eye(M.shape[0])
        return 0.5 * rate * (2.0 * np.kron(M, M.conj())
                             - np.kron(MdM, eye) - np.kron(eye, MdM.T))

    return float(np.max(np.abs(superop(Lp) - superop(L))))
