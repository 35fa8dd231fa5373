"""Mapping between physical drive settings and the effective model constants.

A qubit (transition frequency epsilon) dispersively coupled to a resonator
(frequency omega) is frequency-modulated by two tones.  Tone 1 sits near the
red sideband |epsilon - omega|, tone 2 near the blue sideband epsilon + omega.
Keeping only the two near-resonant terms of the double Jacobi-Anger expansion
leaves an anisotropic Rabi model whose rotating / counter-rotating couplings

    g_r  = -g J1(2 eta1) J0(2 eta2),      g_cr = -g J0(2 eta1) J1(2 eta2)

are set by the normalized drive amplitudes, while the effective frequencies

    omega_eff = (delta1 + delta2) / 2,    epsilon_eff = (delta2 - delta1) / 2

are set by the sideband detunings delta1 = Omega1 - (epsilon - omega) and
delta2 = (epsilon + omega) - Omega2.

Sign convention: the difference detuning is stored as epsilon - omega (qubit
above resonator), which makes delta1 vanish exactly when Omega1 hits the red
sideband.  All frequencies are angular (rad/s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .bessel import J0_FIRST_ZERO, bessel_j
from .errors import UnreachableTargetError, ValidationError

ETA_BALANCED = 0.7173          # amplitude with J1(2 eta)/J0(2 eta) = 1 to ~4 digits
ETA_NULL = J0_FIRST_ZERO / 2.0  # amplitude that nulls one coupling exactly


@dataclass(frozen=True)
class SystemParams:
    """Static qubit/resonator constants, angular frequencies in rad/s."""

    epsilon: float   # qubit transition frequency
    omega: float     # resonator frequency
    g: float         # qubit-resonator coupling
    kappa: float = 0.0   # qubit decay rate (jump operator sigma-)
    gamma: float = 0.0   # resonator loss rate (jump operator a)

    def __post_init__(self):
        for name in ("epsilon", "omega", "g", "kappa", "gamma"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0")
        if self.epsilon == self.omega:
            raise ValidationError("epsilon == omega: dispersive regime presupposed")


@dataclass(frozen=True)
class DriveParams:
    """Two-tone modulation: angular frequencies, normalized amplitudes, phases."""

    omega1: float
    omega2: float
    eta1: float
    eta2: float
    phi1: float = 0.0
    phi2: float = 0.0

    def __post_init__(self):
        if self.omega1 <= 0 or self.omega2 <= 0:
            raise ValidationError("drive frequencies must be > 0")
        if self.eta1 < 0 or self.eta2 < 0:
            raise ValidationError("normalized amplitudes must be >= 0")


@dataclass(frozen=True)
class Detunings:
    delta1: float       # Omega1 - (epsilon - omega)
    delta2: float       # (epsilon + omega) - Omega2
    delta_minus: float  # epsilon - omega
    delta_plus: float   # epsilon + omega


@dataclass(frozen=True)
class EffectiveParams:
    """Constants of the synthesized anisotropic Rabi model."""

    g_r: float           # rotating-term coupling
    g_cr: float          # counter-rotating-term coupling
    omega_eff: float     # effective resonator frequency
    epsilon_eff: float   # effective qubit splitting
    theta: float         # counter-rotating phase (phi2 when phi1 = 0)
    anisotropy: float    # g_cr / g_r, +-inf when g_r = 0
    phi1: float = 0.0
    phi2: float = 0.0

    @property
    def delta1(self) -> float:
        return self.omega_eff - self.epsilon_eff

    @property
    def delta2(self) -> float:
        return self.omega_eff + self.epsilon_eff


def detunings(sys: SystemParams, drive: DriveParams) -> Detunings:
    dm = sys.epsilon - sys.omega
    dp = sys.epsilon + sys.omega
    return Detunings(delta1=drive.omega1 - dm, delta2=dp - drive.omega2,
                     delta_minus=dm, delta_plus=dp)


def effective_params(sys: SystemParams, drive: DriveParams) -> EffectiveParams:
    det = detunings(sys, drive)
    # Bessel product first: commutativity then makes swapping the two tones
    # exchange g_r and g_cr bit-for-bit.
    g_r = -sys.g * (bessel_j(1, 2 * drive.eta1) * bessel_j(0, 2 * drive.eta2))
    g_cr = -sys.g * (bessel_j(0, 2 * drive.eta1) * bessel_j(1, 2 * drive.eta2))
    # epsilon_eff first, omega_eff as delta1 + epsilon_eff: keeps the
    # reconstruction delta1 = omega_eff - epsilon_eff exact for resonant and
    # degenerate drives.
    epsilon_eff = (det.delta2 - det.delta1) / 2.0
    omega_eff = det.delta1 + epsilon_eff
    if g_r != 0.0:
        anisotropy = g_cr / g_r
    else:
        anisotropy = math.copysign(math.inf, g_cr) if g_cr != 0.0 else math.nan
    return EffectiveParams(g_r=g_r, g_cr=g_cr, omega_eff=omega_eff,
                           epsilon_eff=epsilon_eff,
                           theta=drive.phi2 + drive.phi1,
                           anisotropy=anisotropy,
                           phi1=drive.phi1, phi2=drive.phi2)


# ---------------------------------------------------------------------------
# Jacobi-Anger sideband series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SidebandTerm:
    """One term coef * exp(i frequency t) of a sideband amplitude series."""

    n1: int
    n2: int
    coefficient: complex
    frequency: float


def _signed_j(n: int, x: float) -> float:
    if n >= 0:
        return bessel_j(n, x)
    val = bessel_j(-n, x)
    return -val if (-n) % 2 else val


def sideband_amplitudes(drive: DriveParams, det: Detunings,
                        n_max: int) -> tuple[list[SidebandTerm], list[SidebandTerm]]:
    """Double Jacobi-Anger series of the two modulated coupling amplitudes.

    Returns (alpha_terms, beta_terms): alpha multiplies the rotating product
    (a sigma+), beta the counter-rotating product (a sigma-).  Term (n1, n2)
    of alpha has coefficient J_n1(2 eta1) J_n2(2 eta2) e^{i(n1 phi1 + n2 phi2)}
    and frequency (epsilon - omega) + n1 Omega1 + n2 Omega2; beta mirrors it
    with conjugated phase and frequency -[(epsilon + omega) + n1 Omega1 + n2 Omega2].
    """
    if n_max < 1:
        raise ValidationError("n_max must be >= 1")
    alpha: list[SidebandTerm] = []
    beta: list[SidebandTerm] = []
    for n1 in range(-n_max, n_max + 1):
        j1 = _signed_j(n1, 2 * drive.eta1)
        for n2 in range(-n_max, n_max + 1):
            j = j1 * _signed_j(n2, 2 * drive.eta2)
            phase = n1 * drive.phi1 + n2 * drive.phi2
            comb = n1 * drive.omega1 + n2 * drive.omega2
            alpha.append(SidebandTerm(n1, n2, j * complex(math.cos(phase), math.sin(phase)),
                                      det.delta_minus + comb))
            beta.append(SidebandTerm(n1, n2, j * complex(math.cos(phase), -math.sin(phase)),
                                     -(det.delta_plus + comb)))
    return alpha, beta


# ---------------------------------------------------------------------------
# approximation audit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ValidityReport:
    """Quantitative audit of the three approximations behind the effective model."""

    dispersive_ratio: float    # max |g / (epsilon -+ omega)|
    detuning_ratio: float      # max |delta_i| / min |epsilon -+ omega|
    rwa_margin: float          # min |freq| / |g J J| over discarded sidebands
    dispersive_ok: bool
    detuning_ok: bool
    rwa_ok: bool
    dispersive_max: float
    detuning_max: float
    rwa_min: float

    @property
    def ok(self) -> bool:
        return self.dispersive_ok and self.detuning_ok and self.rwa_ok

    def as_dict(self) -> dict:
        return {
            "dispersive_ratio": self.dispersive_ratio,
            "detuning_ratio": self.detuning_ratio,
            "rwa_margin": self.rwa_margin,
            "dispersive_ok": self.dispersive_ok,
            "detuning_ok": self.detuning_ok,
            "rwa_ok": self.rwa_ok,
            "thresholds": {
                "dispersive_max": self.dispersive_max,
                "detuning_max": self.detuning_max,
                "rwa_min": self.rwa_min,
            },
            "ok": self.ok,
        }


def validity_report(sys: SystemParams, drive: DriveParams,
                    dispersive_max: float = 0.1, detuning_max: float = 0.2,
                    rwa_min: float = 10.0, n_max: int = 5) -> ValidityReport:
    """Check |g| << |Delta|, |delta_i| << |Delta| and the sideband margin.

    The dispersive ratio compares g against the smaller of the two sideband
    frequencies; the detuning ratio compares each tone's offset against its
    own sideband (delta1 against epsilon - omega, delta2 against
    epsilon + omega).  The margin is the worst ratio
    |oscillation frequency| / |coupling| over all discarded series terms with
    |n_i| <= n_max; the two retained terms, (-1, 0) of the rotating series
    and (0, -1) of the counter-rotating one, are excluded.  Thresholds are
    soft conventions (the literature only demands "much smaller"), so all
    three are keyword-tunable.
    """
    det = detunings(sys, drive)
    d_min = min(abs(det.delta_minus), abs(det.delta_plus))
    dispersive_ratio = sys.g / d_min if d_min > 0 else math.inf
    detuning_ratio = max(
        abs(det.delta1) / abs(det.delta_minus) if det.delta_minus else math.inf,
        abs(det.delta2) / abs(det.delta_plus) if det.delta_plus else math.inf)

    alpha, beta = sideband_amplitudes(drive, det, n_max)
    margin = math.inf
    for terms, kept in ((alpha, (-1, 0)), (beta, (0, -1))):
        for term in terms:
            if (term.n1, term.n2) == kept:
                continue
            coupling = abs(sys.g * term.coefficient)
            if coupling == 0.0:
                continue
            margin = min(margin, abs(term.frequency) / coupling)
    return ValidityReport(
        dispersive_ratio=dispersive_ratio,
        detuning_ratio=detuning_ratio,
        rwa_margin=margin,
        dispersive_ok=dispersive_ratio < dispersive_max,
        detuning_ok=detuning_ratio < detuning_max,
        rwa_ok=margin > rwa_min,
        dispersive_max=dispersive_max,
        detuning_max=detuning_max,
        rwa_min=rwa_min,
    )


# ---------------------------------------------------------------------------
# inverse design
# ---------------------------------------------------------------------------

def coupling_ratio(eta: float) -> float:
    """J1(2 eta) / J0(2 eta), strictly increasing on [0, ETA_NULL)."""
    j0 = bessel_j(0, 2 * eta)
    if j0 == 0.0:
        return math.inf
    return bessel_j(1, 2 * eta) / j0


def solve_amplitudes(target_anisotropy: float, eta_fixed: float = ETA_BALANCED,
                     tol: float = 1e-9) -> tuple[float, float]:
    """Drive amplitudes realizing g_cr / g_r = target_anisotropy.

    eta1 is pinned at `eta_fixed` and eta2 is solved by bisection on the
    monotone ratio J1(2 eta)/J0(2 eta) over [0, ETA_NULL].  The endpoints are
    exact: target 0 returns eta2 = 0, target inf returns eta2 = ETA_NULL.
    """
    lam = float(target_anisotropy)
    if lam < 0 or math.isnan(lam):
        raise UnreachableTargetError("target anisotropy must be in [0, inf]")
    if not 0 <= eta_fixed < ETA_NULL:
        raise UnreachableTargetError(f"eta_fixed must lie in [0, {ETA_NULL})")
    if lam == 0.0:
        return eta_fixed, 0.0
    if math.isinf(lam):
        return eta_fixed, ETA_NULL
    if eta_fixed == 0.0:
        raise UnreachableTargetError("eta_fixed = 0 only reaches anisotropy 0")

    r_fixed = coupling_ratio(eta_fixed)
    target = lam * r_fixed
    lo, hi = 0.0, ETA_NULL

    def deviation(eta2: float) -> float:
        # sign of r(eta2) - target, written without the J0 pole
        return bessel_j(1, 2 * eta2) - target * bessel_j(0, 2 * eta2)

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        r_mid = coupling_ratio(mid)
        ratio = r_mid / r_fixed
        err = abs(ratio - lam) if lam <= 1.0 else abs(1.0 / ratio - 1.0 / lam)
        if err < tol:
            return eta_fixed, mid
        if deviation(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    raise UnreachableTargetError(
        f"bisection did not reach |ratio - {lam}| < {tol}")


def amplitudes_for_coupling(target_g_r: float, anisotropy: float, g: float,
                            tol: float = 1e-9) -> tuple[float, float]:
    """Drive amplitudes with |g_r| = target_g_r at fixed anisotropy.

    Scans eta1 over (0, ETA_NULL); for each eta1 the companion eta2 follows
    from the anisotropy constraint.  |g_r| is not monotone over the whole
    interval, so the bracket is located on a coarse grid first.
    """
    if target_g_r <= 0 or g <= 0:
        raise UnreachableTargetError("couplings must be positive")

    def g_r_at(eta1: float) -> float:
        _, eta2 = solve_amplitudes(anisotropy, eta_fixed=eta1, tol=1e-12)
        return abs(g * bessel_j(1, 2 * eta1) * bessel_j(0, 2 * eta2))

    grid = [k * ETA_NULL / 64.0 for k in range(1, 64)]
    vals = [g_r_at(e) for e in grid]
    best = max(vals)
    if target_g_r > best:
        raise UnreachableTargetError(
            f"|g_r| = {target_g_r} exceeds the reachable maximum {best:.6g} "
            f"at this anisotropy")
    k = next(i for i, v in enumerate(vals) if v >= target_g_r)
    lo = grid[k - 1] if k > 0 else 1e-9
    hi = grid[k]
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = g_r_at(mid)
        if abs(val - target_g_r) <= tol * target_g_r:
            return solve_amplitudes(anisotropy, eta_fixed=mid, tol=1e-12)
        if val < target_g_r:
            lo = mid
        else:
            hi = mid
    raise UnreachableTargetError("coupling bisection did not converge")


def drive_for_detunings(det1: float, det2: float, sys: SystemParams,
                        eta1: float, eta2: float,
                        phi1: float = 0.0, phi2: float = 0.0) -> DriveParams:
    """Drive frequencies realizing the requested sideband detunings."""
    omega1 = (sys.epsilon - sys.omega) + det1
    omega2 = (sys.epsilon + sys.omega) - det2
    if omega1 <= 0 or omega2 <= 0:
        raise UnreachableTargetError("requested detunings push a drive frequency below 0")
    return DriveParams(omega1=omega1, omega2=omega2, eta1=eta1, eta2=eta2,
                       phi1=phi1, phi2=phi2)


def swap_tones(drive: DriveParams) -> DriveParams:
    """Exchange the two tones; swaps the roles of g_r and g_cr."""
    return replace(drive, omega1=drive.omega2, omega2=drive.omega1,
                   eta1=drive.eta2, eta2=drive.eta1,
                   phi1=drive.phi2, phi2=drive.phi1)
