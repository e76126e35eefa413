"""Quantum-to-classical crossover diagnostics and the emergent classical picture.

The clock sphere carries the energy-time chart E = J*eps*(1 - cos theta),
t = phi/eps; the oscillator plane carries the Darboux chart (q, p).  The
joint amplitude beta(Omega, alpha) weights classical configurations, and in
the large-(J, M) regime only harmonic orbits at the allowed energies survive.
This module evaluates beta stably, checks the stationary equation at density
peaks, lists the surviving energy levels with their phase-space radii, and
generates the classical orbits together with Hamilton-equation residuals.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp, roots_laguerre, xlogy

from .coherent import (
    LogAmplitude,
    SphereCoordinate,
    hcs_log_magnitude,
    scs_log_magnitude,
    sphere_quadrature,
)
from .constraints import ClockSpec, OscillatorSpec
from .pawstate import PawState, conditional_state


# ---------------------------------------------------------------------------
# energy-time chart on the clock sphere
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EnergyTimeCoordinate:
    """Clock reading in the conjugate chart: e = E/(M*omega), t = phi/eps."""

    e: float
    t: float


def energy_of_theta(clock: ClockSpec, theta) -> float:
    """Clock energy at polar angle theta: J*eps*(1 - cos theta)."""
    return clock.epsilon * (clock.two_j / 2.0) * (1.0 - np.cos(theta))


def clock_energy_expectation(clock: ClockSpec, theta) -> float:
    """Coherent-state expectation of the clock Hamiltonian; equals energy_of_theta."""
    return energy_of_theta(clock, theta)


def oscillator_energy_expectation(oscillator: OscillatorSpec, alpha: complex) -> float:
    """Coherent-state expectation omega*(M|alpha|^2 + 1/2)."""
    u = oscillator.mass * (alpha.real ** 2 + alpha.imag ** 2)
    return oscillator.omega * (u + 0.5)


def energy_time_coordinate(clock: ClockSpec, oscillator: OscillatorSpec,
                           point: SphereCoordinate) -> EnergyTimeCoordinate:
    """Map a sphere point to the dimensionless energy-time chart."""
    e = energy_of_theta(clock, point.theta) / (oscillator.mass * oscillator.omega)
    return EnergyTimeCoordinate(e=float(e), t=point.phi / clock.epsilon)


def theta_of_energy(clock: ClockSpec, oscillator: OscillatorSpec, e: float) -> float:
    """Inverse chart: the polar angle whose clock energy is e*M*omega.

    e must lie in [0, 2*kappa] with kappa = eps*J/(omega*M).
    """
    kappa = clock.epsilon * (clock.two_j / 2.0) / (oscillator.omega * oscillator.mass)
    x = e / kappa
    if not 0.0 <= x <= 2.0:
        raise ValueError(f"e = {e!r} outside the clock energy range [0, {2 * kappa!r}]")
    return math.acos(1.0 - x)


# ---------------------------------------------------------------------------
# joint amplitude and its normalization
# ---------------------------------------------------------------------------

def beta_amplitude(state: PawState, point: SphereCoordinate,
                   alpha: complex) -> LogAmplitude:
    """Joint coherent-state amplitude sum_m c_m <Omega|J, m><alpha|n_m>.

    Branches are combined by a max-shifted complex sum of log-magnitude terms,
    so the result is faithful even when every branch underflows a float.
    """
    u = state.mass * (alpha.real ** 2 + alpha.imag ** 2)
    arg_alpha = cmath.phase(alpha) if alpha != 0 else 0.0
    logs = np.empty(len(state.support))
    phases = np.empty(len(state.support))
    for i, (k, c) in enumerate(state.coefficients):
        n = state.n_values[i]
        logs[i] = (math.log(abs(c))
                   + float(scs_log_magnitude(point.theta, state.two_j, k))
                   + float(hcs_log_magnitude(u, n)))
        phases[i] = cmath.phase(c) - k * point.phi - n * arg_alpha
    peak = float(np.max(logs))
    if peak == -math.inf:
        return LogAmplitude(-math.inf, 0.0)
    total = complex(np.sum(np.exp(logs - peak + 1j * phases)))
    if total == 0:
        return LogAmplitude(-math.inf, 0.0)
    return LogAmplitude(peak + math.log(abs(total)), cmath.phase(total))


def beta_double_integral(state: PawState, theta_order: int | None = None,
                         radial_order: int | None = None) -> float:
    """Quadrature of |beta|^2 over both coherent-state measures; 1 for any state.

    The 4D integral factorizes over the quadrature grid: Gauss-Legendre in
    cos(theta) and Gauss-Laguerre in u = M|alpha|^2 handle the magnitudes
    (folded into the summands in log space), while uniform azimuthal sums of
    K > max spacing points evaluate the phase integrals exactly.
    """
    k = np.array(state.support, dtype=float)
    n = np.array(state.n_values, dtype=float)
    c = state.amplitudes

    thetas, w_sphere = sphere_quadrature(state.two_j, theta_order)
    log_c_fold = (scs_log_magnitude(thetas[:, None], state.two_j, k[None, :])
                  + 0.5 * np.log(w_sphere)[:, None])
    log_sc = logsumexp(log_c_fold[:, :, None] + log_c_fold[:, None, :], axis=0)

    if radial_order is None:
        radial_order = int(max(n)) + 40
    u_nodes, u_weights = roots_laguerre(radial_order)
    keep = u_weights > 0.0
    u_nodes, u_weights = u_nodes[keep], u_weights[keep]
    log_r_fold = (0.5 * xlogy(n[None, :], u_nodes[:, None])
                  - 0.5 * gammaln(n[None, :] + 1.0)
                  + 0.5 * np.log(u_weights)[:, None])
    log_sr = logsumexp(log_r_fold[:, :, None] + log_r_fold[:, None, :], axis=0)

    def phase_deltas(indices: np.ndarray, count: int) -> np.ndarray:
        angles = 2.0 * math.pi * np.arange(count) / count
        spacing = indices[:, None] - indices[None, :]
        return np.mean(np.exp(-1j * spacing[:, :, None] * angles), axis=-1)

    d_clock = phase_deltas(k, state.two_j + 3)
    d_plane = phase_deltas(n, int(max(n)) + 3)

    cross = np.outer(c, np.conj(c)) * np.exp(log_sc + log_sr) * d_clock * d_plane
    return float(np.sum(cross).real)


def stationary_residual(state: PawState, theta_peak: float, phi: float) -> float:
    """|| (H - E(theta_peak)) |phi_theta(phi)> ||_2 at a density peak.

    Small only where chi^2 is sharply localized around a single branch; for a
    reading between two peaks the residual stays of order of the level gap,
    which makes it a localization diagnostic rather than an identity.
    """
    conditional = conditional_state(state, theta_peak, phi)
    energy = energy_of_theta(state.clock, theta_peak)
    gaps = np.array([state.oscillator.level_energy(n) - energy
                     for n in conditional.n_values])
    return float(np.linalg.norm(gaps * conditional.vector))


# ---------------------------------------------------------------------------
# surviving configurations and classical orbits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SurvivingLevel:
    """One occupied branch viewed classically.

    ``energy`` is the exact level omega*(n+1/2); ``energy_classical`` is the
    large-M asymptote omega*n under which the phase-space radius in the
    dimensionless chart is exactly sqrt(2n/M).
    """

    n: int
    energy: float
    energy_classical: float
    radius_q: float


def surviving_configurations(state: PawState) -> list[SurvivingLevel]:
    """The classical orbits that survive conditioning: one per occupied branch."""
    levels = []
    for n in sorted(state.n_values):
        levels.append(SurvivingLevel(
            n=n,
            energy=state.oscillator.level_energy(n),
            energy_classical=state.oscillator.omega * n,
            radius_q=math.sqrt(2.0 * n / state.mass),
        ))
    return levels


@dataclass(frozen=True)
class OrbitParams:
    """Harmonic orbit at fixed energy: q = sqrt(2E)/(M*omega) cos(eta t + phi0).

    eta is a free time-scale constant; eta = M*omega makes the orbit solve the
    Hamilton equations of H = p^2/2 + (M*omega)^2 q^2 / 2 in physical time.
    """

    energy: float
    eta: float
    phi0: float
    m_omega: float

    def __post_init__(self) -> None:
        if self.energy < 0:
            raise ValueError("energy must be non-negative")
        if self.m_omega <= 0:
            raise ValueError("m_omega must be positive")


@dataclass(frozen=True)
class ClassicalConfig:
    """A sampled point of a classical orbit, in both oscillator charts."""

    energy: float
    t: float
    q: float
    p: float
    big_q: float
    big_p: float


def classical_orbit(params: OrbitParams, t_grid) -> list[ClassicalConfig]:
    """Sample the orbit on t_grid; every point conserves H = energy exactly."""
    amplitude = math.sqrt(2.0 * params.energy)
    root = math.sqrt(params.m_omega)
    configs = []
    for t in np.asarray(t_grid, dtype=float):
        phase = params.eta * t + params.phi0
        q = amplitude / params.m_omega * math.cos(phase)
        p = -amplitude * math.sin(phase)
        configs.append(ClassicalConfig(energy=params.energy, t=float(t), q=q, p=p,
                                       big_q=q * root, big_p=p / root))
    return configs


def orbit_family(state: PawState, samples: int = 256, eta: float | None = None,
                 phi0: float = 0.0) -> list[ClassicalConfig]:
    """Orbits of every surviving level over one oscillator period.

    Energies use the large-M asymptote omega*n, so the dimensionless radii
    are exactly sqrt(2n/M) as in the dense-orbit picture.
    """
    m_omega = state.mass * state.oscillator.omega
    if eta is None:
        eta = m_omega
    t_grid = np.linspace(0.0, 2.0 * math.pi / m_omega, samples, endpoint=False)
    configs: list[ClassicalConfig] = []
    for level in surviving_configurations(state):
        params = OrbitParams(energy=level.energy_classical, eta=eta, phi0=phi0,
                             m_omega=m_omega)
        configs.extend(classical_orbit(params, t_grid))
    return configs


def hamilton_residual(params: OrbitParams, t: float, dt: float) -> tuple[float, float]:
    """Central-difference defects of the two Hamilton equations at time t.

    Returns (|dq/dt - (eta/M*omega) dH/dp|, |dp/dt + (eta/M*omega) dH/dq|);
    both shrink as dt^2 since the orbit solves the rescaled equations exactly.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    before, center, after = classical_orbit(params, [t - dt, t, t + dt])
    factor = params.eta / params.m_omega
    dq_dt = (after.q - before.q) / (2.0 * dt)
    dp_dt = (after.p - before.p) / (2.0 * dt)
    residual_q = abs(dq_dt - factor * center.p)
    residual_p = abs(dp_dt + factor * params.m_omega ** 2 * center.q)
    return residual_q, residual_p


def orbit_energy(params: OrbitParams, config: ClassicalConfig) -> float:
    """H(q, p) = p^2/2 + (M*omega)^2 q^2 / 2 at one sampled point."""
    return 0.5 * config.p ** 2 + 0.5 * (params.m_omega * config.q) ** 2


def write_orbit_csv(configs, path) -> None:
    """Write sampled configurations as CSV rows E,t,q,p,Q,P."""
    rows = np.array([[c.energy, c.t, c.q, c.p, c.big_q, c.big_p] for c in configs])
    np.savetxt(path, rows, fmt="%.17g", delimiter=",", newline="\n",
               header="E,t,q,p,Q,P", comments="")


# ---------------------------------------------------------------------------
# large-J level labeling
# ---------------------------------------------------------------------------

def mu_of_level(two_j: int, m_plus_j: int) -> float:
    """Continuous label mu = m/J in [-1, 1] of a clock level."""
    return (2 * m_plus_j - two_j) / two_j


def snap_mu_to_level(two_j: int, mu: float) -> int:
    """Nearest ladder index m+J to the continuous label mu, clipped to range."""
    level = round((two_j / 2.0) * (mu + 1.0))
    return int(min(max(level, 0), two_j))
