"""Marginal probability distributions of the joint amplitude |beta|^2.

Three marginals of the joint clock-oscillator density are supported:

* phase space (Q, P) — integrate over the clock sphere; each occupied Fock
  level leaves a Poisson ridge at radius sqrt(2n/M);
* energy-time (e, t) — integrate over the oscillator plane; the result is the
  clock-sphere density chi^2 rewritten in e = E/(M*omega), independent of t;
* space-time (Q, t) — integrate over energy and momentum; the diagonal part
  is static while branch pairs contribute an oscillating interference term
  whose amplitude dies with both the clock and oscillator sizes.

Everything is evaluated at finite (J, M) in log space.  Integrals use
Gauss-Legendre nodes, so the binomial energy integrands (polynomials in
e/(2*kappa)) are integrated exactly.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaln, logsumexp, xlogy

from .coherent import ln_binomial
from .pawstate import PawState

_trapezoid = getattr(np, "trapezoid", None) or np.trapz


class EOutOfRange(ValueError):
    """An energy sample lies outside the clock range [0, 2*kappa]."""


def _worker_count() -> int:
    """Thread count for grid sweeps; the PAW_THREADS env var caps it."""
    raw = os.environ.get("PAW_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return min(4, os.cpu_count() or 1)


# ---------------------------------------------------------------------------
# grid containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridAxis:
    """Uniform closed-interval sampling of one coordinate."""

    name: str
    start: float
    stop: float
    count: int

    def __post_init__(self) -> None:
        if self.count < 2:
            raise ValueError("an axis needs at least two samples")
        if not self.stop > self.start:
            raise ValueError("stop must exceed start")

    @cached_property
    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)

    @property
    def spacing(self) -> float:
        return (self.stop - self.start) / (self.count - 1)


@dataclass(frozen=True, eq=False)
class DistributionGrid:
    """Non-negative density sampled over one or two axes.

    ``measure`` records the weight convention folded into the values, so a
    plain trapezoid sum over the axes estimates the distribution's mass.
    """

    axes: tuple[GridAxis, ...]
    values: np.ndarray
    measure: str

    def __post_init__(self) -> None:
        expected = tuple(axis.count for axis in self.axes)
        if self.values.shape != expected:
            raise ValueError(f"values shape {self.values.shape} does not match "
                             f"axes {expected}")
        if float(self.values.min()) < 0.0:
            raise ValueError("densities must be non-negative")

    def mass(self) -> float:
        """Trapezoid estimate of the total mass on the sampled window."""
        total = self.values
        for axis in reversed(self.axes):
            total = _trapezoid(total, axis.values, axis=-1)
        return float(total)

    def metadata(self) -> dict:
        return {
            "axes": [{"name": a.name, "start": a.start, "stop": a.stop,
                      "count": a.count} for a in self.axes],
            "measure": self.measure,
        }

    def write_csv(self, path) -> None:
        """One row per cell: coordinates then value, 17 significant digits."""
        names = [axis.name for axis in self.axes]
        if len(self.axes) == 1:
            table = np.column_stack([self.axes[0].values, self.values])
        else:
            first, second = self.axes
            table = np.column_stack([
                np.repeat(first.values, second.count),
                np.tile(second.values, first.count),
                self.values.ravel(),
            ])
        np.savetxt(path, table, fmt="%.17g", delimiter=",", newline="\n",
                   header=",".join([*names, "value"]), comments="")


@dataclass(frozen=True)
class InterferenceReport:
    """Size of the interference term relative to the static background.

    The suppression factors are the analytic decay bounds of the cross term:
    the clock one from the binomial mismatch of the two branches, the
    oscillator one from the factorial mismatch of the two Fock levels.  The
    aggregates i1 >= i2 (integrated diagonal contributions) and i_int
    (integrated cross magnitude) are filled in by marginal_space_time.
    """

    clock_suppression_factor: float
    oscillator_suppression_factor: float
    i1: float | None = None
    i2: float | None = None
    i_int: float | None = None
    ratio: float | None = None


# ---------------------------------------------------------------------------
# default grids
# ---------------------------------------------------------------------------

def default_phase_space_axes() -> tuple[GridAxis, GridAxis]:
    return (GridAxis("Q", -2.5, 2.5, 801), GridAxis("P", -2.5, 2.5, 801))


def default_energy_axis(state: PawState) -> GridAxis:
    """e in [0, min(2*kappa, 3/2) + 0.1] clipped to the physical range."""
    two_kappa = 2.0 * float(state.ratios.kappa)
    stop = min(min(two_kappa, 1.5) + 0.1, two_kappa)
    return GridAxis("e", 0.0, stop, 2001)


def default_time_axis(state: PawState) -> GridAxis:
    """One oscillator period."""
    period = 2.0 * math.pi / (state.mass * state.oscillator.omega)
    return GridAxis("t", 0.0, period, 256)


# ---------------------------------------------------------------------------
# phase-space marginal
# ---------------------------------------------------------------------------

def _log_fock_density(u: np.ndarray, n: float) -> np.ndarray:
    """log of e^{-u} u^n / n! with the 0*log(0) pole convention."""
    return xlogy(n, u) - u - gammaln(n + 1.0)


def marginal_phase_space(state: PawState, q_axis: GridAxis | None = None,
                         p_axis: GridAxis | None = None) -> DistributionGrid:
    """Density (M/2pi) sum_m |c_m|^2 e^{-U} U^{n_m}/n_m!, U = M(Q^2+P^2)/2.

    Integrating the clock sphere away leaves an exact finite-M mixture of
    Poisson ridges, one per occupied branch, peaking at radius sqrt(2n/M).
    """
    if q_axis is None or p_axis is None:
        default_q, default_p = default_phase_space_axes()
        q_axis = q_axis or default_q
        p_axis = p_axis or default_p
    big_q = q_axis.values[:, None]
    big_p = p_axis.values[None, :]
    u = 0.5 * state.mass * (big_q ** 2 + big_p ** 2)
    values = np.zeros_like(u)
    for weight, n in zip(np.abs(state.amplitudes) ** 2, state.n_values):
        values += weight * np.exp(_log_fock_density(u, n))
    values *= state.mass / (2.0 * math.pi)
    return DistributionGrid(axes=(q_axis, p_axis), values=values,
                            measure="M/(2*pi) dQ dP")


# ---------------------------------------------------------------------------
# energy-time marginal
# ---------------------------------------------------------------------------

def energy_time_density(state: PawState, e, t: float = 0.0):
    """Joint density over (e, t); scalar or array e.

    Equals ((2J+1)/(2*kappa)) sum_m |c_m|^2 binom(2J, k) (1-x)^{2J-k} x^k with
    x = e/(2*kappa) and k = m+J: the clock-sphere density chi^2 rewritten in
    the energy chart.  The time argument is accepted to emphasize that the
    density is constant in t.
    """
    del t
    two_kappa = 2.0 * float(state.ratios.kappa)
    e_arr = np.asarray(e, dtype=float)
    if np.any(e_arr < 0.0) or np.any(e_arr > two_kappa * (1.0 + 1e-12)):
        raise EOutOfRange(f"e must lie in [0, {two_kappa}]")
    x = np.clip(e_arr / two_kappa, 0.0, 1.0)
    k = np.array(state.support, dtype=float)
    log_terms = (np.log(np.abs(state.amplitudes) ** 2)
                 + ln_binomial(state.two_j, k)
                 + xlogy(state.two_j - k, 1.0 - x[..., None])
                 + xlogy(k, x[..., None]))
    density = np.exp(logsumexp(log_terms, axis=-1)) * (state.two_j + 1) / two_kappa
    return float(density) if e_arr.ndim == 0 else density


def marginal_energy_time(state: PawState,
                         e_axis: GridAxis | None = None) -> DistributionGrid:
    """The energy-time marginal sampled over e (any t section is identical)."""
    if e_axis is None:
        e_axis = default_energy_axis(state)
    values = energy_time_density(state, e_axis.values)
    return DistributionGrid(axes=(e_axis,), values=values,
                            measure="(2J+1)/(2*kappa) de, azimuth integrated")


# ---------------------------------------------------------------------------
# space-time marginal and interference
# ---------------------------------------------------------------------------

def clock_interference_factor(two_j: int, k1: int, k2: int) -> float:
    """sqrt(binom(2J,k1) binom(2J,k2)) / binom(2J,(k1+k2)/2); 1 on the diagonal.

    This is exactly the energy integral of the cross term relative to the
    diagonal one, and it vanishes rapidly as the branches separate or J grows.
    """
    half = 0.5 * (k1 + k2)
    return float(np.exp(0.5 * ln_binomial(two_j, k1) + 0.5 * ln_binomial(two_j, k2)
                        - ln_binomial(two_j, half)))


def oscillator_interference_factor(n1: int, n2: int) -> float:
    """Gamma((n1+n2)/2 + 1) / sqrt(n1! n2!); 1 on the diagonal.

    The Gamma function extends the midpoint factorial when n1+n2 is odd.
    """
    half = 0.5 * (n1 + n2)
    return float(np.exp(gammaln(half + 1.0)
                        - 0.5 * (gammaln(n1 + 1.0) + gammaln(n2 + 1.0))))


def interference_suppression(two_j: int, m1_plus_j: int, m2_plus_j: int,
                             mass: int, n1: int, n2: int) -> InterferenceReport:
    """Analytic decay factors of the (m1,n1)x(m2,n2) interference term.

    ``mass`` is accepted alongside the indices for validation and interface
    symmetry; both factors depend only on the level indices themselves.
    """
    if mass < 1:
        raise ValueError("mass must be a positive integer")
    for k in (m1_plus_j, m2_plus_j):
        if not 0 <= k <= two_j:
            raise ValueError(f"ladder index {k} outside 0..{two_j}")
    if min(n1, n2) < 0:
        raise ValueError("Fock levels must be non-negative")
    return InterferenceReport(
        clock_suppression_factor=clock_interference_factor(two_j, m1_plus_j, m2_plus_j),
        oscillator_suppression_factor=oscillator_interference_factor(n1, n2),
    )


def _momentum_quadrature(state: PawState, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights covering the occupied momentum support."""
    n_max = max(state.n_values)
    reach = (math.sqrt(2.0 * n_max / state.mass)
             * (1.0 + math.sqrt(40.0 / max(n_max, 1)))
             + math.sqrt(80.0 / state.mass))
    nodes, weights = leggauss(order)
    return reach * nodes, reach * weights


def _diagonal_profile(state: PawState, q_values: np.ndarray,
                      p_nodes: np.ndarray, p_weights: np.ndarray) -> np.ndarray:
    """sum_m |c_m|^2 (M/2pi) integral dP of the branch Fock density, per Q."""
    u = 0.5 * state.mass * (q_values[:, None] ** 2 + p_nodes[None, :] ** 2)
    out = np.zeros_like(q_values)
    for weight, n in zip(np.abs(state.amplitudes) ** 2, state.n_values):
        # multiply-then-sum keeps the reduction order independent of the
        # number of Q rows, so results do not depend on work chunking
        out += weight * (np.exp(_log_fock_density(u, n)) * p_weights).sum(axis=1)
    return out * state.mass / (2.0 * math.pi)


def space_time_diagonal(state: PawState, q_values, p_order: int = 400) -> np.ndarray:
    """Static part of the space-time marginal along Q (cross terms excluded)."""
    q_values = np.asarray(q_values, dtype=float)
    p_nodes, p_weights = _momentum_quadrature(state, p_order)
    prefactor = state.clock.epsilon / (2.0 * math.pi)
    return prefactor * _diagonal_profile(state, q_values, p_nodes, p_weights)


def _pair_energy_overlap(state: PawState, k1: int, k2: int, order: int) -> float:
    """log of the cross-term energy integral (2J+1) int_0^1 dx of the half-sum binomial."""
    two_j = state.two_j
    half = 0.5 * (k1 + k2)
    nodes, weights = leggauss(order)
    x = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    log_terms = (0.5 * (ln_binomial(two_j, k1) + ln_binomial(two_j, k2))
                 + xlogy(two_j - half, 1.0 - x) + xlogy(half, x) + np.log(w))
    return float(logsumexp(log_terms) + math.log(two_j + 1))


def marginal_space_time(state: PawState, q_axis: GridAxis | None = None,
                        t_axis: GridAxis | None = None, p_order: int = 400,
                        e_order: int | None = None,
                        ) -> tuple[DistributionGrid, InterferenceReport]:
    """Space-time marginal D(Q, t) with its diagonal/interference split.

    At each (Q, t) the joint density is integrated over the energy range
    [0, 2*kappa] and over all momenta.  The energy integral of each branch
    pair is a degree-2J polynomial, integrated exactly by Gauss-Legendre;
    the momentum integral uses ``p_order`` nodes over the occupied support.
    Branch pairs whose interference amplitude cannot reach 1e-300 are skipped.

    Returns the sampled grid plus an InterferenceReport whose aggregates are
    trapezoid Q-integrals (the cross term's absolute value, averaged over t).
    """
    if q_axis is None:
        q_axis = default_phase_space_axes()[0]
    if t_axis is None:
        t_axis = default_time_axis(state)
    if e_order is None:
        e_order = state.two_j // 2 + 2

    q_values = q_axis.values
    t_values = t_axis.values
    p_nodes, p_weights = _momentum_quadrature(state, p_order)
    epsilon = state.clock.epsilon
    prefactor = epsilon / (2.0 * math.pi)
    moduli = np.abs(state.amplitudes)
    gammas = np.angle(state.amplitudes)

    # Interference pairs that can matter, with their energy overlap A.
    branches = range(len(state.support))
    kept: list[tuple[int, int, float]] = []  # (i, j, amplitude 2|ci||cj|A)
    for i in branches:
        for j in branches:
            if i >= j:
                continue
            log_a = _pair_energy_overlap(state, state.support[i],
                                         state.support[j], e_order)
            log_amp = math.log(2.0 * moduli[i] * moduli[j]) + log_a
            if log_amp > -700.0:
                kept.append((i, j, math.exp(log_amp)))

    workers = _worker_count()
    chunk_count = min(max(1, workers * 2), q_values.size) if workers > 1 else 1
    chunks = np.array_split(np.arange(q_values.size), chunk_count)

    def profile(index: np.ndarray):
        q_chunk = q_values[index]
        u = 0.5 * state.mass * (q_chunk[:, None] ** 2 + p_nodes[None, :] ** 2)
        diag = np.zeros(q_chunk.size)
        for weight, n in zip(moduli ** 2, state.n_values):
            diag += weight * (np.exp(_log_fock_density(u, n)) * p_weights).sum(axis=1)
        angles = np.arctan2(p_nodes[None, :], q_chunk[:, None])
        cos_parts, sin_parts = [], []
        for i, j, _ in kept:
            n1, n2 = state.n_values[i], state.n_values[j]
            base = np.exp(0.5 * (_log_fock_density(u, n1) + _log_fock_density(u, n2)))
            psi = (n1 - n2) * angles - (gammas[i] - gammas[j])
            cos_parts.append((base * np.cos(psi) * p_weights).sum(axis=1))
            sin_parts.append((base * np.sin(psi) * p_weights).sum(axis=1))
        return diag, cos_parts, sin_parts

    if chunk_count == 1:
        results = [profile(chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(profile, chunks))

    plane_norm = state.mass / (2.0 * math.pi)
    diagonal = plane_norm * np.concatenate([r[0] for r in results])
    g_cos = [plane_norm * np.concatenate([r[1][p] for r in results])
             for p in range(len(kept))]
    g_sin = [plane_norm * np.concatenate([r[2][p] for r in results])
             for p in range(len(kept))]

    cross = np.zeros((q_values.size, t_values.size))
    for p, (i, j, amplitude) in enumerate(kept):
        beat = (state.support[i] - state.support[j]) * epsilon * t_values
        cross += amplitude * (np.outer(g_cos[p], np.cos(beat))
                              - np.outer(g_sin[p], np.sin(beat)))

    values = prefactor * (diagonal[:, None] + cross)
    floor = float(values.min())
    if floor < 0.0:
        if floor < -1e-9 * float(values.max()):
            raise RuntimeError(f"space-time marginal went negative ({floor})")
        values = np.maximum(values, 0.0)
    grid = DistributionGrid(
        axes=(q_axis, t_axis), values=values,
        measure="eps/(2*pi), energy and momentum integrated out")

    diag_integrals = sorted(
        (prefactor * w * float(_trapezoid(
            plane_norm * np.exp(_log_fock_density(
                0.5 * state.mass * (q_values[:, None] ** 2 + p_nodes[None, :] ** 2),
                n)) @ p_weights, q_values))
         for w, n in zip(moduli ** 2, state.n_values)),
        reverse=True)
    i1 = diag_integrals[0]
    i2 = float(sum(diag_integrals[1:]))
    i_int = prefactor * float(np.mean(_trapezoid(np.abs(cross), q_values, axis=0)))

    best = max(((i, j) for i in branches for j in branches if i < j),
               key=lambda pair: moduli[pair[0]] * moduli[pair[1]])
    report = InterferenceReport(
        clock_suppression_factor=clock_interference_factor(
            state.two_j, state.support[best[0]], state.support[best[1]]),
        oscillator_suppression_factor=oscillator_interference_factor(
            state.n_values[best[0]], state.n_values[best[1]]),
        i1=i1, i2=i2, i_int=i_int,
        ratio=i_int / (i1 + i2),
    )
    return grid, report


def classical_limit_section(state: PawState, q_values) -> np.ndarray:
    """Large-size reference for a fixed-t section: a mixture of arcsine laws.

    Each occupied branch contributes |c|^2 (1/pi) / sqrt(r^2 - Q^2) inside its
    orbit radius r = sqrt(2n/M) and nothing outside; the values diverge at
    |Q| = r, so comparisons must exclude a band around each radius.
    """
    q_values = np.asarray(q_values, dtype=float)
    out = np.zeros_like(q_values)
    with np.errstate(divide="ignore"):
        for weight, n in zip(np.abs(state.amplitudes) ** 2, state.n_values):
            r_squared = 2.0 * n / state.mass
            gap = r_squared - q_values ** 2
            inside = gap > 0.0
            out[inside] += weight / (math.pi * np.sqrt(gap[inside]))
            out[gap == 0.0] = np.inf
    return out
