"""Global entangled states of the magnetic clock and the oscillator.

The Page-Wootters construction pairs each admissible clock level |J, m> with
the oscillator level n_m = kappa*r*(m+J) - 1/2 fixed by the stationarity
constraint and superposes the pairs, |Psi>> = sum_m c_m |J, m>|n_m>.
Conditioning on a clock coherent-state reading (theta, phi) yields a
normalized oscillator state whose amplitudes have fixed moduli and phases
that advance linearly in phi, so the conditional state obeys the oscillator
Schroedinger equation in the rescaled time t = phi/epsilon.

This module builds such states, evaluates the clock-sphere density
chi^2(theta), extracts conditional states, and provides the exact-rational
and finite-difference diagnostics that certify both the constraint and the
emergent equation of motion.  All branch magnitudes are handled in log space
so states remain usable up to 2J above one thousand.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy.special import logsumexp

from .coherent import scs_log_magnitude
from .constraints import (
    AllowedPair,
    ClockSpec,
    CouplingRatios,
    NoOddOverEvenForm,
    OscillatorSpec,
    PairFamily,
    enumerate_pairs,
    reduce_ratio,
)

# Conditional states are undefined where chi^2 vanishes; anything whose log
# falls below this is treated as a true zero rather than an underflow.
LOG_CHI_TOL = -690.0

_SERIAL_KEYS = {"two_J", "epsilon_over_omega", "M", "coefficients"}
_COEFF_KEYS = {"m_plus_J", "re", "im"}


class NotAdmissible(ValueError):
    """The requested parameters admit fewer than two occupied level pairs."""


class UnsupportedIndex(KeyError):
    """A coefficient was supplied for a clock level outside the allowed family."""


class ZeroState(ValueError):
    """Every supplied coefficient is zero."""


class DegenerateTheta(ValueError):
    """chi^2(theta) vanishes here, so no conditional state exists."""


@dataclass(frozen=True)
class HamiltonianAction:
    """Diagonal action of the two commuting Hamiltonians on the pair basis.

    The clock Hamiltonian acts as eps*(m+J) on |J, m> (zero on the bottom
    level) and the oscillator Hamiltonian as omega*(n+1/2) on |n>.  On every
    allowed pair the two eigenvalues coincide, which is exactly the
    stationarity constraint.
    """

    clock: ClockSpec
    oscillator: OscillatorSpec

    def clock_eigenvalue(self, m_plus_j: int) -> float:
        return self.clock.level_energy(m_plus_j)

    def oscillator_eigenvalue(self, n: int) -> float:
        return self.oscillator.level_energy(n)

    def kernel_mismatch(self, pair: AllowedPair) -> float:
        """Float eigenvalue gap on one pair; zero on any constraint solution."""
        return self.clock_eigenvalue(pair.m_plus_j) - self.oscillator_eigenvalue(pair.n)


@dataclass(frozen=True)
class PawState:
    """Normalized entangled clock-oscillator state over an allowed-pair family.

    ``coefficients`` holds (m_plus_j, c) entries sorted by m_plus_j, restricted
    to the occupied (nonzero) branches.  Use build_state/assemble_state rather
    than the raw constructor: they enforce admissibility and normalization.
    """

    clock: ClockSpec
    oscillator: OscillatorSpec
    ratios: CouplingRatios
    family: PairFamily
    coefficients: tuple[tuple[int, complex], ...]

    # -- convenience views -------------------------------------------------

    @property
    def two_j(self) -> int:
        return self.clock.two_j

    @property
    def mass(self) -> int:
        return self.oscillator.mass

    @property
    def epsilon(self) -> float:
        return self.clock.epsilon

    @property
    def omega(self) -> float:
        return self.oscillator.omega

    @property
    def hamiltonian(self) -> HamiltonianAction:
        return HamiltonianAction(self.clock, self.oscillator)

    @cached_property
    def support(self) -> tuple[int, ...]:
        """Occupied clock ladder indices m+J, ascending."""
        return tuple(k for k, _ in self.coefficients)

    @cached_property
    def _pair_index(self) -> dict[int, AllowedPair]:
        return {pair.m_plus_j: pair for pair in self.family.pairs}

    def pair_for(self, m_plus_j: int) -> AllowedPair:
        try:
            return self._pair_index[m_plus_j]
        except KeyError:
            raise UnsupportedIndex(m_plus_j) from None

    def n_for(self, m_plus_j: int) -> int:
        return self.pair_for(m_plus_j).n

    def coefficient(self, m_plus_j: int) -> complex:
        for k, c in self.coefficients:
            if k == m_plus_j:
                return c
        raise UnsupportedIndex(m_plus_j)

    def coefficient_map(self) -> dict[int, complex]:
        return dict(self.coefficients)

    @cached_property
    def amplitudes(self) -> np.ndarray:
        """Occupied coefficients as a complex vector aligned with ``support``."""
        return np.array([c for _, c in self.coefficients], dtype=complex)

    @cached_property
    def n_values(self) -> tuple[int, ...]:
        """Fock level of each occupied branch, aligned with ``support``."""
        return tuple(self.pair_for(k).n for k in self.support)

    @cached_property
    def _support_array(self) -> np.ndarray:
        return np.array(self.support, dtype=float)

    @cached_property
    def _log_weights(self) -> np.ndarray:
        """log |c_m|^2 per occupied branch."""
        return 2.0 * np.log(np.abs(self.amplitudes))


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def build_state(clock: ClockSpec, oscillator: OscillatorSpec,
                kappa_r, coefficients) -> PawState:
    """Validate, normalize and freeze an entangled clock-oscillator state.

    ``kappa_r`` is the exact rational eps/omega (anything Fraction accepts,
    or a (numerator, denominator) tuple); ``coefficients`` maps the ladder
    index m+J to a complex amplitude.  The float pair (epsilon, omega) must
    agree with kappa_r to relative 1e-9.

    Raises NotAdmissible if the family has fewer than two pairs or fewer than
    two branches are occupied, UnsupportedIndex for a coefficient outside the
    family, and ZeroState when every coefficient vanishes.
    """
    kr = Fraction(*kappa_r) if isinstance(kappa_r, tuple) else Fraction(kappa_r)
    ratio_float = clock.epsilon / oscillator.omega
    if abs(ratio_float - float(kr)) > 1e-9 * float(kr):
        raise ValueError(
            f"epsilon/omega = {ratio_float!r} does not match the exact ratio {kr}")
    try:
        family = enumerate_pairs(reduce_ratio(kr), clock.two_j)
    except NoOddOverEvenForm as exc:
        raise NotAdmissible(str(exc)) from exc
    if len(family.pairs) < 2:
        raise NotAdmissible(
            f"kappa*r = {kr} admits {len(family.pairs)} pair(s) at 2J = "
            f"{clock.two_j}; an entangled state needs at least two")

    allowed = {pair.m_plus_j for pair in family.pairs}
    occupied: list[tuple[int, complex]] = []
    for key in sorted(coefficients):
        if key not in allowed:
            raise UnsupportedIndex(key)
        value = complex(coefficients[key])
        if value != 0:
            occupied.append((int(key), value))
    if not occupied:
        raise ZeroState("all coefficients are zero")
    if len(occupied) < 2:
        raise NotAdmissible("an entangled state needs at least two occupied branches")

    norm = math.sqrt(sum(abs(c) ** 2 for _, c in occupied))
    normalized = tuple((k, c / norm) for k, c in occupied)
    ratios = CouplingRatios.from_parameters(kr, clock.two_j, oscillator.mass)
    return PawState(clock=clock, oscillator=oscillator, ratios=ratios,
                    family=family, coefficients=normalized)


def assemble_state(two_j: int, mass: int, eps_over_omega, coefficients,
                   omega: float = 1.0) -> PawState:
    """Shorthand constructor taking sizes and the exact ratio eps/omega."""
    kr = (Fraction(*eps_over_omega) if isinstance(eps_over_omega, tuple)
          else Fraction(eps_over_omega))
    clock = ClockSpec(two_j=two_j, epsilon=float(kr) * omega)
    oscillator = OscillatorSpec(mass=mass, omega=omega)
    return build_state(clock, oscillator, kr, coefficients)


# ---------------------------------------------------------------------------
# example states
# ---------------------------------------------------------------------------

def spin3_pair_state(omega: float = 1.0) -> PawState:
    """The two-branch J=3 reference state: kappa*r = 3/4, levels (m+J, n) = (2, 1), (6, 4)."""
    amp = 1.0 / math.sqrt(2.0)
    return assemble_state(two_j=6, mass=1, eps_over_omega=Fraction(3, 4),
                          coefficients={2: amp, 6: amp}, omega=omega)


def balanced_two_level_state(mass: int, omega: float = 1.0) -> PawState:
    """Equal superposition of the oscillator levels n = M and n = M/2.

    Uses kappa*r = 1/2 with 2J = 3M, so kappa = 3/4 and the two occupied
    energies are M*omega and M*omega/2.  M must be even so that both Fock
    levels are integers.
    """
    if mass < 2 or mass % 2:
        raise ValueError("mass must be an even integer >= 2")
    amp = 1.0 / math.sqrt(2.0)
    return assemble_state(two_j=3 * mass, mass=mass, eps_over_omega=Fraction(1, 2),
                          coefficients={mass + 1: amp, 2 * mass + 1: amp},
                          omega=omega)


def dense_family_state(mass: int, omega: float = 1.0) -> PawState:
    """Equal-weight superposition of every allowed pair for kappa*r = 1/2, 2J = 3M.

    With kappa = 3/4 and r = 2/3 the occupied Fock ladder runs n = 0, 1, ...,
    floor((3M-1)/2), so the classical radii sqrt(2n/M) densely fill (0, sqrt(3)).
    """
    if mass < 1:
        raise ValueError("mass must be a positive integer")
    family = enumerate_pairs(reduce_ratio(Fraction(1, 2)), 3 * mass)
    amp = 1.0 / math.sqrt(len(family.pairs))
    coefficients = {pair.m_plus_j: amp for pair in family.pairs}
    return assemble_state(two_j=3 * mass, mass=mass, eps_over_omega=Fraction(1, 2),
                          coefficients=coefficients, omega=omega)


def large_j_pair_state(j_value: int, omega: float = 1.0) -> PawState:
    """Two-branch state with eps*J = 3*omega/4 at any spin J divisible by 3.

    The occupied pairs are (m+J, n) = (2J/3, 0) and (2J, 1) for every such J,
    so the family is directly comparable across sizes: the clock-sphere
    density keeps its peaks near arccos(1/3) and pi while they sharpen.
    """
    if j_value < 3 or j_value % 3:
        raise ValueError("j_value must be a positive multiple of 3")
    amp = 1.0 / math.sqrt(2.0)
    return assemble_state(two_j=2 * j_value, mass=1,
                          eps_over_omega=Fraction(3, 4 * j_value),
                          coefficients={2 * j_value // 3: amp, 2 * j_value: amp},
                          omega=omega)


# ---------------------------------------------------------------------------
# chi^2: the clock-sphere probability density
# ---------------------------------------------------------------------------

def log_chi_squared(state: PawState, theta):
    """log chi^2(theta) for scalar or array theta.

    chi^2(theta) = sum_m |c_m|^2 |<Omega|J, m>|^2 is independent of phi; the
    sum is accumulated with log-sum-exp so branches may underflow separately
    without losing the total.
    """
    theta_arr = np.asarray(theta, dtype=float)
    lm = scs_log_magnitude(theta_arr[..., None], state.two_j, state._support_array)
    out = logsumexp(2.0 * lm + state._log_weights, axis=-1)
    return float(out) if np.isscalar(theta) or theta_arr.ndim == 0 else out


def chi_squared(state: PawState, theta):
    """chi^2(theta) for scalar or array theta."""
    return np.exp(log_chi_squared(state, theta))


def chi_squared_terms(state: PawState, theta):
    """Per-branch contributions |c_m|^2 |<Omega|J, m>|^2, last axis = branch."""
    theta_arr = np.asarray(theta, dtype=float)
    lm = scs_log_magnitude(theta_arr[..., None], state.two_j, state._support_array)
    return np.exp(2.0 * lm + state._log_weights)


def chi_squared_integral(state: PawState, order: int | None = None) -> float:
    """Integral of chi^2 over the clock sphere measure; 1 for any valid state."""
    from .coherent import sphere_quadrature

    thetas, weights = sphere_quadrature(state.two_j, order)
    return float(np.sum(weights * chi_squared(state, thetas)))


# ---------------------------------------------------------------------------
# conditional dynamics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConditionalState:
    """Normalized oscillator state conditioned on the clock reading (theta, phi).

    ``amplitudes`` holds (n, amplitude) entries sorted by branch; ``norm_chi2``
    is the chi^2(theta) that normalized them.
    """

    theta: float
    phi: float
    amplitudes: tuple[tuple[int, complex], ...]
    norm_chi2: float

    @cached_property
    def n_values(self) -> tuple[int, ...]:
        return tuple(n for n, _ in self.amplitudes)

    @cached_property
    def vector(self) -> np.ndarray:
        return np.array([a for _, a in self.amplitudes], dtype=complex)

    def amplitude(self, n: int) -> complex:
        for level, a in self.amplitudes:
            if level == n:
                return a
        raise KeyError(n)

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))


def conditional_state(state: PawState, theta: float, phi: float,
                      log_tol: float = LOG_CHI_TOL) -> ConditionalState:
    """Project the global state on the clock coherent state at (theta, phi).

    The branch amplitudes are c_m <Omega|J, m> / chi(theta); division happens
    in log space, so the result is exactly normalized even when individual
    overlaps underflow.  Raises DegenerateTheta where chi^2 vanishes (at
    theta = 0, and at theta = pi when the top level is unoccupied).
    """
    lm = scs_log_magnitude(theta, state.two_j, state._support_array)
    log_terms = state._log_weights + 2.0 * lm
    log_chi2 = float(logsumexp(log_terms))
    if log_chi2 < log_tol:
        raise DegenerateTheta(
            f"log chi^2 = {log_chi2:.1f} at theta = {theta!r}: below tolerance")

    entries = []
    for i, (k, c) in enumerate(state.coefficients):
        magnitude = math.exp(math.log(abs(c)) + float(lm[i]) - 0.5 * log_chi2)
        phase = cmath.phase(c) - k * phi
        entries.append((state.n_values[i], magnitude * cmath.exp(1j * phase)))
    return ConditionalState(theta=theta, phi=phi, amplitudes=tuple(entries),
                            norm_chi2=math.exp(log_chi2))


def default_dphi(state: PawState) -> float:
    """Finite-difference step resolving the fastest branch phase, eps*J*2J."""
    fastest = state.clock.epsilon * (state.two_j / 2.0) * state.two_j
    return 1e-3 * 2.0 * math.pi / fastest


def schrodinger_residual(state: PawState, theta: float, phi: float,
                         dphi: float | None = None) -> float:
    """Defect of the emergent Schroedinger equation at one clock reading.

    Returns || i*eps * d/dphi |phi_theta(phi)> - H |phi_theta(phi)> ||_2 with
    the derivative taken by a central difference of step dphi and H acting
    diagonally as omega*(n+1/2).  The analytic defect is zero; the returned
    value is the finite-difference error, which shrinks as dphi^2.
    """
    if dphi is None:
        dphi = default_dphi(state)
    if dphi <= 0:
        raise ValueError("dphi must be positive")
    center = conditional_state(state, theta, phi)
    plus = conditional_state(state, theta, phi + dphi)
    minus = conditional_state(state, theta, phi - dphi)
    derivative = (plus.vector - minus.vector) / (2.0 * dphi)
    h_diag = np.array([state.oscillator.level_energy(n) for n in center.n_values])
    residual = 1j * state.clock.epsilon * derivative - h_diag * center.vector
    return float(np.linalg.norm(residual))


@dataclass(frozen=True)
class OrderStudy:
    """Residuals of the emergent equation under step halving, with fitted order."""

    steps: tuple[float, ...]
    residuals: tuple[float, ...]
    order: float


def schrodinger_order_study(state: PawState, theta: float, phi: float,
                            steps=None) -> OrderStudy:
    """Halve dphi repeatedly and fit the convergence order of the residual.

    A correct central-difference implementation gives order 2: each halving
    divides the residual by 4.
    """
    if steps is None:
        base = default_dphi(state)
        steps = tuple(base / 2 ** i for i in range(4))
    steps = tuple(float(s) for s in steps)
    residuals = tuple(schrodinger_residual(state, theta, phi, dphi=s) for s in steps)
    slope = np.polyfit(np.log(steps), np.log(residuals), 1)[0]
    return OrderStudy(steps=steps, residuals=residuals, order=float(slope))


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------

def paw_constraint_residual(state: PawState) -> float:
    """Worst violation of eps*(m+J) = omega*(n+1/2) over the occupied branches.

    The gap is evaluated in exact rational arithmetic (through kappa*r) and
    only converted to float at the end, so any state produced by build_state
    returns exactly 0.0 and a state whose Fock levels were shifted by one
    returns exactly omega.
    """
    worst = Fraction(0)
    for k in state.support:
        pair = state.pair_for(k)
        gap = abs(state.ratios.kappa_r * k - (Fraction(pair.n) + Fraction(1, 2)))
        worst = max(worst, gap)
    return float(worst) * state.oscillator.omega


def shift_fock_levels(state: PawState, delta: int) -> PawState:
    """Forge a copy with every Fock level shifted by ``delta`` levels.

    The result deliberately violates the stationarity constraint (unless
    delta = 0); it exists so integrity checks have a guaranteed-bad input.
    """
    pairs = tuple(replace(p, n=p.n + delta) for p in state.family.pairs)
    if any(p.n < 0 for p in pairs):
        raise ValueError("shift would produce a negative Fock level")
    forged_family = PairFamily(ratio=state.family.ratio, two_j=state.family.two_j,
                               pairs=pairs)
    forged = replace(state, family=forged_family)
    return forged


def schmidt_rank(state: PawState, tol: float = 1e-12) -> int:
    """Schmidt rank of the state across the clock/oscillator split.

    Because each occupied clock level is paired with a distinct Fock level,
    the coefficient matrix is a permuted diagonal and the rank equals the
    number of occupied branches; the SVD below verifies that rather than
    assuming it.
    """
    size = len(state.support)
    columns = {n: j for j, n in enumerate(sorted(set(state.n_values)))}
    matrix = np.zeros((size, len(columns)), dtype=complex)
    for i, (_, c) in enumerate(state.coefficients):
        matrix[i, columns[state.n_values[i]]] = c
    singular = np.linalg.svd(matrix, compute_uv=False)
    return int(np.sum(singular > tol * singular[0]))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def state_to_dict(state: PawState) -> dict:
    """JSON-ready document with the exact ratio kept as [numerator, denominator].

    Only omega = 1 states serialize: the document stores eps/omega but not the
    absolute frequency, so any other omega could not round-trip faithfully.
    """
    if state.oscillator.omega != 1.0:
        raise ValueError("only omega = 1.0 states have a faithful document form")
    kr = state.ratios.kappa_r
    return {
        "two_J": state.two_j,
        "epsilon_over_omega": [kr.numerator, kr.denominator],
        "M": state.mass,
        "coefficients": [
            {"m_plus_J": k, "re": c.real, "im": c.imag}
            for k, c in state.coefficients
        ],
    }


def state_from_dict(document: dict) -> PawState:
    """Rebuild a state from its document form, rejecting unknown keys."""
    keys = set(document)
    if keys != _SERIAL_KEYS:
        unexpected = sorted(keys - _SERIAL_KEYS)
        missing = sorted(_SERIAL_KEYS - keys)
        raise ValueError(f"bad state document: unexpected keys {unexpected}, "
                         f"missing keys {missing}")
    num, den = document["epsilon_over_omega"]
    coefficients = {}
    for entry in document["coefficients"]:
        if set(entry) != _COEFF_KEYS:
            raise ValueError(f"bad coefficient entry keys: {sorted(entry)}")
        coefficients[int(entry["m_plus_J"])] = complex(entry["re"], entry["im"])
    return assemble_state(two_j=int(document["two_J"]), mass=int(document["M"]),
                          eps_over_omega=Fraction(int(num), int(den)),
                          coefficients=coefficients)


def save_state(state: PawState, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(state_to_dict(state), handle, indent=2, sort_keys=True)
        handle.write("\n")


def load_state(path) -> PawState:
    with open(path, encoding="utf-8") as handle:
        return state_from_dict(json.load(handle))
