"""Command-line interface for the Page-Wootters clock/oscillator toolkit.

Subcommands
-----------
enumerate    list the allowed (m+J, n) pairs for a coupling ratio
build        assemble a state from flags or a config file and summarize it
chi2         tabulate the clock-angle distribution chi^2(theta)
conditional  print the conditional oscillator state at a clock angle
schrodinger  finite-difference order study of the conditional evolution
beta         evaluate the joint overlap amplitude at one phase-space point
figure       reproduce a named data set (CSV plus a JSON sidecar)
orbits       sample the classical orbit family onto a CSV table
verify       run the internal consistency checks and emit a JSON report

Exit codes: 0 success, 1 runtime failure (including failed verification),
2 malformed arguments or config, 3 unknown figure name, 4 state that is not
entanglement-admissible (or otherwise cannot be assembled).

The PAW_THREADS environment variable caps the worker threads used by the
space-time marginal; results are identical for any worker count.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .classical import (
    beta_amplitude,
    beta_double_integral,
    orbit_family,
    surviving_configurations,
    write_orbit_csv,
)
from .constraints import (
    NoOddOverEvenForm,
    brute_force_pairs,
    enumerate_pairs,
    reduce_ratio,
)
from .marginals import (
    EOutOfRange,
    GridAxis,
    default_energy_axis,
    default_phase_space_axes,
    default_time_axis,
    marginal_energy_time,
    marginal_phase_space,
    marginal_space_time,
)
from .pawstate import (
    LOG_CHI_TOL,
    DegenerateTheta,
    NotAdmissible,
    PawState,
    UnsupportedIndex,
    ZeroState,
    assemble_state,
    balanced_two_level_state,
    chi_squared_integral,
    chi_squared_terms,
    conditional_state,
    default_dphi,
    dense_family_state,
    large_j_pair_state,
    paw_constraint_residual,
    schrodinger_order_study,
    shift_fock_levels,
    spin3_pair_state,
    state_from_dict,
    state_to_dict,
)
from .coherent import PlaneCoordinate, SphereCoordinate

FIGURE_NAMES = (
    "chi2-j3",
    "chi2-largeJ",
    "marg-pq",
    "marg-et",
    "marg-qt",
    "orbits-pq",
    "orbits-et",
)

_CONFIG_KEYS = {"state", "experiment", "grids", "out_dir", "tolerances", "tamper_shift_n"}
_GRID_KEYS = {
    "q_start", "q_stop", "q_count",
    "p_start", "p_stop", "p_count",
    "e_start", "e_stop", "e_count",
    "t_count", "theta_count", "samples",
}
_TOL_KEYS = {"log_chi", "dphi"}


class ConfigError(ValueError):
    """A scenario config file is malformed."""


@dataclass
class ScenarioConfig:
    """Declarative description of a run: state, grids, output, tolerances."""

    state: dict | None = None
    experiment: str | None = None
    grids: dict = field(default_factory=dict)
    out_dir: str = "."
    tolerances: dict = field(default_factory=dict)
    tamper_shift_n: int = 0

    @classmethod
    def from_dict(cls, doc: dict) -> "ScenarioConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config root must be a JSON object")
        unknown = set(doc) - _CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        grids = doc.get("grids", {})
        if not isinstance(grids, dict):
            raise ConfigError("'grids' must be an object")
        bad = set(grids) - _GRID_KEYS
        if bad:
            raise ConfigError(f"unknown grid keys: {sorted(bad)}")
        tolerances = doc.get("tolerances", {})
        if not isinstance(tolerances, dict):
            raise ConfigError("'tolerances' must be an object")
        bad = set(tolerances) - _TOL_KEYS
        if bad:
            raise ConfigError(f"unknown tolerance keys: {sorted(bad)}")
        state = doc.get("state")
        if state is not None and not isinstance(state, dict):
            raise ConfigError("'state' must be an object")
        out_dir = doc.get("out_dir", ".")
        if not isinstance(out_dir, str):
            raise ConfigError("'out_dir' must be a string")
        tamper = doc.get("tamper_shift_n", 0)
        if not isinstance(tamper, int) or isinstance(tamper, bool):
            raise ConfigError("'tamper_shift_n' must be an integer")
        experiment = doc.get("experiment")
        if experiment is not None and not isinstance(experiment, str):
            raise ConfigError("'experiment' must be a string")
        return cls(state=state, experiment=experiment, grids=dict(grids),
                   out_dir=out_dir, tolerances=dict(tolerances), tamper_shift_n=tamper)

    def to_dict(self) -> dict:
        return {
            "state": self.state,
            "experiment": self.experiment,
            "grids": dict(self.grids),
            "out_dir": self.out_dir,
            "tolerances": dict(self.tolerances),
            "tamper_shift_n": self.tamper_shift_n,
        }

    @classmethod
    def load(cls, path: str | Path) -> "ScenarioConfig":
        try:
            with open(path, "r", encoding="utf-8") as handle:
                doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(doc)

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(self.to_dict(), handle, indent=2, sort_keys=True)
            handle.write("\n")


def parse_rational(text: str) -> Fraction:
    """Parse 'N/D' or 'N' into a Fraction; argparse maps failures to exit 2."""
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num.strip()), int(den.strip()))
        return Fraction(int(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def parse_int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("empty integer list")
    return values


def parse_coefficient(text: str) -> tuple[int, complex]:
    """Parse 'K=RE' or 'K=RE+IMj' into an (m+J, amplitude) pair."""
    try:
        key, _, value = text.partition("=")
        return int(key.strip()), complex(value.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected K=COMPLEX, got {text!r}") from exc


def parse_tolerance(text: str) -> tuple[str, float]:
    key, _, value = text.partition("=")
    key = key.strip()
    if key not in _TOL_KEYS:
        raise argparse.ArgumentTypeError(f"unknown tolerance {key!r} (expected one of {sorted(_TOL_KEYS)})")
    try:
        return key, float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected {key}=FLOAT, got {text!r}") from exc


def parse_grid(text: str) -> tuple[str, float]:
    """Parse a --grid override like q_count=801 or e_stop=1.5."""
    key, _, value = text.partition("=")
    key = key.strip()
    if key not in _GRID_KEYS:
        raise argparse.ArgumentTypeError(f"unknown grid key {key!r} (expected one of {sorted(_GRID_KEYS)})")
    try:
        if key.endswith("_count") or key in ("t_count", "theta_count", "samples"):
            return key, int(value)
        return key, float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid value in {text!r}") from exc


def _load_config(args: argparse.Namespace) -> ScenarioConfig:
    path = getattr(args, "config", None)
    config = ScenarioConfig() if path is None else ScenarioConfig.load(path)
    overrides = getattr(args, "grid", None)
    if overrides:
        config = dataclasses.replace(config,
                                     grids={**config.grids, **dict(overrides)})
    return config


def _out_dir(args: argparse.Namespace, config: ScenarioConfig) -> Path:
    out = getattr(args, "out", None) or config.out_dir
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _resolve_state(args: argparse.Namespace, config: ScenarioConfig,
                   fallback=spin3_pair_state) -> PawState:
    """State precedence: explicit flags, then config file, then the fallback."""
    two_j = getattr(args, "two_j", None)
    if two_j is not None:
        return _state_from_flags(args)
    if config.state is not None:
        return state_from_dict(config.state)
    stray = [flag for flag, attr in (("--epsilon-over-omega", "epsilon_over_omega"),
                                     ("--kappa-r", "kappa_r"), ("--coeff", "coeff"))
             if getattr(args, attr, None)]
    if stray:
        raise ConfigError(f"{', '.join(stray)} requires --two-j")
    return fallback()


def _state_from_flags(args: argparse.Namespace) -> PawState:
    ratio = getattr(args, "epsilon_over_omega", None)
    if ratio is None:
        ratio = getattr(args, "kappa_r", None)
    if ratio is None:
        raise ConfigError("--epsilon-over-omega (or --kappa-r) is required with --two-j")
    mass = getattr(args, "m", None) or 1
    coeffs = getattr(args, "coeff", None)
    if coeffs:
        coefficients = dict(coeffs)
    else:
        # Default: equal weight on every allowed pair.
        family = enumerate_pairs(reduce_ratio(ratio), args.two_j)
        if not family.pairs:
            raise NotAdmissible(
                f"no allowed pairs for kappa*r = {ratio} at 2J = {args.two_j}")
        amp = 1.0 / math.sqrt(len(family.pairs))
        coefficients = {pair.m_plus_j: amp for pair in family.pairs}
    return assemble_state(two_j=args.two_j, mass=mass, eps_over_omega=ratio,
                          coefficients=coefficients)


def _grid_axis(grids: dict, prefix: str, default: GridAxis) -> GridAxis:
    start = grids.get(f"{prefix}_start", default.start)
    stop = grids.get(f"{prefix}_stop", default.stop)
    count = grids.get(f"{prefix}_count", default.count)
    return GridAxis(default.name, float(start), float(stop), int(count))


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")
    print(f"wrote {path}")


def _write_table(path: Path, columns: list[str], table: np.ndarray) -> None:
    np.savetxt(path, table, delimiter=",", fmt="%.17g",
               header=",".join(columns), comments="", newline="\n")
    print(f"wrote {path}")


def _state_summary(state: PawState) -> dict:
    return {
        "two_J": state.two_j,
        "M": state.mass,
        "epsilon_over_omega": [state.ratios.kappa_r.numerator,
                               state.ratios.kappa_r.denominator],
        "kappa": [state.ratios.kappa.numerator, state.ratios.kappa.denominator],
        "branches": [
            {"m_plus_J": key, "n": state.n_for(key), "weight": abs(value) ** 2}
            for key, value in state.coefficients
        ],
    }


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_enumerate(args: argparse.Namespace) -> int:
    try:
        ratio = reduce_ratio(args.kappa_r)
    except NoOddOverEvenForm as exc:
        print(f"no allowed pairs: {exc}")
        return 0
    family = enumerate_pairs(ratio, args.two_j)
    if not family.pairs:
        print(f"no allowed pairs for kappa*r = {args.kappa_r} at 2J = {args.two_j}")
        return 0
    print(f"kappa*r = {args.kappa_r} = (2*{ratio.i_n}+1)/(2*{ratio.i_m}), 2J = {args.two_j}")
    print(f"{'l':>4} {'m+J':>6} {'m':>8} {'n':>8}")
    for pair in family:
        m_value = str(family.m_fraction(pair))
        print(f"{pair.l:>4} {pair.m_plus_j:>6} {m_value:>8} {pair.n:>8}")
    print(f"{len(family)} pair(s); entanglement admissible: "
          f"{'yes' if len(family) >= 2 else 'no'}")
    return 0


def cmd_build(args: argparse.Namespace) -> int:
    config = _load_config(args)
    state = _resolve_state(args, config)
    summary = _state_summary(state)
    summary["constraint_residual"] = paw_constraint_residual(state)
    print(json.dumps(summary, indent=2, sort_keys=True))
    out = _out_dir(args, config)
    _write_json(out / "state.json", state_to_dict(state))
    return 0


def cmd_chi2(args: argparse.Namespace) -> int:
    config = _load_config(args)
    state = _resolve_state(args, config)
    count = args.theta_count or int(config.grids.get("theta_count", 1000))
    thetas = np.linspace(0.0, math.pi, count)
    terms = chi_squared_terms(state, thetas)
    table = np.column_stack([thetas, terms, terms.sum(axis=1)])
    columns = (["theta"]
               + [f"term_k{key}" for key in state.support]
               + ["chi2"])
    out = _out_dir(args, config)
    _write_table(out / "chi2.csv", columns, table)
    total = chi_squared_integral(state)
    print(f"integral of chi^2 over the sphere measure: {total:.12f}")
    return 0


def cmd_conditional(args: argparse.Namespace) -> int:
    config = _load_config(args)
    state = _resolve_state(args, config)
    tolerances = dict(config.tolerances)
    for key, value in (args.tol or []):
        tolerances[key] = value
    log_tol = float(tolerances.get("log_chi", LOG_CHI_TOL))
    cond = conditional_state(state, args.theta, args.phi, log_tol=log_tol)
    print(f"theta = {args.theta:.12g}, phi = {args.phi:.12g}, "
          f"chi^2 = {cond.norm_chi2:.12g}")
    print(f"{'n':>6} {'re':>24} {'im':>24} {'prob':>22}")
    for level, amp in cond.amplitudes:
        print(f"{level:>6} {amp.real:>24.16e} {amp.imag:>24.16e} "
              f"{abs(amp) ** 2:>22.16e}")
    print(f"norm = {cond.norm():.15f}")
    return 0


def cmd_schrodinger(args: argparse.Namespace) -> int:
    config = _load_config(args)
    state = _resolve_state(args, config)
    base = args.dphi if args.dphi is not None else default_dphi(state)
    steps = tuple(base / 2 ** i for i in range(args.halvings))
    study = schrodinger_order_study(state, args.theta, args.phi, steps=steps)
    payload = {
        "theta": args.theta,
        "phi": args.phi,
        "steps": list(study.steps),
        "residuals": list(study.residuals),
        "order": study.order,
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def cmd_beta(args: argparse.Namespace) -> int:
    config = _load_config(args)
    state = _resolve_state(args, config)
    point = SphereCoordinate(args.theta, args.phi)
    m_omega = state.mass * state.omega
    coord = PlaneCoordinate.from_dimensionless(args.big_q, args.big_p, m_omega)
    amp = beta_amplitude(state, point, coord.alpha)
    payload = {
        "theta": args.theta,
        "phi": args.phi,
        "Q": args.big_q,
        "P": args.big_p,
        "log_magnitude": amp.log_magnitude,
        "phase": amp.phase,
        "magnitude_squared": amp.magnitude_squared,
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def cmd_orbits(args: argparse.Namespace) -> int:
    config = _load_config(args)
    state = _resolve_state(args, config, fallback=lambda: dense_family_state(args.m or 170))
    samples = args.samples or int(config.grids.get("samples", 256))
    configs = orbit_family(state, samples=samples)
    out = _out_dir(args, config)
    write_orbit_csv(configs, out / "orbits.csv")
    print(f"wrote {out / 'orbits.csv'}")
    levels = surviving_configurations(state)
    payload = {
        "samples": samples,
        "levels": [{"n": lv.n, "energy": lv.energy,
                    "energy_classical": lv.energy_classical,
                    "radius_q": lv.radius_q} for lv in levels],
        "state": _state_summary(state),
    }
    _write_json(out / "orbits.json", payload)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    config = _load_config(args)
    state = _resolve_state(args, config)
    shift = args.tamper_shift_n if args.tamper_shift_n else config.tamper_shift_n
    if shift:
        state = shift_fock_levels(state, shift)
    tolerances = dict(config.tolerances)
    for key, value in (args.tol or []):
        tolerances[key] = value

    checks = []

    residual = paw_constraint_residual(state)
    checks.append({
        "name": "constraint_residual_zero",
        "passed": residual == 0.0,
        "detail": f"max |kappa*r*(m+J) - (n+1/2)|*omega = {residual:.6g}",
    })

    family = state.family
    n_max = math.ceil(float(state.ratios.kappa_r) * state.two_j) + 1
    brute = brute_force_pairs(state.ratios.kappa_r, state.two_j, n_max)
    enumerated = family.mn_pairs()
    checks.append({
        "name": "pair_enumeration_matches_search",
        "passed": brute == enumerated,
        "detail": f"{len(enumerated)} pair(s) from the closed form, "
                  f"{len(brute)} from direct search",
    })

    total = chi_squared_integral(state)
    checks.append({
        "name": "chi_squared_normalized",
        "passed": abs(total - 1.0) <= 1e-8,
        "detail": f"integral = {total:.12f}",
    })

    theta, phi = args.theta, args.phi
    try:
        cond = conditional_state(state, theta, phi,
                                 log_tol=float(tolerances.get("log_chi", LOG_CHI_TOL)))
        norm = cond.norm()
        checks.append({
            "name": "conditional_norm_unit",
            "passed": abs(norm - 1.0) <= 1e-12,
            "detail": f"norm at theta={theta:.4f} is {norm:.15f}",
        })
    except DegenerateTheta as exc:
        checks.append({
            "name": "conditional_norm_unit",
            "passed": False,
            "detail": f"conditional state undefined: {exc}",
        })

    study = schrodinger_order_study(state, theta, phi)
    checks.append({
        "name": "schrodinger_order_two",
        "passed": abs(study.order - 2.0) <= 0.1,
        "detail": f"finite-difference convergence order = {study.order:.4f}",
    })

    if not args.skip_beta:
        total_beta = beta_double_integral(state)
        checks.append({
            "name": "beta_normalized",
            "passed": abs(total_beta - 1.0) <= 1e-6,
            "detail": f"double integral of |beta|^2 = {total_beta:.9f}",
        })

    all_passed = all(check["passed"] for check in checks)
    report = {"checks": checks, "all_passed": all_passed,
              "state": _state_summary(state)}
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0 if all_passed else 1


# ---------------------------------------------------------------------------
# figures
# ---------------------------------------------------------------------------

def _sidecar_base(name: str, state: PawState | None) -> dict:
    payload: dict = {"figure": name}
    if state is not None:
        if state.omega == 1.0:
            payload["state"] = state_to_dict(state)
        else:
            payload["state"] = _state_summary(state)
    return payload


def _figure_chi2_j3(args, config, out: Path) -> int:
    state = _resolve_state(args, config)
    count = args.theta_count or int(config.grids.get("theta_count", 1000))
    thetas = np.linspace(0.0, math.pi, count)
    terms = chi_squared_terms(state, thetas)
    table = np.column_stack([thetas, terms, terms.sum(axis=1)])
    columns = ["theta"] + [f"term_k{k}" for k in state.support] + ["chi2"]
    _write_table(out / "chi2-j3.csv", columns, table)
    payload = _sidecar_base("chi2-j3", state)
    payload["columns"] = columns
    payload["theta_count"] = count
    _write_json(out / "chi2-j3.json", payload)
    return 0


def _figure_chi2_largej(args, config, out: Path) -> int:
    j_list = args.j_list or (30, 120, 570)
    count = args.theta_count or int(config.grids.get("theta_count", 2001))
    thetas = np.linspace(0.0, math.pi, count)
    states = [large_j_pair_state(j) for j in j_list]
    columns = ["theta"] + [f"chi2_j{j}" for j in j_list]
    data = [thetas]
    for state in states:
        data.append(chi_squared_terms(state, thetas).sum(axis=1))
    _write_table(out / "chi2-largeJ.csv", columns, np.column_stack(data))
    payload = _sidecar_base("chi2-largeJ", None)
    payload["columns"] = columns
    payload["j_list"] = list(j_list)
    payload["theta_count"] = count
    _write_json(out / "chi2-largeJ.json", payload)
    return 0


def _marginal_state(args, config) -> PawState:
    return _resolve_state(args, config,
                          fallback=lambda: balanced_two_level_state(args.m or 170))


def _figure_marg_pq(args, config, out: Path) -> int:
    state = _marginal_state(args, config)
    q_default, p_default = default_phase_space_axes()
    q_axis = _grid_axis(config.grids, "q", q_default)
    p_axis = _grid_axis(config.grids, "p", p_default)
    grid = marginal_phase_space(state, q_axis, p_axis)
    grid.write_csv(out / "marg-pq.csv")
    print(f"wrote {out / 'marg-pq.csv'}")
    payload = _sidecar_base("marg-pq", state)
    payload["axes"] = grid.metadata()
    payload["mass"] = grid.mass()
    _write_json(out / "marg-pq.json", payload)
    return 0


def _figure_marg_et(args, config, out: Path) -> int:
    state = _marginal_state(args, config)
    e_axis = _grid_axis(config.grids, "e", default_energy_axis(state))
    grid = marginal_energy_time(state, e_axis)
    grid.write_csv(out / "marg-et.csv")
    print(f"wrote {out / 'marg-et.csv'}")
    payload = _sidecar_base("marg-et", state)
    payload["axes"] = grid.metadata()
    payload["mass"] = grid.mass()
    _write_json(out / "marg-et.json", payload)
    return 0


def _figure_marg_qt(args, config, out: Path) -> int:
    state = _marginal_state(args, config)
    q_default, _ = default_phase_space_axes()
    q_axis = _grid_axis(config.grids, "q", q_default)
    t_default = default_time_axis(state)
    t_axis = GridAxis(t_default.name, t_default.start, t_default.stop,
                      int(config.grids.get("t_count", t_default.count)))
    grid, report = marginal_space_time(state, q_axis, t_axis)
    grid.write_csv(out / "marg-qt.csv")
    print(f"wrote {out / 'marg-qt.csv'}")
    payload = _sidecar_base("marg-qt", state)
    payload["axes"] = grid.metadata()
    payload["interference"] = dataclasses.asdict(report)
    _write_json(out / "marg-qt.json", payload)
    return 0


def _figure_orbits(args, config, out: Path, name: str) -> int:
    state = _resolve_state(args, config,
                           fallback=lambda: dense_family_state(args.m or 170))
    samples = args.samples or int(config.grids.get("samples", 256))
    configs = orbit_family(state, samples=samples)
    write_orbit_csv(configs, out / f"{name}.csv")
    print(f"wrote {out / f'{name}.csv'}")
    levels = surviving_configurations(state)
    payload = _sidecar_base(name, state if state.two_j <= 60 else None)
    payload["samples"] = samples
    payload["radii"] = [lv.radius_q for lv in levels]
    payload["energies"] = [lv.energy for lv in levels]
    _write_json(out / f"{name}.json", payload)
    return 0


def cmd_figure(args: argparse.Namespace) -> int:
    if args.name not in FIGURE_NAMES:
        print(f"unknown figure {args.name!r}; choose from {', '.join(FIGURE_NAMES)}",
              file=sys.stderr)
        return 3
    config = _load_config(args)
    out = _out_dir(args, config)
    if args.name == "chi2-j3":
        return _figure_chi2_j3(args, config, out)
    if args.name == "chi2-largeJ":
        return _figure_chi2_largej(args, config, out)
    if args.name == "marg-pq":
        return _figure_marg_pq(args, config, out)
    if args.name == "marg-et":
        return _figure_marg_et(args, config, out)
    if args.name == "marg-qt":
        return _figure_marg_qt(args, config, out)
    return _figure_orbits(args, config, out, args.name)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_state_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH",
                        help="JSON scenario config (unknown keys are rejected)")
    parser.add_argument("--two-j", dest="two_j", type=int, default=None,
                        help="total spin as the integer 2J")
    parser.add_argument("--m", dest="m", type=int, default=None,
                        help="oscillator mass M (integer)")
    parser.add_argument("--epsilon-over-omega", dest="epsilon_over_omega",
                        type=parse_rational, default=None, metavar="N/D",
                        help="clock level spacing over oscillator frequency")
    parser.add_argument("--kappa-r", dest="kappa_r", type=parse_rational,
                        default=None, metavar="N/D",
                        help="synonym for --epsilon-over-omega (kappa*r = eps/omega)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pawclock",
        description="Page-Wootters magnetic-clock / oscillator simulations")
    sub = parser.add_subparsers(dest="command", required=True)

    p_enum = sub.add_parser("enumerate", help="list allowed (m+J, n) pairs")
    p_enum.add_argument("--kappa-r", dest="kappa_r", type=parse_rational,
                        required=True, metavar="N/D")
    p_enum.add_argument("--two-j", dest="two_j", type=int, required=True)
    p_enum.set_defaults(func=cmd_enumerate)

    p_build = sub.add_parser("build", help="assemble and summarize a state")
    _add_state_flags(p_build)
    p_build.add_argument("--coeff", action="append", type=parse_coefficient,
                         metavar="K=COMPLEX",
                         help="amplitude on branch m+J=K (repeatable); "
                              "default is equal weight on every allowed pair")
    p_build.add_argument("--out", metavar="DIR", help="directory for state.json")
    p_build.set_defaults(func=cmd_build)

    p_chi2 = sub.add_parser("chi2", help="tabulate chi^2(theta)")
    _add_state_flags(p_chi2)
    p_chi2.add_argument("--coeff", action="append", type=parse_coefficient,
                        metavar="K=COMPLEX")
    p_chi2.add_argument("--theta-count", type=int, default=None)
    p_chi2.add_argument("--grid", action="append", type=parse_grid,
                        metavar="KEY=VALUE")
    p_chi2.add_argument("--out", metavar="DIR")
    p_chi2.set_defaults(func=cmd_chi2)

    p_cond = sub.add_parser("conditional", help="conditional oscillator state")
    _add_state_flags(p_cond)
    p_cond.add_argument("--coeff", action="append", type=parse_coefficient,
                        metavar="K=COMPLEX")
    p_cond.add_argument("--theta", type=float, required=True)
    p_cond.add_argument("--phi", type=float, default=0.0)
    p_cond.add_argument("--tol", action="append", type=parse_tolerance,
                        metavar="KEY=VALUE", help="e.g. log_chi=-690")
    p_cond.set_defaults(func=cmd_conditional)

    p_schro = sub.add_parser("schrodinger",
                             help="finite-difference order study of the evolution")
    _add_state_flags(p_schro)
    p_schro.add_argument("--coeff", action="append", type=parse_coefficient,
                         metavar="K=COMPLEX")
    p_schro.add_argument("--theta", type=float, default=math.pi / 2)
    p_schro.add_argument("--phi", type=float, default=0.7)
    p_schro.add_argument("--dphi", type=float, default=None,
                         help="largest finite-difference step (default scales "
                              "with the fastest branch phase)")
    p_schro.add_argument("--halvings", type=int, default=4,
                         help="number of step halvings in the study")
    p_schro.set_defaults(func=cmd_schrodinger)

    p_beta = sub.add_parser("beta", help="joint overlap amplitude at one point")
    _add_state_flags(p_beta)
    p_beta.add_argument("--coeff", action="append", type=parse_coefficient,
                        metavar="K=COMPLEX")
    p_beta.add_argument("--theta", type=float, required=True)
    p_beta.add_argument("--phi", type=float, default=0.0)
    p_beta.add_argument("--big-q", dest="big_q", type=float, default=0.0,
                        metavar="Q", help="dimensionless position sqrt(M omega) q")
    p_beta.add_argument("--big-p", dest="big_p", type=float, default=0.0,
                        metavar="P", help="dimensionless momentum p / sqrt(M omega)")
    p_beta.set_defaults(func=cmd_beta)

    p_fig = sub.add_parser("figure", help="reproduce a named data set")
    p_fig.add_argument("name", help=f"one of: {', '.join(FIGURE_NAMES)}")
    _add_state_flags(p_fig)
    p_fig.add_argument("--coeff", action="append", type=parse_coefficient,
                       metavar="K=COMPLEX")
    p_fig.add_argument("--j-list", dest="j_list", type=parse_int_list,
                       default=None, metavar="J1,J2,...",
                       help="spin values for chi2-largeJ (default 30,120,570)")
    p_fig.add_argument("--theta-count", type=int, default=None)
    p_fig.add_argument("--samples", type=int, default=None,
                       help="time samples per orbit for orbits-* figures")
    p_fig.add_argument("--grid", action="append", type=parse_grid,
                       metavar="KEY=VALUE",
                       help="override one grid parameter, e.g. q_count=801")
    p_fig.add_argument("--out", metavar="DIR")
    p_fig.set_defaults(func=cmd_figure)

    p_orb = sub.add_parser("orbits", help="sample the classical orbit family")
    _add_state_flags(p_orb)
    p_orb.add_argument("--coeff", action="append", type=parse_coefficient,
                       metavar="K=COMPLEX")
    p_orb.add_argument("--samples", type=int, default=None)
    p_orb.add_argument("--grid", action="append", type=parse_grid,
                       metavar="KEY=VALUE")
    p_orb.add_argument("--out", metavar="DIR")
    p_orb.set_defaults(func=cmd_orbits)

    p_verify = sub.add_parser("verify", help="internal consistency checks")
    _add_state_flags(p_verify)
    p_verify.add_argument("--coeff", action="append", type=parse_coefficient,
                          metavar="K=COMPLEX")
    p_verify.add_argument("--theta", type=float, default=math.pi / 2)
    p_verify.add_argument("--phi", type=float, default=0.7)
    p_verify.add_argument("--tol", action="append", type=parse_tolerance,
                          metavar="KEY=VALUE")
    p_verify.add_argument("--tamper-shift-n", dest="tamper_shift_n", type=int,
                          default=0,
                          help="shift every Fock index by this amount before "
                               "checking (diagnostic; breaks the constraint)")
    p_verify.add_argument("--skip-beta", action="store_true",
                          help="skip the double-integral normalization check")
    p_verify.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NotAdmissible as exc:
        print(f"error: state is not admissible: {exc}", file=sys.stderr)
        return 4
    except (UnsupportedIndex, ZeroState, NoOddOverEvenForm) as exc:
        print(f"error: state cannot be assembled: {exc}", file=sys.stderr)
        return 4
    except (DegenerateTheta, EOutOfRange) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
