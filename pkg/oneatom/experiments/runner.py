"""Batch commands behind the CLI: simulation tables, figure presets, reports."""
import csv
import itertools
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from littletable import Table

from oneatom.core.errors import ConfigError, ZeroProbabilityError
from oneatom.core.objects import AtomBasis, AtomFieldState, Branch, Ordering, SystemParams
from oneatom.data import OneAtomData
from oneatom.experiments.config import ScenarioConfig
from oneatom.experiments.offsets import measure_phase_offset
from oneatom.fock.space import inner_product, recommended_dim
from oneatom.fock.states import even_coherent_state, odd_coherent_state, yurke_stoler_state
from oneatom.measures import (
    average_parity,
    mean_photon_number,
    relative_total_noise,
    total_noise,
    wigner_grid,
)
from oneatom.model.analytic import (
    COHERENT_WIGNER_SIGMA,
    cat_to_fock,
    conditional_state,
    critical_radius,
    even_state_photon_number,
    odd_state_photon_number,
    ordering_correction,
    overlap_q,
    phase,
    total_noise_closed_form,
    trajectory,
    yurke_stoler_photon_number,
)
from oneatom.oracle.checks import CheckResult, run_all
from oneatom.oracle.propagator import PropagatorFactory, apply_u1, apply_u2, conditional_field, ground_state

SIGNIFICANT = "%.12g"
ORDERING_LABELS = {Ordering.with_ordering: "with", Ordering.without_ordering: "without"}

COLUMNS = [
    ("t_over_t0", "time in units of t0 = 2 pi / delta"),
    ("branch", "detected atomic state: plus = |1>, minus = |2>"),
    ("ordering", "with or without the time-ordering phase correction"),
    ("alpha_plus_re", "Re alpha_plus"),
    ("alpha_plus_im", "Im alpha_plus"),
    ("alpha_minus_re", "Re alpha_minus"),
    ("alpha_minus_im", "Im alpha_minus"),
    ("phi_mod_2pi", "relative phase phi (or phi-tilde without ordering) reduced to [0, 2 pi)"),
    ("T", "total noise <a^dag a> - |<a>|^2"),
    ("P", "average parity"),
    ("T_A", "relative total noise built from A = exp(i pi a^dag a) a"),
    ("n_mean", "mean photon number"),
    ("prob", "probability of the detection outcome"),
    ("q_re", "Re q, q = <alpha_plus|alpha_minus> exp(2 i phi)"),
    ("q_im", "Im q"),
    ("oracle_fidelity", "overlap with the field obtained by stepping H_K numerically"),
]


@dataclass
class ResultRow(OneAtomData):
    t_over_t0: float = 0.0
    branch: str = ""
    ordering: str = ""
    alpha_plus_re: float = 0.0
    alpha_plus_im: float = 0.0
    alpha_minus_re: float = 0.0
    alpha_minus_im: float = 0.0
    phi_mod_2pi: float = 0.0
    T: Optional[float] = None
    P: Optional[float] = None
    T_A: Optional[float] = None
    n_mean: Optional[float] = None
    prob: float = 0.0
    q_re: Optional[float] = None
    q_im: Optional[float] = None
    oracle_fidelity: Optional[float] = None


@dataclass
class CriticalReport(OneAtomData):
    fraction: float = 0.1
    r_c: float = 0.0
    amplitude: float = 0.0
    n_odd: float = 0.0
    n_even: float = 0.0
    n_yurke_stoler: float = 0.0
    n_odd_fock: float = 0.0
    n_even_fock: float = 0.0
    n_yurke_stoler_fock: float = 0.0
    disagreement: float = 0.0


@dataclass
class SweepRow(OneAtomData):
    r: float = 0.0
    ratio: float = 0.0
    strong_coupling: bool = False
    delta_phi_half: float = 0.0
    parity_offset: float = 0.0
    max_total_noise: float = 0.0
    odd_photon_number: float = 0.0


def _workers(config: ScenarioConfig) -> Optional[int]:
    return config.workers or None


def _warn_regime(params: SystemParams):
    if not params.strong_coupling:
        logging.warning(
            "Omega12=%.4g is not at least 5 times max(g=%.4g, Omega23=%.4g); the effective dynamics is approximate",
            params.omega12,
            params.g,
            params.omega23,
        )


def _steps_per_period(config: ScenarioConfig) -> int:
    return config.steps or config.steps_per_period


def oracle_states(config: ScenarioConfig, params: SystemParams, times: Sequence[float]) -> List[AtomFieldState]:
    """First-picture states at each grid time, from one sequential H_K run started in |1>|vac>."""
    dim = config.dim or recommended_dim(2.0 * params.r)
    propagator = PropagatorFactory.get("HK")
    propagator.setup(params, dim)
    state = ground_state(dim, AtomBasis.two_level)
    now, states = 0.0, []
    for fraction in times:
        target = fraction * params.t0
        if target > now:
            steps = max(1, math.ceil(_steps_per_period(config) * (target - now) / params.t0))
            state = propagator.evolve(state, target - now, steps, start=now).final_state
            now = target
        states.append(apply_u1(now, params, apply_u2(now, params, state)))
    logging.info("oracle propagated %d grid points at dim %d", len(states), dim)
    return states


def simulate_point(
    fraction: float,
    config: ScenarioConfig,
    params: SystemParams,
    oracle_state: Optional[AtomFieldState] = None,
) -> List[ResultRow]:
    t = fraction * params.t0
    rows = []
    for branch, ordering in itertools.product(config.branches(), config.orderings()):
        try:
            cat = conditional_state(t, params, branch, ordering)
        except ZeroProbabilityError as ex:
            logging.debug("skipping t/t0=%s: %s", fraction, ex)
            continue
        if oracle_state is not None:
            dim = oracle_state.dim
        else:
            dim = config.dim or recommended_dim(max(abs(cat.alpha_plus), abs(cat.alpha_minus)))
        field = cat_to_fock(cat, dim)
        row = ResultRow(
            t_over_t0=float(fraction),
            branch=branch.name,
            ordering=ORDERING_LABELS[ordering],
            alpha_plus_re=cat.alpha_plus.real,
            alpha_plus_im=cat.alpha_plus.imag,
            alpha_minus_re=cat.alpha_minus.real,
            alpha_minus_im=cat.alpha_minus.imag,
            phi_mod_2pi=phase(t, params, ordering),
            prob=cat.prob,
        )
        if "T" in config.measures:
            row.T = total_noise(field)
        if "P" in config.measures:
            row.P = average_parity(field)
        if "T_A" in config.measures:
            row.T_A = relative_total_noise(field)
        if "n" in config.measures:
            row.n_mean = mean_photon_number(field)
        if "q" in config.measures:
            q = overlap_q(t, params, ordering)
            row.q_re, row.q_im = q.real, q.imag
        if oracle_state is not None:
            row.oracle_fidelity = min(1.0, abs(inner_product(field, conditional_field(oracle_state, branch))) ** 2)
        rows.append(row)
    return rows


def cmd_simulate(config: ScenarioConfig) -> Table:
    """One row per (t, branch, ordering), in grid order."""
    params = config.params()
    _warn_regime(params)
    times = [float(t) for t in config.time_grid()]
    states = oracle_states(config, params, times) if config.oracle else [None] * len(times)
    with ThreadPoolExecutor(max_workers=_workers(config)) as executor:
        chunks = list(executor.map(lambda item: simulate_point(item[0], config, params, item[1]), zip(times, states)))
    table = Table("results")
    table.insert_many(row for chunk in chunks for row in chunk)
    table.create_index("branch")
    logging.info("simulated %d rows over %d grid points", len(table), len(times))
    return table


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return SIGNIFICANT % value
    return str(value)


def write_csv(path: str, rows, columns: Sequence[str], legend: Optional[Dict[str, str]] = None) -> str:
    """Comma-separated with a header, 12 significant digits, plus a ``.columns.txt`` legend."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format(getattr(row, c) if not isinstance(row, dict) else row[c]) for c in columns])
    if legend is not None:
        stem, _ = os.path.splitext(path)
        with open(stem + ".columns.txt", "w") as f:
            for name in columns:
                f.write("%s: %s\n" % (name, legend.get(name, "")))
    logging.info("wrote %s", path)
    return path


def write_results(config: ScenarioConfig, table: Table, path: Optional[str] = None) -> List[str]:
    path = path or config.output_path
    columns = [name for name, _ in COLUMNS if name != "oracle_fidelity" or config.oracle]
    written = [write_csv(path, table, columns, dict(COLUMNS))]
    if "wigner" in config.measures:
        written.extend(write_wigner(config, path))
    return written


def write_wigner(config: ScenarioConfig, path: str) -> List[str]:
    """Wigner grids of the conditional states at the last grid time."""
    params = config.params()
    t = config.t_end * params.t0
    extent = 2.0 * params.r + 4.0 * COHERENT_WIGNER_SIGMA
    stem, _ = os.path.splitext(path)
    written = []
    for branch, ordering in itertools.product(config.branches(), config.orderings()):
        try:
            cat = conditional_state(t, params, branch, ordering)
        except ZeroProbabilityError:
            continue
        dim = config.dim or recommended_dim(max(abs(cat.alpha_plus), abs(cat.alpha_minus)))
        span = (-extent, extent)
        points = config.wigner_points
        grid = wigner_grid(cat_to_fock(cat, dim), span, span, points, points, _workers(config))
        rows = [
            {"re": x, "im": y, "W": float(grid.values[i, j])}
            for i, x in enumerate(grid.re_axis.tolist())
            for j, y in enumerate(grid.im_axis.tolist())
        ]
        name = "%s.wigner_%s_%s.csv" % (stem, branch.name, ORDERING_LABELS[ordering])
        legend = {"re": "Re alpha", "im": "Im alpha", "W": "Wigner function, coherent-state peak 2"}
        written.append(write_csv(name, rows, ["re", "im", "W"], legend))
        logging.info("wigner grid %s: normalization %.6f", name, grid.normalization())
    return written


FIGURES = ("fig2", "fig3", "fig4", "fig5")


def figure_scenarios(which: str, out_dir: str) -> List[ScenarioConfig]:
    """Parameter presets of the figure commands, one scenario per r."""
    if which == "fig3":
        return [
            ScenarioConfig(
                r=r,
                ratio=8.0,
                t_start=0.0,
                t_end=1.0,
                ordering="with",
                branch="both",
                measures=("T", "n"),
                output_path=os.path.join(out_dir, "fig3_r%s.csv" % r),
            ).validate()
            for r in (0.25, 0.5, 1.0)
        ]
    if which in ("fig4", "fig5"):
        measure = "P" if which == "fig4" else "T_A"
        return [
            ScenarioConfig(
                r=r,
                ratio=50.0,
                t_start=0.4,
                t_end=0.6,
                ordering="both",
                branch="plus",
                measures=(measure,),
                output_path=os.path.join(out_dir, "%s_r%s.csv" % (which, r)),
            ).validate()
            for r in (0.25, 0.5)
        ]
    raise ConfigError("figure", "unknown figure %r, expected one of %s" % (which, ", ".join(FIGURES)))


def cmd_figure(which: str, out_dir: str = ".", workers: int = 0) -> List[str]:
    if which == "fig2":
        params = SystemParams.dimensionless(1.8, 50.0)
        fractions, plus, minus = trajectory(params, 256)
        rows = [
            {
                "t_over_t0": float(f),
                "alpha_plus_re": p.real,
                "alpha_plus_im": p.imag,
                "alpha_minus_re": m.real,
                "alpha_minus_im": m.imag,
                "wigner_radius": 2.0 * COHERENT_WIGNER_SIGMA,
            }
            for f, p, m in zip(fractions.tolist(), plus.tolist(), minus.tolist())
        ]
        columns = list(rows[0].keys())
        legend = dict(COLUMNS)
        legend["wigner_radius"] = "two-standard-deviation radius of a coherent-state Wigner function"
        return [write_csv(os.path.join(out_dir, "fig2_r1.8.csv"), rows, columns, legend)]

    written = []
    for scenario in figure_scenarios(which, out_dir):
        scenario = scenario.with_overrides(workers=workers or None)
        table = cmd_simulate(scenario)
        written.extend(write_results(scenario, table))
        for branch in scenario.branches():
            subset = table.where(branch=branch.name)
            for measure in scenario.measures:
                values = [getattr(row, "n_mean" if measure == "n" else measure) for row in subset]
                if values:
                    logging.info(
                        "%s r=%s %s: %s in [%.6g, %.6g]",
                        which,
                        scenario.r,
                        branch.name,
                        measure,
                        min(values),
                        max(values),
                    )
    if which in ("fig4", "fig5"):
        measure = "P" if which == "fig4" else "T_A"
        reports = [measure_phase_offset(SystemParams.dimensionless(r, 50.0), measure) for r in (0.25, 0.5)]
        rows = [
            dict(r=x.r, ratio=x.ratio, measure=x.measure, expected=x.expected, offset=x.offset, error=x.error)
            for x in reports
        ]
        legend = {
            "r": "Omega23 / g",
            "ratio": "Omega12 / delta",
            "measure": "profile used to locate the instants",
            "expected": "r^2 (delta t - sin delta t) at t0/2, mod pi",
            "offset": "measured phase shift between ordering modes, mod pi",
            "error": "circular distance between offset and expected",
        }
        written.append(write_csv(os.path.join(out_dir, "%s_offsets.csv" % which), rows, list(legend), legend))
    return written


def cmd_critical(fraction: float = 0.1, dim: Optional[int] = None) -> CriticalReport:
    """Critical r from Delta phi(t0/2) = fraction * pi and photon numbers of cats at amplitude 2 r_c."""
    r_c = critical_radius(fraction)
    amplitude = 2.0 * r_c
    size = dim or recommended_dim(amplitude)
    report = CriticalReport(
        fraction=fraction,
        r_c=r_c,
        amplitude=amplitude,
        n_odd=odd_state_photon_number(amplitude),
        n_even=even_state_photon_number(amplitude),
        n_yurke_stoler=yurke_stoler_photon_number(amplitude),
        n_odd_fock=mean_photon_number(odd_coherent_state(amplitude, size)),
        n_even_fock=mean_photon_number(even_coherent_state(amplitude, size)),
        n_yurke_stoler_fock=mean_photon_number(yurke_stoler_state(amplitude, size)),
    )
    report.disagreement = max(
        abs(report.n_odd - report.n_odd_fock),
        abs(report.n_even - report.n_even_fock),
        abs(report.n_yurke_stoler - report.n_yurke_stoler_fock),
    )
    logging.info("critical radius %.6f for fraction %s", r_c, fraction)
    return report


def cmd_validate(config: ScenarioConfig) -> List[CheckResult]:
    if not config.oracle:
        raise ConfigError("oracle", "validation runs the numerical oracle; set oracle = on")
    results = run_all(dim=config.dim or None, steps=config.steps or None)
    failed = [r for r in results if not r.passed]
    logging.info("validation: %d checks, %d failed", len(results), len(failed))
    return results


def max_total_noise(params: SystemParams, n_points: int = 512) -> float:
    """Largest closed-form T of either branch over one period (with ordering)."""
    best = 0.0
    for k in range(n_points):
        t = (k + 0.5) / n_points * params.t0
        for branch in (Branch.plus, Branch.minus):
            try:
                best = max(best, total_noise_closed_form(conditional_state(t, params, branch)))
            except ZeroProbabilityError:
                continue
    return best


def sweep_point(r: float, ratio: float) -> SweepRow:
    params = SystemParams.dimensionless(r, ratio)
    _warn_regime(params)
    return SweepRow(
        r=r,
        ratio=ratio,
        strong_coupling=params.strong_coupling,
        delta_phi_half=ordering_correction(0.5 * params.t0, params),
        parity_offset=measure_phase_offset(params, "P").offset if r > 0 else 0.0,
        max_total_noise=max_total_noise(params),
        odd_photon_number=odd_state_photon_number(2.0 * r),
    )


def cmd_sweep(config: ScenarioConfig, r_values: Sequence[float], ratios: Sequence[float]) -> Table:
    points = list(itertools.product(r_values, ratios))
    with ThreadPoolExecutor(max_workers=_workers(config)) as executor:
        rows = list(executor.map(lambda p: sweep_point(*p), points))
    table = Table("sweep")
    table.insert_many(rows)
    logging.info("swept %d parameter points", len(table))
    return table


SWEEP_COLUMNS = {
    "r": "Omega23 / g",
    "ratio": "Omega12 / delta",
    "strong_coupling": "1 when Omega12 >= 5 max(g, Omega23)",
    "delta_phi_half": "time-ordering phase r^2 (delta t - sin delta t) at t0/2",
    "parity_offset": "measured shift of parity maxima between ordering modes, mod pi",
    "max_total_noise": "largest total noise of either conditional state over one period",
    "odd_photon_number": "mean photon number of the odd coherent state at amplitude 2r",
}
