"""
Chiral Dicke lab - Parameter sweeps

One task per invocation. Every task evaluates its grid point by point
(optionally on a thread pool, gathered in index order) and returns a
SweepResult whose rows carry the full parameter tuple. A grid point that
raises a ChiralDickeError becomes an error row; the sweep itself never
aborts on one.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from django.db import models

from . import bogoliubov, criticality, ed_oracle, meanfield
from .constants import (
    DEFAULT_CUT_POINTS,
    DEFAULT_EXPONENT_MAP_POINTS,
    DEFAULT_FIT_POINTS,
    DEFAULT_FIT_WINDOW,
    DEFAULT_MAP_POINTS,
    DEFAULT_N,
    DEFAULT_N_LIST,
    DEFAULT_OMEGA_Z_SERIES,
    DEFAULT_PHI_SERIES,
    DEGENERACY_TOL,
    Phase,
    Side,
)
from .exceptions import ChiralDickeError, ParameterError
from .params import ModelParams

logger = logging.getLogger(__name__)

PARAM_COLUMNS = ["omega_c", "omega_z", "g1", "g2", "g", "phi", "U", "UN", "N"]
AXIS_NAMES = ("omega_c", "omega_z", "g1", "g2", "g", "phi", "U", "UN")


class SweepTask(models.TextChoices):
    PHASE_MAP = "phase_map", "Phase map over two couplings"
    SPECTRUM_CUT = "spectrum_cut", "Fluctuation spectrum along g at fixed phi"
    CRITICAL_LINE = "critical_line", "Lower polariton along the critical circle"
    GAP_SCALING = "gap_scaling", "Gap versus distance to g_c with exponent fit"
    EXPONENT_MAP = "exponent_map", "Fitted exponent over phi"
    ED_CHECK = "ed_check", "Exact diagonalization against mean field"


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    count: int
    log: bool = False

    def values(self):
        if self.log:
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)

    def __str__(self):
        text = f"{self.name}:{self.start!r}:{self.stop!r}:{self.count}"
        return text + ":log" if self.log else text


def parse_axis(text):
    """`name:start:stop:count[:log]` -> Axis"""
    from .config_file import parse_number

    parts = [part.strip() for part in str(text).split(":")]
    if len(parts) not in (4, 5):
        raise ParameterError(f"Axis {text!r} must look like name:start:stop:count[:log]")
    name = parts[0]
    if name not in AXIS_NAMES:
        raise ParameterError(f"Unknown axis parameter {name!r} (expected one of {', '.join(AXIS_NAMES)})")
    try:
        start, stop = parse_number(parts[1]), parse_number(parts[2])
        count = int(parts[3])
    except ValueError as exc:
        raise ParameterError(f"Axis {text!r}: {exc}")
    if count < 2:
        raise ParameterError(f"Axis {text!r} needs at least 2 points")
    log = False
    if len(parts) == 5:
        if parts[4] != "log":
            raise ParameterError(f"Axis {text!r}: the optional fifth field must be 'log'")
        if start <= 0 or stop <= 0:
            raise ParameterError(f"Axis {text!r}: log spacing needs positive bounds")
        log = True
    return Axis(name, start, stop, count, log)


def apply_value(p, name, value, phi=None):
    """
    Set one swept parameter; g and phi move along the polar coordinates.
    phi pins the angle of a g sweep, which p alone loses at g = 0.
    """
    value = float(value)
    if name == "g":
        return p.with_polar(value, p.phi if phi is None else phi)
    if name == "phi":
        return p.with_polar(p.g, value)
    if name == "UN":
        return p.with_UN(value)
    return p.replace(**{name: value})


TASK_DEFAULT_AXES = {
    SweepTask.PHASE_MAP: (f"g1:0:2:{DEFAULT_MAP_POINTS}", f"g2:0:2:{DEFAULT_MAP_POINTS}"),
    SweepTask.SPECTRUM_CUT: (f"g:0:2:{DEFAULT_CUT_POINTS}", None),
    SweepTask.CRITICAL_LINE: (f"phi:0:pi/2:{DEFAULT_CUT_POINTS}", None),
    SweepTask.EXPONENT_MAP: (f"phi:0:pi/2:{DEFAULT_EXPONENT_MAP_POINTS}", None),
    SweepTask.GAP_SCALING: (None, None),
    SweepTask.ED_CHECK: (None, None),
}


@dataclass
class SweepSpec:
    base: ModelParams
    task: str
    axis1: Axis = None
    axis2: Axis = None
    phi: float = None
    phi_series: tuple = DEFAULT_PHI_SERIES
    omega_z_series: tuple = DEFAULT_OMEGA_Z_SERIES
    n_list: tuple = DEFAULT_N_LIST
    window: tuple = DEFAULT_FIT_WINDOW
    points: int = DEFAULT_FIT_POINTS
    sides: tuple = (Side.FROM_NORMAL.value,)
    threads: int = 1

    def meta(self):
        """Resolved inputs, written into the output header (thread count excluded)"""
        meta = dict(self.base.as_row())
        if self.axis1 is not None:
            meta["axis1"] = str(self.axis1)
        if self.axis2 is not None:
            meta["axis2"] = str(self.axis2)
        if self.task == SweepTask.SPECTRUM_CUT:
            meta["phi_series"] = self.phi_series
        if self.task == SweepTask.CRITICAL_LINE:
            meta["omega_z_series"] = self.omega_z_series
        if self.task in (SweepTask.GAP_SCALING, SweepTask.EXPONENT_MAP):
            meta["window"] = self.window
            meta["points"] = self.points
        if self.task == SweepTask.GAP_SCALING:
            meta["sides"] = self.sides
            meta["fit_phi"] = self.phi
        if self.task == SweepTask.ED_CHECK:
            meta["n_list"] = self.n_list
        return meta


@dataclass
class SweepResult:
    task: str
    columns: list
    rows: list
    meta: dict = field(default_factory=dict)
    fits: list = field(default_factory=list)

    @property
    def error_rows(self):
        return [row for row in self.rows if row.get("error")]


DEFAULT_BASE = {"omega_c": 1.0, "omega_z": 1.5, "g": 0.0, "phi": 0.0, "U": None, "UN": None, "N": DEFAULT_N}


def build_spec(values, task, threads=1):
    """SweepSpec from resolved key/value settings (defaults < config file < flags)"""
    task = SweepTask(task)
    settings = dict(DEFAULT_BASE)
    settings.update(values)

    if settings.get("g1") is not None or settings.get("g2") is not None:
        if "g" in values or "phi" in values:
            raise ParameterError("Give couplings either as g1/g2 or as g/phi, not both")
        base = ModelParams.create(
            omega_c=settings["omega_c"], omega_z=settings["omega_z"], g1=settings.get("g1") or 0.0,
            g2=settings.get("g2") or 0.0, U=settings["U"], UN=settings["UN"], N=settings["N"],
        )
        phi = base.phi if base.g > 0 else None
    else:
        base = ModelParams.create(
            omega_c=settings["omega_c"], omega_z=settings["omega_z"], g=settings["g"], phi=settings["phi"],
            U=settings["U"], UN=settings["UN"], N=settings["N"],
        )
        phi = settings["phi"] if "phi" in values else None

    default1, default2 = TASK_DEFAULT_AXES[task]
    axis1 = values.get("axis1", default1)
    axis2 = values.get("axis2", default2)

    sides = (Side.FROM_NORMAL.value,)
    if task == SweepTask.GAP_SCALING and phi is None:
        phi = criticality.degeneracy_angle(base)
        if phi is None:
            raise ParameterError("gap_scaling needs phi when omega_z < omega_c_tilde (no degeneracy angle)")
        if base.U == 0.0:
            # on the degeneracy line the lower polariton also closes from above
            sides = (Side.FROM_NORMAL.value, Side.FROM_SUPERRADIANT.value)

    return SweepSpec(
        base=base,
        task=task.value,
        axis1=parse_axis(axis1) if axis1 else None,
        axis2=parse_axis(axis2) if axis2 else None,
        phi=phi,
        phi_series=tuple(values.get("phi_series", DEFAULT_PHI_SERIES)),
        omega_z_series=tuple(values.get("omega_z_series", DEFAULT_OMEGA_Z_SERIES)),
        n_list=tuple(values.get("n_list", DEFAULT_N_LIST)),
        window=tuple(values.get("window", DEFAULT_FIT_WINDOW)),
        points=int(values.get("points", DEFAULT_FIT_POINTS)),
        sides=tuple(values.get("sides", sides)),
        threads=max(1, int(threads)),
    )


def _evaluate(task_func, items, threads):
    if threads <= 1:
        return [task_func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(task_func, items))


def _guarded(point_func):
    """Turn a ChiralDickeError at one grid point into an error row"""
    def run(item):
        p, extra = item
        row = dict(p.as_row()) if p is not None else {}
        row.update(extra)
        try:
            row.update(point_func(p, extra))
        except ChiralDickeError as exc:
            logger.warning(f"Grid point {extra} failed: {type(exc).__name__}: {exc}")
            row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    return run


def _grid_item(base, assignments, extra=None, phi=None):
    """
    (params, extra) for one grid point; invalid parameter combinations
    surface as error rows. The angle is tracked apart from the params, which
    cannot hold it at g = 0, so phi and g axes combine in either order and
    the row carries the requested angle.
    """
    extra = dict(extra or {})
    p = base
    angle = phi
    try:
        for name, value in assignments:
            if name == "phi":
                angle = float(value)
            elif name in ("g1", "g2"):
                angle = None
            p = apply_value(p, name, value, angle)
    except ParameterError as exc:
        extra["error"] = f"ParameterError: {exc}"
        return None, extra
    if angle is not None:
        extra["phi"] = angle
    return p, extra


def _run(spec, items, point_func, columns, fits=None):
    def point(item):
        p, extra = item
        if p is None:
            return dict(extra)
        return _guarded(point_func)(item)

    logger.info(f"Running {spec.task} over {len(items)} points with {spec.threads} thread(s)")
    rows = _evaluate(point, items, spec.threads)
    result = SweepResult(
        task=spec.task,
        columns=PARAM_COLUMNS + columns + ["error"],
        rows=rows,
        meta=spec.meta(),
        fits=fits or [],
    )
    logger.info(f"Finished {spec.task}: {len(rows)} rows, {len(result.error_rows)} error rows")
    return result


def _phase_point(p, extra):
    mf = meanfield.solve(p)
    return {
        "phase": str(mf.phase),
        "alpha3_abs2_per_N": mf.alpha3_abs2 / p.N,
        "energy_per_atom": mf.energy_per_atom,
        "mu_tilde": mf.mu_tilde,
        "g_c": meanfield.critical_coupling(p),
    }


def run_phase_map(spec):
    """Phase label, condensate fraction, energy and mu_tilde over a two-parameter grid"""
    if spec.axis1 is None or spec.axis2 is None:
        raise ParameterError("phase_map needs axis1 and axis2")
    items = [
        _grid_item(spec.base, [(spec.axis1.name, v1), (spec.axis2.name, v2)], phi=spec.phi)
        for v1 in spec.axis1.values()
        for v2 in spec.axis2.values()
    ]
    columns = ["phase", "alpha3_abs2_per_N", "energy_per_atom", "mu_tilde", "g_c"]
    return _run(spec, items, _phase_point, columns)


def reference_gap(p, phi, g):
    """Closed-form gap below g_c: linear slope away from phi*, square root on it; None above g_c"""
    gc = meanfield.critical_coupling(p)
    if g >= gc:
        return None
    exponent, prefactor = criticality.analytic_reference(p, phi)
    return prefactor * (gc - g) ** exponent


def _spectrum_point(p, extra):
    mf = meanfield.solve(p)
    result = bogoliubov.spectrum(p, cross_check=False)
    mismatch = None
    if p.U == 0.0:
        if mf.phase == Phase.SUPERRADIANT:
            reference = bogoliubov.spectrum_charpoly_superradiant(p)
        else:
            reference = bogoliubov.spectrum_charpoly_normal(p)
        mismatch = bogoliubov.route_mismatch(result, reference, p.omega_c)
    try:
        reference_line = reference_gap(p, extra["phi_series"], p.g)
    except ChiralDickeError:
        reference_line = None
    return {
        "phase": str(mf.phase),
        "stability": str(meanfield.classify_stability(p, mf.alpha3_abs2)),
        "eps_1": result.modes[0],
        "eps_2": result.modes[1],
        "eps_3": result.modes[2],
        "goldstone_count": result.goldstone_count,
        "stable": result.stable,
        "max_growth_rate": max(result.growth_rates),
        "reference_gap": reference_line,
        "route_mismatch": mismatch,
    }


def run_spectrum_cut(spec):
    """Three sorted mode energies along axis1, one series per phi"""
    if spec.axis1 is None:
        raise ParameterError("spectrum_cut needs axis1")
    items = []
    for phi in spec.phi_series:
        at_phi = spec.base.with_polar(spec.base.g, phi)
        for value in spec.axis1.values():
            items.append(_grid_item(at_phi, [(spec.axis1.name, value)], {"phi_series": float(phi)}, phi=float(phi)))
    columns = [
        "phi_series", "phase", "stability", "eps_1", "eps_2", "eps_3", "goldstone_count", "stable",
        "max_growth_rate", "reference_gap", "route_mismatch",
    ]
    return _run(spec, items, _spectrum_point, columns)


def run_critical_line(spec):
    """Signed lower polariton on g = g_c against phi, one series per omega_z, with the located zero"""
    if spec.axis1 is None or spec.axis1.name != "phi":
        raise ParameterError("critical_line sweeps phi on axis1")
    items = []
    for omega_z in spec.omega_z_series:
        try:
            series = spec.base.replace(omega_z=float(omega_z))
            zero = criticality.locate_critical_zero(series)
        except ParameterError as exc:
            items.append((None, {"series_omega_z": float(omega_z), "error": f"ParameterError: {exc}"}))
            continue
        if zero is None:
            logger.info(f"omega_z={omega_z}: eps_- stays above zero on the critical line")
        extra = {
            "series_omega_z": float(omega_z),
            "zero_phi": zero,
            "eps_minus_at_zero": None if zero is None else criticality.critical_line_polariton(series, zero),
        }
        gc = meanfield.critical_coupling(series)
        for phi in spec.axis1.values():
            items.append((series.with_polar(gc, float(phi)), dict(extra)))

    def point(p, extra):
        return {"eps_minus": criticality.critical_line_polariton(p, p.phi)}

    columns = ["series_omega_z", "eps_minus", "zero_phi", "eps_minus_at_zero"]
    return _run(spec, items, point, columns)


def _on_degeneracy_line(p, phi):
    angle = criticality.degeneracy_angle(p)
    return angle is not None and abs(phi - angle) < DEGENERACY_TOL


def run_gap_scaling(spec):
    """Gap against |g_c - g| on each requested side, the closed-form reference and one fit per side"""
    base = spec.base.with_polar(spec.base.g, spec.phi)
    gc = meanfield.critical_coupling(base)
    fits = []
    items = []
    for side in spec.sides:
        side = Side(side)
        try:
            fit = criticality.fit_exponent(base, spec.phi, side, spec.window, spec.points)
            fits.append(fit)
        except ChiralDickeError as exc:
            logger.warning(f"gap_scaling fit {side.value} failed: {exc}")
            items.append((None, {"side": side.value, "error": f"{type(exc).__name__}: {exc}"}))
            continue
        sign = -1.0 if side == Side.FROM_NORMAL else 1.0
        relative = np.logspace(math.log10(spec.window[0]), math.log10(spec.window[1]), spec.points)
        for r in relative:
            items.append(
                _grid_item(
                    base,
                    [("g", gc * (1 + sign * r))],
                    {"side": side.value, "relative_distance": float(r)},
                    phi=spec.phi,
                )
            )

    def point(p, extra):
        side = Side(extra["side"])
        distance = abs(gc - p.g)
        gap = criticality.gap_at(p, side)
        if side == Side.FROM_NORMAL:
            reference = reference_gap(p, spec.phi, p.g)
        elif p.U == 0.0 and _on_degeneracy_line(p, spec.phi):
            reference = criticality.analytic_sqrt_prefactor(p, side=side) * math.sqrt(distance)
        else:
            reference = None
        return {"distance": distance, "gap": gap, "reference_gap": reference}

    columns = ["side", "relative_distance", "distance", "gap", "reference_gap"]
    result = _run(spec, items, point, columns, fits)
    for fit in fits:
        result.meta[f"{fit.side}_z_nu"] = fit.z_nu
        result.meta[f"{fit.side}_prefactor"] = fit.prefactor
        result.meta[f"{fit.side}_r_squared"] = fit.r_squared
    return result


def run_exponent_map(spec):
    """Below-g_c exponent fit at every phi on axis1, with the closed-form expectation"""
    if spec.axis1 is None or spec.axis1.name != "phi":
        raise ParameterError("exponent_map sweeps phi on axis1")
    # rows carry the point the fits approach: g = g_c at the fitted angle
    gc = meanfield.critical_coupling(spec.base)
    items = [
        _grid_item(spec.base, [("g", gc)], {"fit_phi": float(phi)}, phi=float(phi))
        for phi in spec.axis1.values()
    ]

    def point(p, extra):
        phi = extra["fit_phi"]
        fit = criticality.fit_exponent(p, phi, Side.FROM_NORMAL, spec.window, spec.points)
        exponent, prefactor = criticality.analytic_reference(p, phi)
        return {
            "z_nu": fit.z_nu,
            "prefactor": fit.prefactor,
            "r_squared": fit.r_squared,
            "poor_fit": fit.poor_fit,
            "expected_z_nu": exponent,
            "expected_prefactor": prefactor,
        }

    columns = ["fit_phi", "z_nu", "prefactor", "r_squared", "poor_fit", "expected_z_nu", "expected_prefactor"]
    return _run(spec, items, point, columns)


def _ed_point(p, extra):
    mf = meanfield.solve(p)
    result = ed_oracle.cached_ground_state(p)
    bound = ed_oracle.product_state_energy(p, result.basis, mf)
    gaussian = None
    if mf.phase != Phase.SUPERRADIANT:
        matrices = bogoliubov.build_matrices(p, mf)
        zero_point = bogoliubov.gaussian_ground_energy(matrices, bogoliubov.spectrum(p, cross_check=False))
        gaussian = mf.absolute_energy_per_atom + zero_point / p.N
    n1, n2 = result.photon_occupations
    return {
        "ed_energy_per_atom": result.ground_energy_per_atom,
        "mf_energy_per_atom": mf.absolute_energy_per_atom,
        "difference": result.ground_energy_per_atom - mf.absolute_energy_per_atom,
        "gaussian_energy_per_atom": gaussian,
        "product_state_energy_per_atom": bound / p.N,
        "variational_bound_ok": bool(result.ground_energy <= bound + 1e-10),
        "lz": result.lz_expectation,
        "n1": n1,
        "n2": n2,
        "sz": result.sz_expectation,
        "sector": result.sector,
        "sector_lz": result.sector_lz,
        "sector_gap": ed_oracle.sector_gap(p, result),
        "n_max1": result.basis.n_max1,
        "n_max2": result.basis.n_max2,
        "converged": result.converged,
    }


def run_ed_check(spec):
    """Exact diagonalization per N at fixed couplings and fixed UN, against mean field"""
    items = []
    for n in spec.n_list:
        try:
            if int(n) < 1:
                raise ParameterError(f"N must be >= 1, got {n}")
            p = spec.base.replace(N=int(n), U=spec.base.UN / int(n))
        except ParameterError as exc:
            items.append((None, {"N": int(n), "error": f"ParameterError: {exc}"}))
            continue
        items.append((p, {}))
    columns = [
        "ed_energy_per_atom", "mf_energy_per_atom", "difference", "gaussian_energy_per_atom",
        "product_state_energy_per_atom", "variational_bound_ok", "lz", "n1", "n2", "sz", "sector", "sector_lz",
        "sector_gap", "n_max1", "n_max2", "converged",
    ]
    return _run(spec, items, _ed_point, columns)


RUNNERS = {
    SweepTask.PHASE_MAP: run_phase_map,
    SweepTask.SPECTRUM_CUT: run_spectrum_cut,
    SweepTask.CRITICAL_LINE: run_critical_line,
    SweepTask.GAP_SCALING: run_gap_scaling,
    SweepTask.EXPONENT_MAP: run_exponent_map,
    SweepTask.ED_CHECK: run_ed_check,
}


def run(spec):
    return RUNNERS[SweepTask(spec.task)](spec)
