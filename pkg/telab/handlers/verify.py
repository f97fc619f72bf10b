"""
Команда verify - набір перевірок інваріантів

Кожна перевірка дає CheckResult зі статусом, виміряним значенням та
допуском. Статус "info" лише звітує (наприклад незалежність від k) і не
впливає на код виходу. Будь-який "fail" -> CheckFailed (exit 1) після
запису verify.json.

Вихід: verify.json, norm_scaling_<mode>.csv, minimal_growth_<mode>.csv
"""
from __future__ import annotations

import math
from typing import Callable, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from telab.config import settings
from telab.errors import CheckFailed, LabError
from telab.handlers.scan import CROSS_PATH_TOL, ModeScan, ScanTask, scan_task
from telab.logger import logger
from telab.models.media import MediaConfig, _close
from telab.models.mode import ModeId, Polarization
from telab.models.records import EigenRecord
from telab.models.run_config import RunConfig
from telab.models.spectral import SearchRegion, SectorSpec, SpectralParameter, validate_k
from telab.services.dispersion import floor_scan, real_axis_zeros
from telab.services.modeop.grid import build_grid
from telab.services.modeop.norms import (
    PROBE_HEADER,
    SCALING_HEADER,
    minimal_growth_probe,
    norm_scaling_report,
    op_norm,
    schatten_four_check,
    smallest_singular,
)
from telab.services.modeop.operator import ModeOperator, build_mode_operator
from telab.services.modeop.spectrum import (
    eigs_to_frequencies,
    expansion_residual,
    generalized_eigenbasis,
    grid_refinement_check,
    k_independence_check,
    mu_to_omega,
    omega_to_mu,
    random_admissible_shifts,
    resolvent_identity_deviation,
    smooth_target,
    square_spectrum_check,
)
from telab.services.pool import WorkerPool
from telab.services.spectra.audit import (
    counting_from_partial,
    missing_partners,
    schatten_tail_check,
    schatten_tail_sweep,
    sector_audit,
)
from telab.services.spectra.contour import EdgeCache, count_rectangle
from telab.services.spectra.locate import locate_zeros
from telab.utils.helpers import jitter_fraction, mode_rng
from telab.utils.writers import write_csv, write_json

Status = Literal["pass", "fail", "info"]

TOLERANCES = {
    "resolvent_identity": 1e-8,
    "resolvent_sides": 1e-10,
    "injectivity": 1e-10,
    "schatten_four": 1e-8,
    "eigen_map": 1e-10,
    "square_spectrum": 1e-6,
    "grid_refinement": 1e-6,
    "op_norm_slope": -0.8,
    "hs_norm_slope": -0.4,
    "h1_spread": 10.0,
    "h2_spread": 10.0,
    "minimal_growth_ratio": 10.0,
    "completeness": 1e-3,
    "located_order": 0.0,
    "additivity": 0.0,
    "cross_path": CROSS_PATH_TOL,
    "real_axis_oracle": 1e-8,
    "symmetry": 1e-6,
    "schatten_tail": 1e-6,
    "schatten_tail_slope": -0.8,
    "impedance_degeneracy": 1e-2,
}


class CheckResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    mode: Optional[str] = None
    status: Status
    value: Optional[float] = None
    tolerance: Optional[float] = None
    details: dict = {}

    @property
    def failed(self) -> bool:
        return self.status == "fail"


def _check(name: str, mode: Optional[ModeId], ok: bool, value: float, **details) -> CheckResult:
    return CheckResult(
        name=name,
        mode=None if mode is None else str(mode),
        status="pass" if ok else "fail",
        value=float(value),
        tolerance=TOLERANCES.get(name),
        details=details,
    )


def _guard(name: str, mode: Optional[ModeId], fn: Callable[[], List[CheckResult]]) -> List[CheckResult]:
    """Числова помилка всередині перевірки - це провалена перевірка, а не аварія"""
    try:
        return fn()
    except LabError as err:
        logger.warning(f"⚠️  {name} ({mode}): {err.message}")
        return [
            CheckResult(
                name=name,
                mode=None if mode is None else str(mode),
                status="fail",
                tolerance=TOLERANCES.get(name),
                details={"error": err.to_dict()},
            )
        ]


# ============= ПЕРЕВІРКИ ОПЕРАТОРА =============


class ModeTask(BaseModel):
    model_config = ConfigDict(frozen=True)

    media: MediaConfig
    mode: ModeId
    spectral: SpectralParameter
    grid_size: int
    seed: int
    k_magnitudes: List[float]
    probe_radii: List[float]


class ModeTables(BaseModel):
    model_config = ConfigDict(frozen=True)

    mode: ModeId
    checks: List[CheckResult]
    scaling_rows: List[list] = []
    growth_rows: List[list] = []


def _resolvent_checks(op: ModeOperator, task: ModeTask) -> List[CheckResult]:
    rng = mode_rng(task.seed, task.mode, salt=2)
    sp = task.spectral
    shifts = random_admissible_shifts(op, rng, 5, sp.gamma, sp.k_min)
    devs = [resolvent_identity_deviation(op, s) for s in shifts]
    relative = max(d["relative"] for d in devs)
    sides = max(d["sides"] for d in devs)
    return [
        _check(
            "resolvent_identity",
            task.mode,
            relative <= TOLERANCES["resolvent_identity"],
            relative,
            shifts=shifts,
        ),
        _check("resolvent_sides", task.mode, sides <= TOLERANCES["resolvent_sides"], sides),
    ]


def _block_checks(op: ModeOperator, task: ModeTask) -> List[CheckResult]:
    t_norm = op_norm(op)
    sigma = smallest_singular(op)
    schatten = schatten_four_check(op)
    squares = square_spectrum_check(op)
    spectrum = eigs_to_frequencies(op)
    mus = [mu for mu, _ in spectrum.pairs]
    eigen_map = max(
        (abs(omega_to_mu(mu_to_omega(mu, op.k), op.k) - mu) / abs(mu) for mu in mus), default=0.0
    )
    return [
        _check(
            "injectivity",
            task.mode,
            sigma > TOLERANCES["injectivity"] * t_norm,
            sigma / t_norm,
            condition=op.condition,
        ),
        _check(
            "schatten_four",
            task.mode,
            schatten.holds,
            schatten.schatten4 / schatten.frobenius2,
            schatten4=schatten.schatten4,
            frobenius2=schatten.frobenius2,
        ),
        _check("eigen_map", task.mode, eigen_map <= TOLERANCES["eigen_map"], eigen_map),
        _check("square_spectrum", task.mode, squares <= TOLERANCES["square_spectrum"], squares),
    ]


def _completeness_check(op: ModeOperator, task: ModeTask) -> List[CheckResult]:
    rng = mode_rng(task.seed, task.mode, salt=3)
    basis = generalized_eigenbasis(op)
    n = basis.size
    m_list = list(range(1, n + 1))
    first_hits, exact, monotone = [], True, True
    for _ in range(10):
        table = expansion_residual(op, smooth_target(op, rng), m_list, basis)
        first_hits.append(table.first_below(TOLERANCES["completeness"]))
        exact = exact and table.residuals[-1] == 0.0
        monotone = monotone and all(b <= a for a, b in zip(table.residuals, table.residuals[1:]))
    reached = all(m is not None and m < n / 2 for m in first_hits)
    return [
        _check(
            "completeness",
            task.mode,
            reached and exact and monotone,
            max((m for m in first_hits if m is not None), default=float(n)),
            first_m=first_hits,
            size=n,
            exact_at_full=exact,
            monotone=monotone,
            clusters=basis.diagnostics,
        )
    ]


def _scaling_checks(task: ModeTask) -> ModeTables:
    sp = task.spectral
    theta = math.degrees(math.atan2(sp.k.imag, sp.k.real))
    grid = build_grid(task.media.radius, task.grid_size)
    report = norm_scaling_report(
        task.media, task.mode, theta, task.k_magnitudes, grid, sp.gamma, sp.k_min
    )
    s_op, s_hs = report.fitted_slopes[0], report.fitted_slopes[1]
    h1 = report.spread(report.h1_norm_T)
    h2 = report.spread(report.h2_norm_T2)
    checks = [
        _check("op_norm_slope", task.mode, s_op <= TOLERANCES["op_norm_slope"], s_op),
        _check("hs_norm_slope", task.mode, s_hs <= TOLERANCES["hs_norm_slope"], s_hs),
        _check("h1_spread", task.mode, h1 <= TOLERANCES["h1_spread"], h1),
        _check("h2_spread", task.mode, h2 <= TOLERANCES["h2_spread"], h2),
    ]

    op = build_mode_operator(task.media, task.mode, sp, grid)
    growth = minimal_growth_probe(op, math.pi / 4, task.probe_radii)
    checks.append(
        _check(
            "minimal_growth_ratio",
            task.mode,
            growth.ratio <= TOLERANCES["minimal_growth_ratio"],
            growth.ratio,
            bound=growth.bound,
        )
    )
    return ModeTables(
        mode=task.mode, checks=checks, scaling_rows=report.rows(), growth_rows=growth.rows()
    )


def verify_mode_task(task: ModeTask) -> ModeTables:
    """Всі перевірки блоку однієї моди (задача пулу)"""
    grid = build_grid(task.media.radius, task.grid_size)
    checks: List[CheckResult] = []
    holder: dict = {}

    def build() -> List[CheckResult]:
        holder["op"] = build_mode_operator(task.media, task.mode, task.spectral, grid)
        return []

    checks += _guard("build", task.mode, build)
    op = holder.get("op")
    if op is not None:
        checks += _guard("resolvent_identity", task.mode, lambda: _resolvent_checks(op, task))
        checks += _guard("injectivity", task.mode, lambda: _block_checks(op, task))
        checks += _guard("completeness", task.mode, lambda: _completeness_check(op, task))
        checks += _guard(
            "grid_refinement",
            task.mode,
            lambda: [_refinement(task)],
        )
        checks += _guard("k_independence", task.mode, lambda: [_k_independence(task)])

    tables: Optional[ModeTables] = None

    def scaling() -> List[CheckResult]:
        nonlocal tables
        tables = _scaling_checks(task)
        return tables.checks

    checks += _guard("op_norm_slope", task.mode, scaling)
    return ModeTables(
        mode=task.mode,
        checks=checks,
        scaling_rows=tables.scaling_rows if tables else [],
        growth_rows=tables.growth_rows if tables else [],
    )


def _refinement(task: ModeTask) -> CheckResult:
    res = grid_refinement_check(
        task.media, task.mode, task.spectral, task.grid_size, seed=task.seed
    )
    dev = res["eigen_deviation"]
    ok = dev <= TOLERANCES["grid_refinement"] and res["eigen_unmatched"] == 0
    return _check("grid_refinement", task.mode, ok, dev, **res)


def _k_independence(task: ModeTask) -> CheckResult:
    sp = task.spectral
    sp2 = validate_k(2.0 * sp.k, sp.gamma, sp.k_min)
    rep = k_independence_check(task.media, task.mode, sp, sp2, task.grid_size)
    return CheckResult(
        name="k_independence",
        mode=str(task.mode),
        status="info",
        value=rep.max_deviation,
        details={
            "k2": sp2.k,
            "matched": rep.matched,
            "only_k1": rep.only_k1,
            "only_k2": rep.only_k2,
            "multiplicity_mismatches": rep.multiplicity_mismatches,
            "consistent": rep.consistent,
        },
    )


# ============= ПЕРЕВІРКИ СПЕКТРУ =============


class SpectraTask(BaseModel):
    model_config = ConfigDict(frozen=True)

    media: MediaConfig
    mode: ModeId
    spectral: SpectralParameter
    grid_size: int
    seed: int
    sector: SectorSpec


class SpectraOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    checks: List[CheckResult]
    records: List[EigenRecord] = []


def spectra_region(media: MediaConfig) -> SearchRegion:
    """[0.1, 10] x [-2, 2] / R"""
    r = media.radius
    return SearchRegion.from_bounds(0.1 / r, 10.0 / r, -2.0 / r, 2.0 / r, radius=r)


def symmetric_region(media: MediaConfig) -> SearchRegion:
    """[-10, 10] x [-2, 2] / R, closed under both reflections"""
    r = media.radius
    return SearchRegion.from_bounds(-10.0 / r, 10.0 / r, -2.0 / r, 2.0 / r, radius=r)


def _located_checks(task: SpectraTask, scan: ModeScan) -> List[CheckResult]:
    media, mode = task.media, task.mode
    result = scan.located
    rect = result.rectangle
    checks = [
        _check(
            "located_order",
            mode,
            result.complete,
            abs(result.located_order - result.count),
            count=result.count,
            located=result.located_order,
            unresolved=result.unresolved,
        ),
        _check(
            "cross_path",
            mode,
            scan.matched > 0
            and scan.max_deviation <= TOLERANCES["cross_path"]
            and not scan.unmatched_dispersion
            and not scan.unmatched_operator,
            scan.max_deviation,
            matched=scan.matched,
            unmatched_dispersion=scan.unmatched_dispersion,
            unmatched_operator=scan.unmatched_operator,
            operator_error=scan.operator_error,
        ),
    ]

    real = sorted(e.omega.real for e in result.records if abs(e.omega.imag) <= 1e-10)
    oracle = real_axis_zeros(media, mode, rect.re_min, rect.re_max)
    if len(real) == len(oracle):
        dev = max((abs(a - b) / max(1.0, abs(b)) for a, b in zip(real, oracle)), default=0.0)
    else:
        dev = math.inf
    checks.append(
        _check(
            "real_axis_oracle",
            mode,
            dev <= TOLERANCES["real_axis_oracle"],
            dev,
            located=len(real),
            oracle=len(oracle),
        )
    )

    audit = sector_audit(result.records, task.sector)
    checks.append(
        _check(
            "sector",
            mode,
            not audit.violations,
            len(audit.violations),
            gamma=task.sector.gamma,
            omega0=task.sector.omega0,
            max_ratio=max(audit.ratios, default=0.0),
        )
    )
    return checks


def _additivity_check(task: SpectraTask) -> List[CheckResult]:
    """Winding counts add up over 20 jittered 2x2 splits and agree on the mirrored rectangle"""
    media, mode = task.media, task.mode
    region = spectra_region(media)
    rect, samples = region.rectangle, region.contour_samples
    rng = mode_rng(task.seed, mode, salt=4)
    cache = EdgeCache()

    whole = count_rectangle(media, mode, rect, samples, cache)
    mirrored = count_rectangle(media, mode, rect.negated(), samples)
    worst = abs(whole - mirrored)
    for _ in range(20):
        parts = rect.split(jitter_fraction(rng, 0.1), jitter_fraction(rng, 0.1))
        split = sum(count_rectangle(media, mode, p, samples, cache) for p in parts)
        worst = max(worst, abs(whole - split))
    return [_check("additivity", mode, worst == 0, worst, count=whole)]


def _symmetry_check(task: SpectraTask) -> List[CheckResult]:
    """Every zero away from the edges of the symmetric region has its whole orbit"""
    media, mode = task.media, task.mode
    r = media.radius
    records = locate_zeros(media, mode, symmetric_region(media), seed=task.seed).records
    missing = [
        p
        for e, p in missing_partners(records, TOLERANCES["symmetry"])
        if abs(e.omega.real) < 9.9 / r and abs(e.omega.imag) < 1.9 / r
    ]
    return [_check("symmetry", mode, not missing, len(missing), missing=missing[:20], zeros=len(records))]


def verify_spectra_task(task: SpectraTask) -> SpectraOutcome:
    """Перевірки нулів дисперсії однієї моди (задача пулу)"""
    mode = task.mode
    holder: dict = {}

    def located() -> List[CheckResult]:
        scan = scan_task(
            ScanTask(
                media=task.media,
                mode=mode,
                region=spectra_region(task.media),
                spectral=task.spectral,
                grid_size=task.grid_size,
                seed=task.seed,
            )
        )
        holder["records"] = scan.located.records
        return _located_checks(task, scan)

    checks = _guard("located_order", mode, located)
    checks += _guard("additivity", mode, lambda: _additivity_check(task))
    checks += _guard("symmetry", mode, lambda: _symmetry_check(task))
    return SpectraOutcome(checks=checks, records=holder.get("records", []))


def _schatten_tail_checks(records: List[EigenRecord], config: RunConfig) -> List[CheckResult]:
    """Partial sum over located zeros against the Frobenius bound, and its decay along the k ray"""
    media, sp = config.media, config.spectral
    grid = build_grid(media.radius, config.grid_size)
    partial, bound = schatten_tail_check(records, sp.k, media=media, grid=grid, gamma=sp.gamma)
    count, scaled = counting_from_partial(records, sp.k)
    theta = math.degrees(math.atan2(sp.k.imag, sp.k.real))
    sums, slope = schatten_tail_sweep(records, theta, config.k_magnitudes)
    return [
        _check(
            "schatten_tail",
            None,
            partial <= bound * (1.0 + TOLERANCES["schatten_tail"]) and count <= scaled,
            partial,
            bound=bound,
            zeros=len(records),
            counted=count,
            counted_bound=scaled,
        ),
        _check(
            "schatten_tail_slope",
            None,
            slope is None or slope <= TOLERANCES["schatten_tail_slope"],
            math.nan if slope is None else slope,
            sums=sums,
            magnitudes=config.k_magnitudes,
        ),
    ]


def impedance_degeneracy_check(media: MediaConfig) -> CheckResult:
    """
    Floor of |D|/scale (TE1) on Im(omega) = 11/R. Far from the real axis it
    approaches the impedance contrast |Y - Y_hat| / max(Y, Y_hat); with
    eps/mu = eps_hat/mu_hat only an O(|omega|^-2) remainder is left.
    """
    r = media.radius
    contour = np.linspace(complex(1.0, 11.0), complex(10.0, 11.0), 200) / r
    mode = ModeId(degree=1, polarization=Polarization.TE)
    floor = floor_scan(media, mode, contour)
    contrast = abs(media.admittance - media.admittance_hat) / max(
        media.admittance, media.admittance_hat
    )
    tolerance = TOLERANCES["impedance_degeneracy"]
    ok = floor >= tolerance
    if not ok:
        logger.error(f"❌ Виродження дисперсії: min |D|/scale = {floor:.2e} на Im(omega) = {11 / r}")
    return CheckResult(
        name="impedance_degeneracy",
        status="pass" if ok else "fail",
        value=floor,
        tolerance=tolerance,
        details={
            "impedance_contrast": contrast,
            "equal_impedances": _close(
                media.eps / media.mu, media.eps_hat / media.mu_hat, settings.CONDITION_H_MARGIN
            ),
            "im_omega": 11.0 / r,
        },
    )


# ============= ЗАПУСК =============


async def run_verify(config: RunConfig, pool: Optional[WorkerPool] = None) -> List[CheckResult]:
    """
    Raises:
        CheckFailed: хоча б одна перевірка зі статусом fail (verify.json вже записано)
    """
    pool = pool or WorkerPool(1)
    media = config.media
    logger.info(f"🧪 Verify: {len(config.modes)} мод, N={config.grid_size}, k={config.spectral.k:.4g}")

    checks: List[CheckResult] = [impedance_degeneracy_check(media)]

    mode_tasks = [
        ModeTask(
            media=media,
            mode=mode,
            spectral=config.spectral,
            grid_size=config.grid_size,
            seed=config.seed,
            k_magnitudes=config.k_magnitudes,
            probe_radii=config.probe_radii,
        )
        for mode in config.modes
    ]
    spectra_tasks = [
        SpectraTask(
            media=media,
            mode=mode,
            spectral=config.spectral,
            grid_size=config.grid_size,
            seed=config.seed,
            sector=config.sector,
        )
        for mode in config.modes
    ]
    tables: List[ModeTables] = await pool.map(verify_mode_task, mode_tasks)
    spectra: List[SpectraOutcome] = await pool.map(verify_spectra_task, spectra_tasks)

    for t in tables:
        checks += t.checks
    for s in spectra:
        checks += s.checks
    records = [e for s in spectra for e in s.records]
    checks += _guard("schatten_tail", None, lambda: _schatten_tail_checks(records, config))

    failed = [c for c in checks if c.failed]
    payload = {
        "command": "verify",
        "config": config.echo,
        "passed": not failed,
        "checks": checks,
    }
    out = config.output_dir
    if out is not None:
        write_json(out / "verify.json", payload)
        for t in tables:
            if t.scaling_rows:
                write_csv(out / f"norm_scaling_{t.mode}.csv", SCALING_HEADER, t.scaling_rows)
            if t.growth_rows:
                write_csv(out / f"minimal_growth_{t.mode}.csv", PROBE_HEADER, t.growth_rows)

    for c in checks:
        mark = {"pass": "✅", "fail": "❌", "info": "ℹ️ "}[c.status]
        logger.info(f"{mark} {c.name} {c.mode or ''}: {c.value} (tol {c.tolerance})")

    if failed:
        raise CheckFailed(
            f"{len(failed)} of {len(checks)} checks failed",
            failed=[f"{c.name}:{c.mode}" if c.mode else c.name for c in failed],
        )
    return checks
