"""Uniformity statistics and junction electrical conversions.

Covers the coefficient-of-variation kernel used for all wafer maps, the
room-temperature-resistance to qubit-frequency conversion with its
analytic sensitivity, Monte-Carlo propagation of resistance spread to
frequency spread, critical-current-density arithmetic and a one-
parameter superconducting-gap fit, plus grouped aggregation of measured
resistance records with a parallel-measurement repeatability report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    DegenerateFit,
    EmptyOrSingleton,
    NonPositiveFrequency,
    NonPositiveMean,
    ValidationError,
)

# Exact SI defining constants (2019 redefinition).
ELEMENTARY_CHARGE_C = 1.602176634e-19
PLANCK_J_S = 6.62607015e-34
FLUX_QUANTUM_WB = PLANCK_J_S / (2.0 * ELEMENTARY_CHARGE_C)


@dataclass(frozen=True)
class StatsSummary:
    """Sample statistics of one group: n, mean, sample sd (n-1) and
    cv = sd/mean as a fraction."""

    n: int
    mean: float
    sd_sample: float
    cv: float

    @property
    def cv_percent(self) -> float:
        return 100.0 * self.cv


def coefficient_of_variation(samples: Sequence[float]) -> StatsSummary:
    """CV = sample standard deviation / mean.

    Needs at least two finite samples and a positive mean; scale
    invariant by construction.
    """
    n = len(samples)
    if n < 2:
        raise EmptyOrSingleton(f"need >= 2 samples for a CV, got {n}")
    arr = np.asarray(samples, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValidationError("samples must be finite")
    mean = float(arr.mean())
    if mean <= 0.0:
        raise NonPositiveMean(f"mean {mean} <= 0")
    sd = float(arr.std(ddof=1))
    return StatsSummary(n=n, mean=mean, sd_sample=sd, cv=sd / mean)


@dataclass(frozen=True)
class QubitParams:
    """Superconducting gap (ueV) and charging energy expressed as the
    frequency E_C/h (MHz)."""

    gap_delta_uev: float
    ec_mhz: float

    def __post_init__(self) -> None:
        if not self.gap_delta_uev > 0:
            raise ValidationError("gap_delta_uev must be > 0")
        if not self.ec_mhz > 0:
            raise ValidationError("ec_mhz must be > 0")

    @property
    def gap_j(self) -> float:
        return self.gap_delta_uev * 1.0e-6 * ELEMENTARY_CHARGE_C

    @property
    def ec_j(self) -> float:
        return PLANCK_J_S * self.ec_mhz * 1.0e6


def _hf_radicand_j2(params: QubitParams) -> float:
    """Numerator of the squared Josephson term: 2 Delta Phi0 E_C / e."""
    return (
        2.0 * params.gap_j * FLUX_QUANTUM_WB * params.ec_j / ELEMENTARY_CHARGE_C
    )


def transmon_frequency(rn_ohm: float, params: QubitParams) -> float:
    """Qubit frequency (Hz) from room-temperature junction resistance.

    h f = sqrt(2 Delta Phi0 E_C / (e R_N)) - E_C

    This is the plasma-frequency relation sqrt(8 E_J E_C) - E_C with the
    Josephson energy taken from the tunnel resistance, so frequency
    falls as 1/sqrt(R_N). Raises NonPositiveFrequency once the radical
    drops to E_C.
    """
    if not rn_ohm > 0:
        raise ValidationError("rn_ohm must be > 0")
    hf = math.sqrt(_hf_radicand_j2(params) / rn_ohm) - params.ec_j
    if hf <= 0.0:
        raise NonPositiveFrequency(
            f"R_N = {rn_ohm} ohm is too resistive for a positive frequency"
        )
    return hf / PLANCK_J_S


def resistance_sensitivity(rn_ohm: float, params: QubitParams) -> float:
    """Logarithmic sensitivity d ln f / d ln R_N, analytically
    -(1/2) (1 + E_C / (h f)); approaches -1/2 for E_C << h f, which is
    the usual statement that the frequency CV is half the R_N CV."""
    f = transmon_frequency(rn_ohm, params)
    return -0.5 * (1.0 + params.ec_j / (PLANCK_J_S * f))


@dataclass(frozen=True)
class PropagationResult:
    """Monte-Carlo propagation of a resistance spread to frequency."""

    cv_rn: float
    cv_f: float
    mean_f_hz: float
    n_samples: int
    n_invalid: int

    @property
    def cv_ratio(self) -> float:
        """cv_f / cv_rn; compare against |resistance_sensitivity|."""
        if self.cv_rn == 0.0:
            return 0.0
        return self.cv_f / self.cv_rn


def propagate_cv_monte_carlo(
    mean_rn_ohm: float,
    cv_rn: float,
    params: QubitParams,
    n_samples: int = 100_000,
    seed: int = 0,
    distribution: str = "lognormal",
) -> PropagationResult:
    """Sample R_N around mean_rn_ohm with the given CV, push every draw
    through the frequency relation and return the CV of the result.

    Lognormal sampling (default) preserves positivity; "normal" is
    available for comparison. Draws producing a non-positive frequency
    are dropped and counted; more than 0.1% invalid draws aborts.
    Reproducible for a fixed seed; the generator is seeded through a
    SeedSequence so shards spawned from the same seed stay disjoint.
    """
    if not mean_rn_ohm > 0:
        raise ValidationError("mean_rn_ohm must be > 0")
    if not 0.0 <= cv_rn < 0.3:
        raise ValidationError(f"cv_rn must be in [0, 0.3), got {cv_rn}")
    if n_samples < 10_000:
        raise ValidationError("n_samples must be >= 10000")

    if cv_rn == 0.0:
        f = transmon_frequency(mean_rn_ohm, params)
        return PropagationResult(
            cv_rn=0.0, cv_f=0.0, mean_f_hz=f, n_samples=n_samples, n_invalid=0
        )

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    if distribution == "lognormal":
        sigma2 = math.log1p(cv_rn * cv_rn)
        mu = math.log(mean_rn_ohm) - 0.5 * sigma2
        rn = rng.lognormal(mean=mu, sigma=math.sqrt(sigma2), size=n_samples)
    elif distribution == "normal":
        rn = rng.normal(mean_rn_ohm, cv_rn * mean_rn_ohm, size=n_samples)
    else:
        raise ValidationError(f"unknown distribution {distribution!r}")

    hf = np.full(n_samples, -1.0)
    positive = rn > 0
    hf[positive] = np.sqrt(_hf_radicand_j2(params) / rn[positive]) - params.ec_j
    valid = hf > 0.0
    n_invalid = int(n_samples - valid.sum())
    if n_invalid > 0.001 * n_samples:
        raise NonPositiveFrequency(
            f"{n_invalid} of {n_samples} draws gave a non-positive frequency"
        )
    f = hf[valid] / PLANCK_J_S
    mean_f = float(f.mean())
    cv_f = float(f.std(ddof=1) / mean_f) if f.size >= 2 else 0.0
    return PropagationResult(
        cv_rn=cv_rn,
        cv_f=cv_f,
        mean_f_hz=mean_f,
        n_samples=n_samples,
        n_invalid=n_invalid,
    )


def critical_current_density(
    rn_ohm: float, area_um2: float, gap_delta_uev: float
) -> float:
    """Critical-current density J_c (uA/um^2) from the tunnel resistance.

    Ambegaokar-Baratoff at zero temperature: I_c = pi Delta / (2 e R_N),
    divided by the junction area. With Delta in ueV, R_N in ohm and the
    area in um^2 the units collapse to J_c = pi Delta / (2 R_N A).
    """
    if not (rn_ohm > 0 and area_um2 > 0 and gap_delta_uev > 0):
        raise ValidationError("rn_ohm, area_um2 and gap_delta_uev must be > 0")
    return math.pi * gap_delta_uev / (2.0 * rn_ohm * area_um2)


def implied_gap_uev(rn_ohm: float, area_um2: float, jc_ua_um2: float) -> float:
    """Gap (ueV) implied by one (R_N, area, J_c) triple: the inverse of
    `critical_current_density`, Delta = 2 e R_N J_c A / pi."""
    if not (rn_ohm > 0 and area_um2 > 0 and jc_ua_um2 > 0):
        raise ValidationError("rn_ohm, area_um2 and jc_ua_um2 must be > 0")
    return 2.0 * rn_ohm * jc_ua_um2 * area_um2 / math.pi


@dataclass(frozen=True)
class GapFitRecord:
    """One fitted observation with its per-record diagnostics."""

    rn_ohm: float
    area_um2: float
    jc_reported: float
    implied_delta_uev: float
    jc_fitted: float
    residual: float
    rel_residual: float


@dataclass(frozen=True)
class GapFitResult:
    delta_uev: float
    records: tuple[GapFitRecord, ...]

    @property
    def max_abs_rel_residual(self) -> float:
        return max(abs(r.rel_residual) for r in self.records)


def fit_gap(records: Iterable[tuple[float, float, float]]) -> GapFitResult:
    """Least-squares single gap from (R_N ohm, area um^2, J_c uA/um^2)
    triples.

    J_c is linear in Delta (J_c = k Delta with k = pi / (2 R_N A)), so
    the minimizer of sum (k_i Delta - J_i)^2 is closed form:
    Delta = sum(k_i J_i) / sum(k_i^2). Per-record implied gaps and
    residuals are reported alongside.
    """
    rows = list(records)
    if len(rows) < 2:
        raise ValidationError("need >= 2 records to fit a gap")
    ks, js = [], []
    for rn, area, jc in rows:
        if not (rn > 0 and area > 0 and jc > 0):
            raise ValidationError(f"non-positive record ({rn}, {area}, {jc})")
        ks.append(math.pi / (2.0 * rn * area))
        js.append(jc)
    denom = sum(k * k for k in ks)
    if denom <= 0.0:
        raise DegenerateFit("no sensitivity to the gap parameter")
    delta = sum(k * j for k, j in zip(ks, js)) / denom
    fitted = []
    for (rn, area, jc), k in zip(rows, ks):
        jc_fit = k * delta
        fitted.append(
            GapFitRecord(
                rn_ohm=rn,
                area_um2=area,
                jc_reported=jc,
                implied_delta_uev=implied_gap_uev(rn, area, jc),
                jc_fitted=jc_fit,
                residual=jc_fit - jc,
                rel_residual=(jc_fit - jc) / jc,
            )
        )
    return GapFitResult(delta_uev=delta, records=tuple(fitted))


@dataclass(frozen=True)
class MeasurementRecord:
    """One probed junction resistance with its location and run label."""

    wafer_id: str
    chip_id: str
    x_mm: float
    y_mm: float
    area_class_um2: float
    run_id: str
    rn_ohm: float
    jc_ua_um2: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.rn_ohm > 0:
            raise ValidationError("rn_ohm must be > 0")
        if not self.area_class_um2 > 0:
            raise ValidationError("area_class_um2 must be > 0")


GROUP_FIELDS = ("wafer", "chip", "area", "run")


def _group_key(record: MeasurementRecord, group_by: Sequence[str]) -> str:
    parts = []
    for g in group_by:
        if g == "wafer":
            parts.append(f"wafer={record.wafer_id}")
        elif g == "chip":
            parts.append(f"chip={record.chip_id}")
        elif g == "area":
            parts.append(f"area={record.area_class_um2:g}")
        elif g == "run":
            parts.append(f"run={record.run_id}")
        else:
            raise ValidationError(
                f"unknown group field {g!r}; expected subset of {GROUP_FIELDS}"
            )
    return "|".join(parts) if parts else "all"


@dataclass(frozen=True)
class JunctionRepeatability:
    """Spread of one physical junction's R_N across measurement runs."""

    wafer_id: str
    chip_id: str
    x_mm: float
    y_mm: float
    n_runs: int
    cv: float


@dataclass
class AggregateReport:
    group_stats: dict[str, StatsSummary]
    repeatability: list[JunctionRepeatability]
    warnings: list[str] = field(default_factory=list)

    @property
    def repeat_cv_summary(self) -> Optional[StatsSummary]:
        """Distribution of the per-junction repeat CVs, if >= 2 exist."""
        cvs = [j.cv for j in self.repeatability]
        if len(cvs) < 2:
            return None
        arr = np.asarray(cvs)
        mean = float(arr.mean())
        sd = float(arr.std(ddof=1))
        return StatsSummary(
            n=len(cvs), mean=mean, sd_sample=sd, cv=sd / mean if mean > 0 else 0.0
        )


def aggregate(
    records: Sequence[MeasurementRecord],
    group_by: Sequence[str] = ("wafer", "area"),
) -> AggregateReport:
    """Grouped resistance statistics plus a repeatability report.

    Records are grouped by any subset of wafer / chip / area / run and
    each group's R_N CV computed; groups too small for a sample sd are
    skipped with a warning. Junctions probed under more than one run_id
    additionally get a per-junction CV across their run means, the
    repeatability of parallel measurements.
    """
    if not records:
        raise ValidationError("no measurement records")

    groups: dict[str, list[float]] = {}
    for rec in records:
        groups.setdefault(_group_key(rec, group_by), []).append(rec.rn_ohm)

    warnings: list[str] = []
    group_stats: dict[str, StatsSummary] = {}
    for key in sorted(groups):
        vals = groups[key]
        if len(vals) < 2:
            warnings.append(f"group {key!r} skipped: {len(vals)} sample(s)")
            continue
        group_stats[key] = coefficient_of_variation(vals)

    # Repeatability: same physical junction probed under several run ids.
    junctions: dict[tuple[str, str, float, float], dict[str, list[float]]] = {}
    for rec in records:
        jkey = (rec.wafer_id, rec.chip_id, rec.x_mm, rec.y_mm)
        junctions.setdefault(jkey, {}).setdefault(rec.run_id, []).append(rec.rn_ohm)

    repeatability: list[JunctionRepeatability] = []
    for jkey in sorted(junctions):
        runs = junctions[jkey]
        if len(runs) < 2:
            continue
        run_means = [sum(v) / len(v) for _, v in sorted(runs.items())]
        mean = sum(run_means) / len(run_means)
        sd = math.sqrt(
            sum((v - mean) ** 2 for v in run_means) / (len(run_means) - 1)
        )
        wafer_id, chip_id, x_mm, y_mm = jkey
        repeatability.append(
            JunctionRepeatability(
                wafer_id=wafer_id,
                chip_id=chip_id,
                x_mm=x_mm,
                y_mm=y_mm,
                n_runs=len(runs),
                cv=sd / mean,
            )
        )
    return AggregateReport(
        group_stats=group_stats, repeatability=repeatability, warnings=warnings
    )
