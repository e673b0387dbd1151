"""Wafer-scale sweeps of the junction geometry model and their inverse.

`simulate_wafer` evaluates the single-site model over a grid to produce
dimension, area and bias maps; `bias_profile` reproduces the model
comparison (constant bias vs point source vs non-point source) along
one axis; `compensate_site`/`compensate_wafer` invert the width
formulas analytically into per-site drawn-dimension corrections that
flatten the printed-area map.

Convention: each electrode's width varies along its own wafer axis
(bottom along x, top along y), and the incidence angle entering an
electrode's width formula is evaluated at the site's projection onto
that axis, i.e. in the plane containing the shadow displacement. This
keeps each electrode's printed width a one-dimensional function of its
own coordinate; the sidewall film links the top width to the bottom
step's angle at the same site.

Site evaluations are independent pure functions; results are always
ordered by (row, column) so any execution strategy yields identical
output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Sequence, Union

from . import geometry
from .errors import (
    AxisMismatch,
    EmptyInput,
    ShadowEvapError,
    Unreachable,
    ValidationError,
)
from .geometry import (
    EvaporationStep,
    JunctionSpec,
    MaskStack,
    SourceKind,
    SourceModel,
    WaferSite,
)
from .stats import StatsSummary, coefficient_of_variation


class BiasModel(str, Enum):
    """Forward-model variants for the bias comparison.

    CONSTANT applies the wafer-center printed widths everywhere (no
    spatial dependence); POINT_SOURCE is the geometric model with the
    source radius forced to zero; NON_POINT uses the configured finite
    source radius.
    """

    CONSTANT = "I"
    POINT_SOURCE = "II"
    NON_POINT = "III"


class Axis(str, Enum):
    X = "x"
    Y = "y"


class Electrode(str, Enum):
    BOTTOM = "bottom"
    TOP = "top"


@dataclass(frozen=True)
class WaferLayout:
    """Grid of measurement/junction sites on the wafer.

    The default grid covers a centered working square of
    working_span_mm at grid_pitch_mm spacing, always symmetric about
    and including the center. An explicit site list overrides the grid.
    """

    wafer_diameter_mm: float = 100.0
    working_span_mm: float = 70.0
    grid_pitch_mm: float = 5.0
    sites: Optional[tuple[WaferSite, ...]] = None
    enforce_span_check: bool = False

    def __post_init__(self) -> None:
        if not self.wafer_diameter_mm > 0:
            raise ValidationError("wafer.diameter_mm must be > 0")
        if not self.working_span_mm > 0:
            raise ValidationError("wafer.working_span_mm must be > 0")
        if not self.grid_pitch_mm > 0:
            raise ValidationError("wafer.grid_pitch_mm must be > 0")
        if self.enforce_span_check:
            if self.working_span_mm > self.wafer_diameter_mm * math.sqrt(2.0) / 2.0:
                raise ValidationError(
                    "working_span_mm too large: square corners leave the wafer"
                )

    def generate_sites(self) -> list[WaferSite]:
        """Sites ordered by (row, column), i.e. y then x ascending."""
        if self.sites is not None:
            ordered = sorted(self.sites, key=lambda s: (s.y_mm, s.x_mm))
        else:
            half_steps = int(math.floor(self.working_span_mm / 2.0 / self.grid_pitch_mm))
            offsets = [i * self.grid_pitch_mm for i in range(-half_steps, half_steps + 1)]
            ordered = [WaferSite(x, y) for y in offsets for x in offsets]
        radius = self.wafer_diameter_mm / 2.0
        for s in ordered:
            if s.radius_mm() > radius + 1e-9:
                raise ValidationError(
                    f"site ({s.x_mm}, {s.y_mm}) mm lies outside the wafer"
                )
        return ordered


@dataclass(frozen=True)
class ProcessConfig:
    """Full process stack for one wafer run."""

    layout: WaferLayout
    source: SourceModel
    mask: MaskStack
    junction: JunctionSpec
    bottom_step: EvaporationStep
    top_step: EvaporationStep
    epsilon_center_mm: float = geometry.DEFAULT_EPSILON_CENTER_MM

    def __post_init__(self) -> None:
        if self.epsilon_center_mm < 0:
            raise ValidationError("epsilon_center_mm must be >= 0")


@dataclass(frozen=True)
class SiteResult:
    """Model evaluation at one site. Biases are deviations of the
    printed widths from the same run's wafer-center printed widths."""

    site: WaferSite
    theta_bottom_rad: float
    theta_top_rad: float
    t_prime_nm: float
    w_bottom_nm: float
    w_top_nm: float
    area_um2: float
    bias_bottom_nm: float
    bias_top_nm: float


def _model_source(source: SourceModel, model: BiasModel) -> SourceModel:
    if model is BiasModel.POINT_SOURCE:
        return replace(source, kind=SourceKind.POINT)
    return source


def _site_geometry(
    config: ProcessConfig,
    source: SourceModel,
    x_mm: float,
    y_mm: float,
    junction: Optional[JunctionSpec] = None,
) -> tuple[float, float, float, float, float]:
    """(theta_bottom, theta_top, t_prime, w_bottom, w_top) at one site.

    Angles are evaluated at the site's projection onto each electrode's
    width axis: (x, 0) for the bottom electrode, (0, y) for the top.
    """
    jspec = junction if junction is not None else config.junction
    theta_b = geometry.local_incidence_angle(
        WaferSite(x_mm, 0.0), config.bottom_step, source
    )
    theta_t = geometry.local_incidence_angle(
        WaferSite(0.0, y_mm), config.top_step, source
    )
    t_prime = geometry.sidewall_thickness(theta_b, config.bottom_step.film_t0_nm)
    w_b = geometry.bottom_width(
        jspec, config.mask, theta_b, x_mm, source,
        epsilon_center_mm=config.epsilon_center_mm,
    )
    w_t = geometry.top_width(
        jspec, config.mask, theta_t, t_prime, y_mm, source,
        epsilon_center_mm=config.epsilon_center_mm,
    )
    return theta_b, theta_t, t_prime, w_b, w_t


def center_reference_widths(
    config: ProcessConfig, model: BiasModel = BiasModel.NON_POINT
) -> tuple[float, float]:
    """Printed (w_bottom, w_top) in nm at the wafer center, the zero
    point of every bias map for that model."""
    source = _model_source(config.source, model)
    _, _, _, w_b, w_t = _site_geometry(config, source, 0.0, 0.0)
    return w_b, w_t


def simulate_wafer(
    config: ProcessConfig, model: BiasModel = BiasModel.NON_POINT
) -> list[SiteResult]:
    """Evaluate the forward model at every layout site.

    Results are ordered by (row, column). Geometry errors are re-raised
    with the offending site coordinates prepended.
    """
    source = _model_source(config.source, model)
    th_b0, th_t0, tp0, w_b0, w_t0 = _site_geometry(config, source, 0.0, 0.0)
    results: list[SiteResult] = []
    for site in config.layout.generate_sites():
        if model is BiasModel.CONSTANT:
            th_b, th_t, tp, w_b, w_t = th_b0, th_t0, tp0, w_b0, w_t0
        else:
            try:
                th_b, th_t, tp, w_b, w_t = _site_geometry(
                    config, source, site.x_mm, site.y_mm
                )
            except ShadowEvapError as exc:
                raise type(exc)(
                    f"site ({site.x_mm}, {site.y_mm}) mm: {exc}"
                ) from exc
        results.append(
            SiteResult(
                site=site,
                theta_bottom_rad=th_b,
                theta_top_rad=th_t,
                t_prime_nm=tp,
                w_bottom_nm=w_b,
                w_top_nm=w_t,
                area_um2=geometry.overlap_area(w_b, w_t),
                bias_bottom_nm=w_b - w_b0,
                bias_top_nm=w_t - w_t0,
            )
        )
    return results


@dataclass(frozen=True)
class BiasProfile:
    """Bias vs offset along one axis for one electrode and model."""

    electrode: Electrode
    axis: Axis
    model: BiasModel
    center_width_nm: float
    points: tuple[tuple[float, float], ...]  # (offset_mm, bias_nm)


def bias_profile(
    config: ProcessConfig,
    axis: Axis,
    electrode: Electrode,
    model: BiasModel = BiasModel.NON_POINT,
) -> BiasProfile:
    """Electrode width bias along the electrode's varying axis.

    The pairing is fixed by the overlap-area convention: the bottom
    electrode varies along x, the top along y; any other combination
    raises AxisMismatch. Bias is relative to the same model's center
    width, so every profile is zero at offset 0 and the CONSTANT model
    is zero everywhere. The models' absolute width offsets (e.g. the
    point vs non-point penumbra term) live in center_width_nm.
    """
    if (electrode is Electrode.BOTTOM) != (axis is Axis.X):
        raise AxisMismatch(
            f"electrode {electrode.value} varies along "
            f"{'x' if electrode is Electrode.BOTTOM else 'y'}, not {axis.value}"
        )
    source = _model_source(config.source, model)
    _, _, _, w_b0, w_t0 = _site_geometry(config, source, 0.0, 0.0)
    center = w_b0 if electrode is Electrode.BOTTOM else w_t0

    half_steps = int(
        math.floor(config.layout.working_span_mm / 2.0 / config.layout.grid_pitch_mm)
    )
    offsets = [
        i * config.layout.grid_pitch_mm for i in range(-half_steps, half_steps + 1)
    ]
    points = []
    for off in offsets:
        if model is BiasModel.CONSTANT:
            width = center
        else:
            x, y = (off, 0.0) if electrode is Electrode.BOTTOM else (0.0, off)
            _, _, _, w_b, w_t = _site_geometry(config, source, x, y)
            width = w_b if electrode is Electrode.BOTTOM else w_t
        points.append((off, width - center))
    return BiasProfile(
        electrode=electrode,
        axis=axis,
        model=model,
        center_width_nm=center,
        points=tuple(points),
    )


#: Largest drawn dimension (nm) a correction may request.
DEFAULT_MAX_DRAWN_NM = 5000.0


def compensate_site(
    config: ProcessConfig,
    site: WaferSite,
    target_w_bottom_nm: float,
    target_w_top_nm: float,
    *,
    max_drawn_nm: float = DEFAULT_MAX_DRAWN_NM,
) -> tuple[float, float]:
    """Drawn widths that print as the requested widths at this site.

    Both width formulas are affine in their drawn dimension (the angle
    and sidewall film do not depend on it), so the inverse is closed
    form; forward-evaluating the returned pair reproduces the targets
    to rounding error. Raises Unreachable when the required drawn width
    is non-positive or exceeds max_drawn_nm.
    """
    if not (target_w_bottom_nm > 0 and target_w_top_nm > 0):
        raise ValidationError("target widths must be > 0")
    source = config.source
    theta_b = geometry.local_incidence_angle(
        WaferSite(site.x_mm, 0.0), config.bottom_step, source
    )
    theta_t = geometry.local_incidence_angle(
        WaferSite(0.0, site.y_mm), config.top_step, source
    )
    t_prime = geometry.sidewall_thickness(theta_b, config.bottom_step.film_t0_nm)

    d = source.distance_mm * geometry.NM_PER_MM
    c = source.effective_radius_mm * geometry.NM_PER_MM
    big_h = config.mask.top_nm
    lil_h = config.mask.bottom_nm
    eps = config.epsilon_center_mm

    # Bottom electrode: W' = W (1 + a) + b  =>  W = (W' - b) / (1 + a).
    if abs(site.x_mm) <= eps:
        k = lil_h / (d * math.cos(theta_b) - lil_h)
        a_b, b_b = k, c * k
    else:
        k = (big_h + lil_h) / (d * math.cos(theta_b) - big_h)
        a_b = 0.5 * k
        b_b = (abs(site.x_mm) * geometry.NM_PER_MM + c) * k
    drawn_b = (target_w_bottom_nm - b_b) / (1.0 + a_b)

    # Top electrode: W' = W (1 - a) - b  =>  W = (W' + b) / (1 - a).
    if abs(site.y_mm) <= eps:
        k = lil_h / (d - lil_h)
        a_t = k
        b_t = t_prime + (2.0 * d * math.sin(theta_t) + 2.0 * c) * k
    else:
        k = big_h / (d * math.cos(theta_t) - t_prime - big_h - lil_h)
        a_t = -0.5 * k
        b_t = t_prime + (d * math.sin(theta_t) - c) * k
    if 1.0 - a_t <= 0.0:
        raise Unreachable(
            f"site ({site.x_mm}, {site.y_mm}) mm: top-width relation degenerate"
        )
    drawn_t = (target_w_top_nm + b_t) / (1.0 - a_t)

    for name, val in (("bottom", drawn_b), ("top", drawn_t)):
        if val <= 0.0:
            raise Unreachable(
                f"site ({site.x_mm}, {site.y_mm}) mm: required drawn {name} "
                f"width {val:.3f} nm <= 0"
            )
        if val > max_drawn_nm:
            raise Unreachable(
                f"site ({site.x_mm}, {site.y_mm}) mm: required drawn {name} "
                f"width {val:.1f} nm exceeds {max_drawn_nm} nm"
            )
    return drawn_b, drawn_t


@dataclass(frozen=True)
class CenterWidthsTarget:
    """Make every site print like the wafer center does."""


@dataclass(frozen=True)
class ExplicitAreaTarget:
    """Print a given overlap area (um^2) everywhere; aspect is
    w_bottom / w_top of the printed junction, 1.0 for square."""

    area_um2: float
    aspect: float = 1.0

    def __post_init__(self) -> None:
        if not self.area_um2 > 0:
            raise ValidationError("target area must be > 0")
        if not self.aspect > 0:
            raise ValidationError("target aspect must be > 0")


CompensationTarget = Union[CenterWidthsTarget, ExplicitAreaTarget]


@dataclass(frozen=True)
class CorrectionRow:
    site: WaferSite
    drawn_w_bottom_nm: float
    drawn_w_top_nm: float
    predicted_area_um2: float
    residual_area_rel: float


@dataclass(frozen=True)
class CorrectionTable:
    target_w_bottom_nm: float
    target_w_top_nm: float
    rows: tuple[CorrectionRow, ...]
    rejections: tuple[tuple[WaferSite, str], ...]


def resolve_target_widths(
    config: ProcessConfig, target: CompensationTarget
) -> tuple[float, float]:
    """Printed-width pair a compensation target asks for."""
    if isinstance(target, CenterWidthsTarget):
        return center_reference_widths(config)
    area_nm2 = target.area_um2 * 1.0e6
    return (
        math.sqrt(area_nm2 * target.aspect),
        math.sqrt(area_nm2 / target.aspect),
    )


def compensate_wafer(
    config: ProcessConfig,
    target: CompensationTarget = CenterWidthsTarget(),
    *,
    max_drawn_nm: float = DEFAULT_MAX_DRAWN_NM,
) -> CorrectionTable:
    """Per-site drawn-dimension corrections that flatten the area map.

    Unreachable sites are collected into the rejection list instead of
    aborting the sweep; rows are ordered like `simulate_wafer` output.
    """
    tw_b, tw_t = resolve_target_widths(config, target)
    target_area = tw_b * tw_t / 1.0e6
    rows: list[CorrectionRow] = []
    rejections: list[tuple[WaferSite, str]] = []
    for site in config.layout.generate_sites():
        try:
            drawn_b, drawn_t = compensate_site(
                config, site, tw_b, tw_t, max_drawn_nm=max_drawn_nm
            )
        except Unreachable as exc:
            rejections.append((site, str(exc)))
            continue
        corrected = JunctionSpec(drawn_bottom_nm=drawn_b, drawn_top_nm=drawn_t)
        _, _, _, w_b, w_t = _site_geometry(
            config, config.source, site.x_mm, site.y_mm, junction=corrected
        )
        area = geometry.overlap_area(w_b, w_t)
        rows.append(
            CorrectionRow(
                site=site,
                drawn_w_bottom_nm=drawn_b,
                drawn_w_top_nm=drawn_t,
                predicted_area_um2=area,
                residual_area_rel=(area - target_area) / target_area,
            )
        )
    return CorrectionTable(
        target_w_bottom_nm=tw_b,
        target_w_top_nm=tw_t,
        rows=tuple(rows),
        rejections=tuple(rejections),
    )


def resimulate_with_corrections(
    config: ProcessConfig, corrections: Sequence[CorrectionRow]
) -> list[SiteResult]:
    """Forward-simulate a wafer whose drawn dimensions follow a
    correction table (the verification half of the compensation loop)."""
    if not corrections:
        raise EmptyInput("no correction rows")
    w_b0, w_t0 = center_reference_widths(config)
    results = []
    for row in sorted(corrections, key=lambda r: (r.site.y_mm, r.site.x_mm)):
        jspec = JunctionSpec(
            drawn_bottom_nm=row.drawn_w_bottom_nm, drawn_top_nm=row.drawn_w_top_nm
        )
        th_b, th_t, tp, w_b, w_t = _site_geometry(
            config, config.source, row.site.x_mm, row.site.y_mm, junction=jspec
        )
        results.append(
            SiteResult(
                site=row.site,
                theta_bottom_rad=th_b,
                theta_top_rad=th_t,
                t_prime_nm=tp,
                w_bottom_nm=w_b,
                w_top_nm=w_t,
                area_um2=geometry.overlap_area(w_b, w_t),
                bias_bottom_nm=w_b - w_b0,
                bias_top_nm=w_t - w_t0,
            )
        )
    return results


def residual_report(results: Sequence[SiteResult]) -> StatsSummary:
    """Area-field statistics of a simulated map (mean, sd, CV)."""
    if not results:
        raise EmptyInput("no site results")
    return coefficient_of_variation([r.area_um2 for r in results])


def branch_discontinuity_nm(config: ProcessConfig) -> tuple[float, float]:
    """Width jump (general minus center branch) for each electrode at
    the epsilon_center boundary, reported for transparency since the
    printed formulas are discontinuous there."""
    eps = config.epsilon_center_mm
    source = config.source
    theta_b = geometry.local_incidence_angle(
        WaferSite(eps, 0.0), config.bottom_step, source
    )
    theta_t = geometry.local_incidence_angle(
        WaferSite(0.0, eps), config.top_step, source
    )
    t_prime = geometry.sidewall_thickness(theta_b, config.bottom_step.film_t0_nm)
    d_nm = source.distance_mm * geometry.NM_PER_MM
    c_nm = source.effective_radius_mm * geometry.NM_PER_MM
    args_b = dict(
        drawn=config.junction.drawn_bottom_nm,
        offset=eps * geometry.NM_PER_MM,
        source_radius=c_nm,
        throw=d_nm,
        mask_top=config.mask.top_nm,
        mask_bottom=config.mask.bottom_nm,
        theta_rad=theta_b,
    )
    jump_b = geometry.bottom_width_formula(
        center_branch=False, **args_b
    ) - geometry.bottom_width_formula(center_branch=True, **args_b)
    args_t = dict(
        drawn=config.junction.drawn_top_nm,
        sidewall=t_prime,
        offset=eps * geometry.NM_PER_MM,
        source_radius=c_nm,
        throw=d_nm,
        mask_top=config.mask.top_nm,
        mask_bottom=config.mask.bottom_nm,
        theta_rad=theta_t,
    )
    jump_t = geometry.top_width_formula(
        center_branch=False, **args_t
    ) - geometry.top_width_formula(center_branch=True, **args_t)
    return jump_b, jump_t
