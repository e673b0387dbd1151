"""Single-site shadow-evaporation geometry for Dolan-bridge junctions.

A two-layer organic mask (thick copolymer below, thin resist on top) is
metallized twice through the same aperture at different holder tilts.
Because the evaporant flux diverges from a source a finite throw away,
the local incidence angle, the sidewall film grown during the first
pass and the penumbra of the finite source all vary with position on
the wafer, so the printed electrode widths drift away from the drawn
mask dimensions.

Everything here is a pure function of its inputs: lengths in
nanometers, angles in radians (millimeters and degrees only at the
dataclass boundary), safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .errors import (
    DenominatorCollapse,
    DomainError,
    GrazingIncidence,
    NonPhysicalWidth,
    ValidationError,
)

NM_PER_MM = 1.0e6

#: Half-width (mm) of the band around an axis treated as "at center" when
#: choosing between the center and general branches of the width formulas.
DEFAULT_EPSILON_CENTER_MM = 0.5

#: Guard for the closed-form angle: arguments within this distance outside
#: [-1, 1] are clamped, anything further raises DomainError.
ACOS_ROUNDING_GUARD = 1e-12


class SourceKind(str, Enum):
    """Evaporation source extent: ideal point or finite-radius disk."""

    POINT = "point"
    DISK = "disk"


class ShadowAxis(str, Enum):
    """Wafer axis along which a holder tilt displaces shadows."""

    ALONG_X = "x"
    ALONG_Y = "y"


class TiltSign(str, Enum):
    """Direction of the holder tilt along its shadow axis."""

    PLUS = "+"
    MINUS = "-"


@dataclass(frozen=True)
class SourceModel:
    """Evaporation source geometry.

    distance_mm is the crucible-to-holder throw; radius_mm is the
    effective lateral extent of the melt, which sets the penumbra width
    of every mask shadow. A POINT source behaves as radius 0 regardless
    of the stored radius.
    """

    distance_mm: float
    radius_mm: float = 1.0
    kind: SourceKind = SourceKind.DISK

    def __post_init__(self) -> None:
        if not self.distance_mm > 0:
            raise ValidationError("source.distance_mm must be > 0")
        if self.radius_mm < 0:
            raise ValidationError("source.radius_mm must be >= 0")
        if self.radius_mm >= self.distance_mm:
            raise ValidationError("source.radius_mm must be < distance_mm")

    @property
    def effective_radius_mm(self) -> float:
        """Radius entering the formulas: 0 for a point source."""
        return 0.0 if self.kind is SourceKind.POINT else self.radius_mm


@dataclass(frozen=True)
class EvaporationStep:
    """One deposition pass: holder tilt, shadow direction and nominal
    film thickness calibrated at normal incidence."""

    tilt_deg: float
    shadow_axis: ShadowAxis
    tilt_sign: TiltSign = TiltSign.PLUS
    film_t0_nm: float = 25.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.tilt_deg < 90.0:
            raise ValidationError(
                f"step.tilt_deg must satisfy 0 <= tilt < 90, got {self.tilt_deg}"
            )
        if not self.film_t0_nm > 0:
            raise ValidationError("step.film_t0_nm must be > 0")

    @property
    def tilt_rad(self) -> float:
        return math.radians(self.tilt_deg)


@dataclass(frozen=True)
class MaskStack:
    """Two-layer organic mask: top resist of thickness H over a bottom
    copolymer (undercut) layer of thickness h, both in nm."""

    top_nm: float = 100.0
    bottom_nm: float = 500.0

    def __post_init__(self) -> None:
        if not self.top_nm > 0:
            raise ValidationError("mask.top_H_nm must be > 0")
        if not self.bottom_nm > 0:
            raise ValidationError("mask.bottom_h_nm must be > 0")


@dataclass(frozen=True)
class JunctionSpec:
    """Drawn aperture widths: the bottom electrode's printed width varies
    along x, the top electrode's along y."""

    drawn_bottom_nm: float = 200.0
    drawn_top_nm: float = 200.0

    def __post_init__(self) -> None:
        if not self.drawn_bottom_nm > 0:
            raise ValidationError("junction.drawn_w_bottom_nm must be > 0")
        if not self.drawn_top_nm > 0:
            raise ValidationError("junction.drawn_w_top_nm must be > 0")


@dataclass(frozen=True)
class WaferSite:
    """Signed offsets (mm) from the wafer center, with optional ids."""

    x_mm: float
    y_mm: float
    chip_id: Optional[str] = None
    site_id: Optional[str] = None

    def radius_mm(self) -> float:
        return math.hypot(self.x_mm, self.y_mm)


def _source_position_mm(
    step: EvaporationStep, source: SourceModel
) -> tuple[float, float, float]:
    """Source center in wafer coordinates for a tilted holder.

    Tilting the holder by a0 about the axis perpendicular to the shadow
    axis is equivalent to placing the source at throw distance D along a
    direction inclined a0 from the wafer normal, displaced along the
    shadow axis in the direction given by tilt_sign.
    """
    d = source.distance_mm
    lateral = d * math.sin(step.tilt_rad)
    if step.tilt_sign is TiltSign.MINUS:
        lateral = -lateral
    if step.shadow_axis is ShadowAxis.ALONG_X:
        return lateral, 0.0, d * math.cos(step.tilt_rad)
    return 0.0, lateral, d * math.cos(step.tilt_rad)


def local_incidence_angle(
    site: WaferSite, step: EvaporationStep, source: SourceModel
) -> float:
    """Incidence angle theta (rad, from the substrate normal) of the ray
    from the source center to the site.

    At the wafer center this is exactly the holder tilt; away from the
    center the diverging flux cone steepens or shallows it. Raises
    GrazingIncidence for theta >= 90 deg (site unreachable by flux).
    """
    sx, sy, sz = _source_position_mm(step, source)
    lateral = math.hypot(sx - site.x_mm, sy - site.y_mm)
    # atan2 keeps the angle exact at the wafer center (lateral/normal is
    # tan(tilt) there) and well conditioned near normal incidence.
    theta = math.atan2(lateral, sz)
    if theta >= math.pi / 2:
        raise GrazingIncidence(
            f"flux incidence >= 90 deg at site ({site.x_mm}, {site.y_mm}) mm"
        )
    return theta


def closed_form_complement_angle(
    y_mm: float, step: EvaporationStep, source: SourceModel, sign: int = +1
) -> float:
    """Closed-form angle along the tilt axis, complement convention.

    Evaluates, for offset y and throw D at tilt a0,

        alpha' = acos((y + D sin a0) / sqrt(y^2 + D^2 +/- 2 y D sin a0))

    which returns the complement of the ray-traced incidence angle: for
    matched sign conventions cos^2(alpha') + cos^2(theta) = 1. Kept as a
    cross-check only; `local_incidence_angle` is the normative angle.
    """
    if sign not in (+1, -1):
        raise ValidationError("sign must be +1 or -1")
    d = source.distance_mm
    num = y_mm + d * math.sin(step.tilt_rad)
    radicand = y_mm * y_mm + d * d + sign * 2.0 * y_mm * d * math.sin(step.tilt_rad)
    if radicand <= 0.0:
        raise DomainError(f"degenerate geometry: radicand {radicand} <= 0")
    arg = num / math.sqrt(radicand)
    if abs(arg) > 1.0 + ACOS_ROUNDING_GUARD:
        raise DomainError(f"acos argument {arg} outside [-1, 1]")
    return math.acos(max(-1.0, min(1.0, arg)))


def sidewall_thickness(theta_first_rad: float, t0_nm: float) -> float:
    """Film thickness grown on the mask during the first (bottom) pass.

    T' = T0 cos^2(theta); T0 is the thickness calibrated at normal
    incidence, theta the local incidence angle of the bottom-electrode
    evaporation at this site. This film narrows the aperture seen by
    the second pass.
    """
    if not 0.0 <= theta_first_rad < math.pi / 2:
        raise ValueError("theta must be in [0, 90 deg)")
    if not t0_nm > 0:
        raise ValueError("t0_nm must be > 0")
    c = math.cos(theta_first_rad)
    return t0_nm * c * c


def bottom_width_formula(
    drawn: float,
    offset: float,
    source_radius: float,
    throw: float,
    mask_top: float,
    mask_bottom: float,
    theta_rad: float,
    center_branch: bool,
) -> float:
    """Printed bottom-electrode width, all lengths in one consistent unit.

    Center branch:   W + (c + W) h / (D cos t - h)
    General branch:  W + (|x| + c + W/2)(H + h) / (D cos t - H)

    The formulas are homogeneous of degree one in the lengths, so any
    single unit gives the same result up to rounding.
    """
    cos_t = math.cos(theta_rad)
    if center_branch:
        denom = throw * cos_t - mask_bottom
        if denom <= 0.0:
            raise DenominatorCollapse(
                "projected throw D cos(theta) does not clear the bottom mask layer"
            )
        width = drawn + (source_radius + drawn) * mask_bottom / denom
    else:
        denom = throw * cos_t - mask_top
        if denom <= 0.0:
            raise DenominatorCollapse(
                "projected throw D cos(theta) does not clear the top mask layer"
            )
        width = drawn + (abs(offset) + source_radius + 0.5 * drawn) * (
            mask_top + mask_bottom
        ) / denom
    if width <= 0.0:
        raise NonPhysicalWidth(f"bottom width {width} <= 0")
    return width


def top_width_formula(
    drawn: float,
    sidewall: float,
    offset: float,
    source_radius: float,
    throw: float,
    mask_top: float,
    mask_bottom: float,
    theta_rad: float,
    center_branch: bool,
) -> float:
    """Printed top-electrode width, all lengths in one consistent unit.

    Center branch:   W - T' - (2 D sin t + 2c + W) h / (D - h)
    General branch:  W - T' - H (D sin t - c - W/2) / (D cos t - T' - H - h)

    T' is the sidewall film grown during the bottom pass, which narrows
    the aperture before this (second) evaporation.
    """
    sin_t = math.sin(theta_rad)
    cos_t = math.cos(theta_rad)
    if center_branch:
        denom = throw - mask_bottom
        if denom <= 0.0:
            raise DenominatorCollapse("throw D does not clear the bottom mask layer")
        width = (
            drawn
            - sidewall
            - (2.0 * throw * sin_t + 2.0 * source_radius + drawn)
            * mask_bottom
            / denom
        )
    else:
        denom = throw * cos_t - sidewall - mask_top - mask_bottom
        if denom <= 0.0:
            raise DenominatorCollapse(
                "projected throw D cos(theta) does not clear the film-coated mask"
            )
        width = (
            drawn
            - sidewall
            - mask_top
            * (throw * sin_t - source_radius - 0.5 * drawn)
            / denom
        )
    if width <= 0.0:
        raise NonPhysicalWidth(
            f"top width {width} <= 0 (aperture closed by sidewall film and shadowing)"
        )
    return width


def bottom_width(
    junction: JunctionSpec,
    mask: MaskStack,
    theta_rad: float,
    x_mm: float,
    source: SourceModel,
    *,
    epsilon_center_mm: float = DEFAULT_EPSILON_CENTER_MM,
) -> float:
    """Printed bottom-electrode width (nm) at offset x along the wafer.

    theta_rad must be the local incidence angle of the bottom-electrode
    evaporation at this site. Sites with |x| <= epsilon_center_mm use
    the center branch of the width formula.
    """
    return bottom_width_formula(
        drawn=junction.drawn_bottom_nm,
        offset=x_mm * NM_PER_MM,
        source_radius=source.effective_radius_mm * NM_PER_MM,
        throw=source.distance_mm * NM_PER_MM,
        mask_top=mask.top_nm,
        mask_bottom=mask.bottom_nm,
        theta_rad=theta_rad,
        center_branch=abs(x_mm) <= epsilon_center_mm,
    )


def top_width(
    junction: JunctionSpec,
    mask: MaskStack,
    theta_rad: float,
    t_prime_nm: float,
    y_mm: float,
    source: SourceModel,
    *,
    epsilon_center_mm: float = DEFAULT_EPSILON_CENTER_MM,
) -> float:
    """Printed top-electrode width (nm) at offset y along the wafer.

    theta_rad is the local incidence angle of the top-electrode
    evaporation; t_prime_nm the sidewall film thickness grown during
    the bottom pass at the same site (see `sidewall_thickness`).
    """
    return top_width_formula(
        drawn=junction.drawn_top_nm,
        sidewall=t_prime_nm,
        offset=y_mm * NM_PER_MM,
        source_radius=source.effective_radius_mm * NM_PER_MM,
        throw=source.distance_mm * NM_PER_MM,
        mask_top=mask.top_nm,
        mask_bottom=mask.bottom_nm,
        theta_rad=theta_rad,
        center_branch=abs(y_mm) <= epsilon_center_mm,
    )


def overlap_area(w_bottom_nm: float, w_top_nm: float) -> float:
    """Junction overlap area in um^2 from the two printed widths (nm)."""
    if not (w_bottom_nm > 0 and w_top_nm > 0):
        raise ValueError("widths must be > 0")
    return w_bottom_nm * w_top_nm / 1.0e6
