"""Acceptance suite: ten release criteria, one pass/fail line each.

Run with `pytest -s tests/test_acceptance.py` to see the lines.
"""

import functools
import math
import time

import numpy as np
import pytest

from conftest import CONSISTENT_WAFERS, WAFER_TABLE
from shadowevap.cli import main as cli_main
from shadowevap.config import default_config
from shadowevap.csvio import export_measurements, import_site_map
from shadowevap.geometry import (
    EvaporationStep,
    JunctionSpec,
    ShadowAxis,
    SourceModel,
    TiltSign,
    WaferSite,
    bottom_width_formula,
    local_incidence_angle,
    closed_form_complement_angle,
    sidewall_thickness,
)
from shadowevap.stats import (
    PLANCK_J_S,
    MeasurementRecord,
    QubitParams,
    coefficient_of_variation,
    fit_gap,
    propagate_cv_monte_carlo,
    resistance_sensitivity,
    transmon_frequency,
)
from shadowevap.wafer import (
    BiasModel,
    CenterWidthsTarget,
    compensate_wafer,
    residual_report,
    resimulate_with_corrections,
    simulate_wafer,
)

from dataclasses import replace


def criterion(number, title):
    """Print a PASS/FAIL line for one acceptance criterion."""

    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"FAIL  criterion {number}: {title}")
                raise
            print(f"PASS  criterion {number}: {title}")

        return wrapper

    return deco


GRID_OFFSETS = [5.0 * i for i in range(-7, 8)]  # 15 points over 70 mm


@criterion(1, "angle consistency (closed form complements ray trace)")
def test_c01_angle_consistency():
    t0 = time.perf_counter()
    source = SourceModel(distance_mm=650.0, radius_mm=1.0)
    for tilt_deg in (0.0, 40.0):
        step = EvaporationStep(
            tilt_deg=tilt_deg,
            shadow_axis=ShadowAxis.ALONG_Y,
            tilt_sign=TiltSign.MINUS,
        )
        theta0 = local_incidence_angle(WaferSite(0.0, 0.0), step, source)
        assert abs(theta0 - math.radians(tilt_deg)) < 1e-12
        for y in GRID_OFFSETS:
            alpha = closed_form_complement_angle(y, step, source, sign=+1)
            theta = local_incidence_angle(WaferSite(0.0, y), step, source)
            assert abs(math.cos(alpha) ** 2 + math.cos(theta) ** 2 - 1.0) < 1e-9
    assert time.perf_counter() - t0 < 1.0


@criterion(2, "point-source model nests in the non-point model bit-for-bit")
def test_c02_point_source_nesting():
    t0 = time.perf_counter()
    config = default_config()
    zero_radius = replace(config, source=replace(config.source, radius_mm=0.0))
    got_ii = simulate_wafer(config, BiasModel.POINT_SOURCE)
    got_iii = simulate_wafer(zero_radius, BiasModel.NON_POINT)
    assert len(got_ii) == len(got_iii) == 225
    for a, b in zip(got_ii, got_iii):
        assert a.theta_bottom_rad == b.theta_bottom_rad
        assert a.theta_top_rad == b.theta_top_rad
        assert a.t_prime_nm == b.t_prime_nm
        assert a.w_bottom_nm == b.w_bottom_nm
        assert a.w_top_nm == b.w_top_nm
        assert a.area_um2 == b.area_um2
        assert a.bias_bottom_nm == b.bias_bottom_nm
        assert a.bias_top_nm == b.bias_top_nm
    assert time.perf_counter() - t0 < 1.0


@criterion(3, "compensation round-trip flattens the area map below 0.05% CV")
def test_c03_compensation_round_trip():
    t0 = time.perf_counter()
    config = default_config()
    table = compensate_wafer(config, CenterWidthsTarget())
    assert len(table.rows) == 225 and not table.rejections
    resim = resimulate_with_corrections(config, table.rows)
    assert residual_report(resim).cv_percent < 0.05
    assert time.perf_counter() - t0 < 5.0


@criterion(4, "uncompensated area spread is plausible (CV_A in [5%, 10%])")
def test_c04_uncompensated_spread():
    config = default_config()
    drawn = math.sqrt(0.025e6)  # square junction of the 0.025 um^2 class
    config = replace(
        config, junction=JunctionSpec(drawn_bottom_nm=drawn, drawn_top_nm=drawn)
    )
    summary = residual_report(simulate_wafer(config))
    assert 5.0 <= summary.cv_percent <= 10.0


@criterion(5, "measured J_c table implies one superconducting gap")
def test_c05_gap_consistency():
    t0 = time.perf_counter()
    rows = [r for r in WAFER_TABLE if r[0] in CONSISTENT_WAFERS]
    assert len(rows) == 6
    implied = {}
    for wafer, area, rn, jc in rows:
        delta = 2.0 * rn * jc * area / math.pi
        assert 215.0 <= delta <= 245.0
        implied.setdefault(wafer, []).append(delta)
    for wafer, deltas in implied.items():
        spread = (max(deltas) - min(deltas)) / (sum(deltas) / len(deltas))
        assert spread < 0.12
    fit = fit_gap([(rn, area, jc) for _, area, rn, jc in rows])
    assert all(abs(r.rel_residual) < 0.10 for r in fit.records)
    assert time.perf_counter() - t0 < 1.0


@criterion(6, "frequency law matches an independent oracle")
def test_c06_frequency_law():
    params = QubitParams(gap_delta_uev=180.0, ec_mhz=270.0)
    # Independent scalar arithmetic with its own constant literals.
    e = 1.602176634e-19
    h = 6.62607015e-34
    phi0 = h / (2.0 * e)
    delta_j = 180.0e-6 * e
    ec_j = h * 270.0e6
    oracle = (math.sqrt(2.0 * delta_j * phi0 * ec_j / (e * 8000.0)) - ec_j) / h
    got = transmon_frequency(8000.0, params)
    assert got == pytest.approx(oracle, rel=1e-9)
    assert got == pytest.approx(5.89e9, rel=2e-3)
    hf1 = PLANCK_J_S * transmon_frequency(8000.0, params) + params.ec_j
    hf4 = PLANCK_J_S * transmon_frequency(32000.0, params) + params.ec_j
    assert hf4 == hf1 / 2.0


@criterion(7, "Monte-Carlo CV propagation tracks the analytic sensitivity")
def test_c07_cv_propagation():
    t0 = time.perf_counter()
    params = QubitParams(gap_delta_uev=180.0, ec_mhz=270.0)
    result = propagate_cv_monte_carlo(
        8000.0, 0.06, params, n_samples=100_000, seed=12345
    )
    assert 0.50 <= result.cv_ratio <= 0.55
    s = 1e-6
    fd = (
        math.log(transmon_frequency(8000.0 * math.exp(s), params))
        - math.log(transmon_frequency(8000.0 * math.exp(-s), params))
    ) / (2.0 * s)
    assert abs(resistance_sensitivity(8000.0, params) - fd) < 1e-6
    assert time.perf_counter() - t0 < 5.0


@criterion(8, "statistics kernel: exact CV with the n-1 estimator")
def test_c08_statistics_kernel():
    summary = coefficient_of_variation([9.0, 10.0, 11.0])
    assert summary.cv == 0.1
    assert summary.cv_percent == 10.0
    base = coefficient_of_variation([9.0, 10.0, 11.0]).cv
    for k in (7.0, 1e-3, 123.456):
        scaled = coefficient_of_variation([9.0 * k, 10.0 * k, 11.0 * k]).cv
        assert abs(scaled - base) / base < 1e-12


@criterion(9, "limit suite: loss terms vanish exactly in the degenerate limits")
def test_c09_limit_suite():
    # Bottom layer -> 0, point source, center site: drawn width unchanged.
    got = bottom_width_formula(
        drawn=200.0,
        offset=0.0,
        source_radius=0.0,
        throw=6.5e8,
        mask_top=100.0,
        mask_bottom=0.0,
        theta_rad=math.radians(40.0),
        center_branch=True,
    )
    assert got == 200.0
    assert sidewall_thickness(0.0, 25.0) == 25.0
    got60 = sidewall_thickness(math.radians(60.0), 25.0)
    assert abs(got60 - 25.0 / 4.0) / (25.0 / 4.0) < 1e-12


def _run_pipeline(workdir):
    """simulate -> export -> import -> synthesize measurements -> analyze."""
    config_path = workdir / "process.yaml"
    config_path.write_text("junction:\n  drawn_w_bottom_nm: 200\n")
    sites_csv = workdir / "sites.csv"
    assert cli_main(["simulate", "--config", str(config_path), "--out", str(sites_csv)]) == 0

    # Deterministic synthetic resistances: R_N inversely proportional to
    # the simulated area, with seeded multiplicative noise.
    rows = import_site_map(sites_csv)
    rng = np.random.default_rng(np.random.SeedSequence(2024))
    noise = rng.normal(1.0, 0.01, size=len(rows))
    records = [
        MeasurementRecord(
            wafer_id="wsim",
            chip_id=f"c{int(i // 15)}",
            x_mm=row.x_mm,
            y_mm=row.y_mm,
            area_class_um2=0.025,
            run_id="r1",
            rn_ohm=300.0 / row.area_um2 * max(n, 0.5),
        )
        for i, (row, n) in enumerate(zip(rows, noise))
    ]
    meas_csv = workdir / "measurements.csv"
    export_measurements(records, meas_csv)
    stats_json = workdir / "stats.json"
    assert (
        cli_main(
            [
                "analyze",
                "--measurements",
                str(meas_csv),
                "--group-by",
                "wafer,area",
                "--out",
                str(stats_json),
            ]
        )
        == 0
    )
    return sites_csv.read_bytes(), meas_csv.read_bytes(), stats_json.read_bytes()


@criterion(10, "pipeline determinism: identical bytes on identical inputs")
def test_c10_pipeline_determinism(tmp_path):
    run_a = tmp_path / "a"
    run_b = tmp_path / "b"
    run_a.mkdir()
    run_b.mkdir()
    assert _run_pipeline(run_a) == _run_pipeline(run_b)
