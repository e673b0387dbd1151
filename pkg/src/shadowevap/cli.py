"""Command-line pipeline.

Physics parameters live in the YAML config; flags only select the
subcommand, file paths, grid overrides and the RNG seed. Exit codes:
0 success, 2 validation error, 3 I/O error, 4 computation error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from typing import Optional, Sequence

from . import csvio, heatmap, stats, wafer
from .config import load_config
from .errors import (
    ComputationError,
    IoError,
    ShadowEvapError,
    UnknownField,
    ValidationError,
)


def _load(config_path: str, grid_pitch_mm: Optional[float]) -> wafer.ProcessConfig:
    config, provenance = load_config(config_path)
    for line in provenance:
        print(f"config default applied: {line}", file=sys.stderr)
    if grid_pitch_mm is not None:
        config = replace(config, layout=replace(config.layout, grid_pitch_mm=grid_pitch_mm))
    return config


def _cmd_simulate(args: argparse.Namespace) -> int:
    config = _load(args.config, args.grid_pitch_mm)
    model = wafer.BiasModel(args.model)
    results = wafer.simulate_wafer(config, model)
    csvio.export_site_map(results, args.out)
    summary = wafer.residual_report(results)
    jump_b, jump_t = wafer.branch_discontinuity_nm(config)
    print(f"sites: {len(results)}")
    print(f"area_mean_um2: {csvio.fmt(summary.mean)}")
    print(f"area_cv_percent: {csvio.fmt(summary.cv_percent)}")
    print(
        f"branch_discontinuity_at_{csvio.fmt(config.epsilon_center_mm)}mm: "
        f"bottom {jump_b:+.3f} nm, top {jump_t:+.3f} nm"
    )
    return 0


def _cmd_compare_models(args: argparse.Namespace) -> int:
    config = _load(args.config, args.grid_pitch_mm)
    axis = wafer.Axis(args.axis)
    electrode = wafer.Electrode(args.electrode)
    profiles = {
        m: wafer.bias_profile(config, axis, electrode, m) for m in wafer.BiasModel
    }
    offsets = [p[0] for p in profiles[wafer.BiasModel.CONSTANT].points]
    rows = []
    for i, off in enumerate(offsets):
        rows.append(
            [csvio.fmt(off)]
            + [csvio.fmt(profiles[m].points[i][1]) for m in wafer.BiasModel]
        )
    csvio.write_rows(
        args.out, ["offset_mm", "bias_I_nm", "bias_II_nm", "bias_III_nm"], rows
    )
    for m in wafer.BiasModel:
        print(
            f"center_width_{m.value}_nm: {csvio.fmt(profiles[m].center_width_nm)}"
        )
    return 0


def _parse_target(text: str) -> wafer.CompensationTarget:
    if text == "center":
        return wafer.CenterWidthsTarget()
    if text.startswith("area:"):
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ValidationError(f"malformed target {text!r}")
        try:
            area = float(parts[1])
            aspect = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError as exc:
            raise ValidationError(f"malformed target {text!r}: {exc}") from exc
        return wafer.ExplicitAreaTarget(area_um2=area, aspect=aspect)
    raise ValidationError(
        f"unknown target {text!r}; expected 'center' or 'area:<um2>[:aspect]'"
    )


def _cmd_compensate(args: argparse.Namespace) -> int:
    config = _load(args.config, args.grid_pitch_mm)
    table = wafer.compensate_wafer(config, _parse_target(args.target))
    for site, reason in table.rejections:
        print(f"rejected: {reason}", file=sys.stderr)
    if not table.rows:
        raise ComputationError("all sites unreachable for this target")
    csvio.export_corrections(table, args.out)
    print(f"corrections: {len(table.rows)}")
    print(f"rejections: {len(table.rejections)}")
    print(f"target_w_bottom_nm: {csvio.fmt(table.target_w_bottom_nm)}")
    print(f"target_w_top_nm: {csvio.fmt(table.target_w_top_nm)}")
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    config = _load(args.config, None)
    corrections = csvio.import_corrections(args.corrections)
    results = wafer.resimulate_with_corrections(config, corrections)
    summary = wafer.residual_report(results)
    predicted = {
        (r.site.x_mm, r.site.y_mm): r.predicted_area_um2 for r in corrections
    }
    max_dev = max(
        abs(r.area_um2 - predicted[(r.site.x_mm, r.site.y_mm)])
        / predicted[(r.site.x_mm, r.site.y_mm)]
        for r in results
    )
    report = {
        "n_sites": len(results),
        "area_mean_um2": summary.mean,
        "area_sd_um2": summary.sd_sample,
        "area_cv_percent": summary.cv_percent,
        "max_abs_rel_dev_from_predicted": max_dev,
    }
    csvio.write_json_report(report, args.out)
    print(f"residual area_cv_percent: {csvio.fmt(summary.cv_percent)}")
    return 0


def _summary_dict(s: stats.StatsSummary) -> dict:
    return {
        "n": s.n,
        "mean_rn_ohm": s.mean,
        "sd_rn_ohm": s.sd_sample,
        "cv_percent": s.cv_percent,
    }


def _cmd_analyze(args: argparse.Namespace) -> int:
    records, diagnostics = csvio.import_measurements(args.measurements)
    for d in diagnostics:
        print(f"skipped row: {d}", file=sys.stderr)
    group_by = tuple(g for g in args.group_by.split(",") if g)
    report_obj = stats.aggregate(records, group_by)
    report = {
        "n_records": len(records),
        "n_skipped_rows": len(diagnostics),
        "group_by": list(group_by),
        "groups": {k: _summary_dict(v) for k, v in report_obj.group_stats.items()},
        "group_warnings": report_obj.warnings,
        "repeatability": {
            "n_junctions_with_repeats": len(report_obj.repeatability),
            "per_junction": [
                {
                    "wafer_id": j.wafer_id,
                    "chip_id": j.chip_id,
                    "x_mm": j.x_mm,
                    "y_mm": j.y_mm,
                    "n_runs": j.n_runs,
                    "cv_percent": 100.0 * j.cv,
                }
                for j in report_obj.repeatability
            ],
        },
    }
    repeat_summary = report_obj.repeat_cv_summary
    if repeat_summary is not None:
        report["repeatability"]["mean_cv_percent"] = 100.0 * repeat_summary.mean
        report["repeatability"]["max_cv_percent"] = 100.0 * max(
            j.cv for j in report_obj.repeatability
        )
    if args.fit_gap:
        triples = [
            (r.rn_ohm, r.area_class_um2, r.jc_ua_um2)
            for r in records
            if r.jc_ua_um2 is not None
        ]
        if len(triples) < 2:
            raise ValidationError(
                "--fit-gap needs >= 2 rows with the optional jc_ua_um2 column"
            )
        fit = stats.fit_gap(triples)
        report["gap_fit"] = {
            "delta_uev": fit.delta_uev,
            "max_abs_rel_residual": fit.max_abs_rel_residual,
            "records": [
                {
                    "rn_ohm": r.rn_ohm,
                    "area_um2": r.area_um2,
                    "jc_reported": r.jc_reported,
                    "jc_fitted": r.jc_fitted,
                    "implied_delta_uev": r.implied_delta_uev,
                    "rel_residual": r.rel_residual,
                }
                for r in fit.records
            ],
            "outliers": [
                {
                    "rn_ohm": r.rn_ohm,
                    "area_um2": r.area_um2,
                    "implied_delta_uev": r.implied_delta_uev,
                    "rel_residual": r.rel_residual,
                }
                for r in fit.records
                if abs(r.rel_residual) > 0.15
            ],
        }
    csvio.write_json_report(report, args.out)
    print(f"groups: {len(report['groups'])}")
    return 0


def _cmd_frequency(args: argparse.Namespace) -> int:
    params = stats.QubitParams(gap_delta_uev=args.delta_uev, ec_mhz=args.ec_mhz)
    f = stats.transmon_frequency(args.rn_ohm, params)
    sens = stats.resistance_sensitivity(args.rn_ohm, params)
    print(f"f_hz: {csvio.fmt(f)}")
    print(f"f_ghz: {csvio.fmt(f / 1e9)}")
    print(f"dlnf_dlnrn: {csvio.fmt(sens)}")
    return 0


def _cmd_propagate(args: argparse.Namespace) -> int:
    params = stats.QubitParams(gap_delta_uev=args.delta_uev, ec_mhz=args.ec_mhz)
    result = stats.propagate_cv_monte_carlo(
        mean_rn_ohm=args.mean_rn_ohm,
        cv_rn=args.cv_rn,
        params=params,
        n_samples=args.n,
        seed=args.seed,
    )
    print(f"cv_f: {csvio.fmt(result.cv_f)}")
    print(f"cv_ratio: {csvio.fmt(result.cv_ratio)}")
    print(f"mean_f_ghz: {csvio.fmt(result.mean_f_hz / 1e9)}")
    print(f"n_invalid: {result.n_invalid}")
    return 0


def _cmd_heatmap(args: argparse.Namespace) -> int:
    points = _heatmap_points(args.infile, args.field)
    heatmap.render_heatmap(points, args.field, args.out)
    print(f"cells: {len(points)}")
    return 0


def _heatmap_points(path: str, field: str) -> list[tuple[float, float, float]]:
    """Pull (x, y, field) triples out of a site map or measurement CSV."""
    site_fields = [c for c in csvio.SITE_MAP_HEADER if c not in ("x_mm", "y_mm")]
    try:
        rows = csvio.import_site_map(path)
    except ShadowEvapError:
        rows = None
    if rows is not None:
        if field not in site_fields:
            raise UnknownField(
                f"unknown field {field!r}; site maps provide {site_fields}"
            )

        def value(row: csvio.SiteMapRow) -> float:
            if field == "theta_bottom_deg":
                return math.degrees(row.theta_bottom_rad)
            if field == "theta_top_deg":
                return math.degrees(row.theta_top_rad)
            return getattr(row, field)

        return [(r.x_mm, r.y_mm, value(r)) for r in rows]

    records, _ = csvio.import_measurements(path)
    if field != "rn_ohm":
        raise UnknownField(
            f"unknown field {field!r}; measurement files provide ['rn_ohm']"
        )
    by_site: dict[tuple[float, float], list[float]] = {}
    for rec in records:
        by_site.setdefault((rec.x_mm, rec.y_mm), []).append(rec.rn_ohm)
    return [
        (x, y, sum(vals) / len(vals)) for (x, y), vals in sorted(by_site.items())
    ]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shadowevap",
        description=(
            "Shadow-evaporation junction geometry simulation, wafer bias "
            "compensation and resistance statistics"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="forward-simulate a wafer site map")
    p.add_argument("--config", required=True)
    p.add_argument("--model", choices=["I", "II", "III"], default="III")
    p.add_argument("--grid-pitch-mm", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser(
        "compare-models", help="bias vs offset for models I/II/III along one axis"
    )
    p.add_argument("--config", required=True)
    p.add_argument("--electrode", choices=["bottom", "top"], required=True)
    p.add_argument("--axis", choices=["x", "y"], required=True)
    p.add_argument("--grid-pitch-mm", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_compare_models)

    p = sub.add_parser(
        "compensate", help="emit per-site drawn-dimension corrections"
    )
    p.add_argument("--config", required=True)
    p.add_argument("--target", default="center")
    p.add_argument("--grid-pitch-mm", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_compensate)

    p = sub.add_parser(
        "verify", help="re-simulate a correction table and report residual CV"
    )
    p.add_argument("--config", required=True)
    p.add_argument("--corrections", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("analyze", help="statistics over measured resistances")
    p.add_argument("--measurements", required=True)
    p.add_argument("--group-by", default="wafer,area")
    p.add_argument("--fit-gap", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("frequency", help="qubit frequency from R_N")
    p.add_argument("--rn-ohm", type=float, required=True)
    p.add_argument("--delta-uev", type=float, required=True)
    p.add_argument("--ec-mhz", type=float, required=True)
    p.set_defaults(func=_cmd_frequency)

    p = sub.add_parser(
        "propagate", help="Monte-Carlo R_N spread to frequency spread"
    )
    p.add_argument("--mean-rn-ohm", type=float, required=True)
    p.add_argument("--cv-rn", type=float, required=True)
    p.add_argument("--delta-uev", type=float, required=True)
    p.add_argument("--ec-mhz", type=float, required=True)
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_propagate)

    p = sub.add_parser("heatmap", help="SVG wafer map of one CSV field")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--field", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_heatmap)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (IoError, OSError) as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3
    except ComputationError as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return 4


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
