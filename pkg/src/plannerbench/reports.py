"""Build plot payloads from a results database and write them as CSV.

Each build_* function returns a JSON-ready dict: finite numbers, None for
missing values, lists and string keys only. The same payloads feed the
HTTP API, the SVG renderer, and the CSV report writer, so every view of
a query shows identical numbers.
"""

from __future__ import annotations

import csv
import math
from typing import IO

from . import benchdb, stats

NUMERIC_TAGS = ("INTEGER", "REAL")

_UNITS = {
    "time": "s",
    "simplification_time": "s",
    "memory": "bytes",
}


def _axis_label(attribute: str) -> str:
    unit = _UNITS.get(attribute)
    return f"{attribute} ({unit})" if unit else attribute


def _finite(x: float | None) -> float | None:
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _finite_list(values) -> list[float | None]:
    return [_finite(v) for v in values]


def _resolve_planners(conn, problem: str, planners: list[str] | None) -> list[str]:
    available = sorted(benchdb.count_runs(conn, problem))
    if planners is None:
        return available
    unknown = [p for p in planners if p not in available]
    if unknown:
        raise ValueError(
            f"unknown planner(s) {', '.join(unknown)} for problem {problem!r}; "
            f"available: {', '.join(available) or '(none)'}"
        )
    return list(planners)


def _resolve_version(conn, version: str | None) -> str:
    if version is None or version == "ALL":
        return "ALL"
    versions = benchdb.list_entities(conn).versions
    if version not in versions:
        raise ValueError(
            f"unknown version {version!r}; available: {', '.join(versions) or '(none)'} or ALL"
        )
    return version


def _missing_table(per_planner: dict[str, list]) -> list[dict]:
    return [
        {"planner": name, "total": total, "missing": missing}
        for name, total, missing in stats.missing_counts(per_planner)
    ]


def build_performance_plot(
    conn,
    problem: str,
    attribute: str,
    version: str | None = None,
    planners: list[str] | None = None,
    use_ecdf: bool = False,
) -> dict:
    """Box plots for numeric attributes, success fractions for enum or
    boolean ones, ECDF curves when requested."""
    version = _resolve_version(conn, version)
    planners = _resolve_planners(conn, problem, planners)
    samples = benchdb.query_attribute(conn, problem, attribute, version, planners)
    data = {
        "kind": "performance",
        "problem": problem,
        "attribute": attribute,
        "attribute_type": samples.type_tag,
        "version": version,
        "planners": planners,
        "missing": _missing_table(samples.per_planner),
        "labels": {"x": "planner", "y": _axis_label(attribute)},
    }
    if samples.type_tag in ("ENUM", "BOOLEAN"):
        fractions = []
        for name in planners:
            values = samples.per_planner[name]
            if not values:
                fractions.append(
                    {"planner": name, "fraction": None, "ci_low": None, "ci_high": None, "n": 0}
                )
                continue
            frac, lo, hi = stats.success_fraction(values)
            fractions.append(
                {"planner": name, "fraction": frac, "ci_low": lo, "ci_high": hi, "n": len(values)}
            )
        data["mode"] = "success"
        data["fractions"] = fractions
        data["labels"]["y"] = f"fraction with {attribute} = 0"
        return data
    if samples.type_tag not in NUMERIC_TAGS:
        raise ValueError(f"attribute {attribute!r} is {samples.type_tag}, not plottable")
    if use_ecdf:
        curves = []
        for name in planners:
            values = [_finite(v) for v in samples.per_planner[name]]
            defined = [v for v in values if v is not None]
            points = stats.ecdf(values) if defined else []
            curves.append({"planner": name, "points": [[x, f] for x, f in points]})
        data["mode"] = "ecdf"
        data["curves"] = curves
        data["labels"] = {"x": _axis_label(attribute), "y": "fraction of runs"}
        return data
    boxes = []
    for name in planners:
        b = stats.boxplot_stats(_finite_list(samples.per_planner[name]))
        boxes.append(
            {
                "planner": name,
                "n": b.n,
                "n_missing": b.n_missing,
                "median": _finite(b.median),
                "q1": _finite(b.q1),
                "q3": _finite(b.q3),
                "whisker_low": _finite(b.whisker_low),
                "whisker_high": _finite(b.whisker_high),
                "notch_low": _finite(b.notch_low),
                "notch_high": _finite(b.notch_high),
                "outliers": _finite_list(b.outliers),
            }
        )
    data["mode"] = "box"
    data["boxes"] = boxes
    return data


def build_progress_plot(
    conn,
    problem: str,
    attribute: str = "best_cost",
    version: str | None = None,
    planners: list[str] | None = None,
    show_points: bool = False,
    smooth_window: int = 5,
    grid_step: float = 0.1,
) -> dict:
    version = _resolve_version(conn, version)
    planners = _resolve_planners(conn, problem, planners)
    if smooth_window < 1:
        raise ValueError("smooth_window must be at least 1")
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    series = benchdb.query_progress(conn, problem, attribute, planners, version)
    time_limit = benchdb.max_time_limit(conn, problem, version)
    totals = benchdb.count_runs(conn, problem, planners, version)
    aggregates = []
    points = []
    missing = []
    for name in planners:
        runs = series.get(name, [])
        cleaned = [[(t, _finite(c)) for t, c in run] for run in runs]
        agg = stats.progress_aggregate(cleaned, time_limit, grid_step, smooth_window)
        with_data = sum(1 for run in cleaned if any(c is not None for _, c in run))
        aggregates.append(
            {
                "planner": name,
                "grid": list(agg.grid),
                "mean": _finite_list(agg.mean),
                "ci_low": _finite_list(agg.ci_low),
                "ci_high": _finite_list(agg.ci_high),
                "counts_1s": list(agg.counts_1s),
                "n_runs": with_data,
            }
        )
        missing.append(
            {"planner": name, "total": totals.get(name, 0), "missing": totals.get(name, 0) - with_data}
        )
        if show_points:
            raw = [[t, c] for run in cleaned for t, c in run if c is not None]
            points.append({"planner": name, "points": raw})
    data = {
        "kind": "progress",
        "problem": problem,
        "attribute": attribute,
        "version": version,
        "planners": planners,
        "time_limit": time_limit,
        "grid_step": grid_step,
        "smooth_window": smooth_window,
        "aggregates": aggregates,
        "missing": missing,
        "labels": {"x": "time (s)", "y": attribute},
    }
    if show_points:
        data["points"] = points
    return data


def build_regression_plot(
    conn,
    problem: str,
    attribute: str,
    planners: list[str] | None = None,
) -> dict:
    planners = _resolve_planners(conn, problem, planners)
    grouped = benchdb.query_attribute_by_version(conn, problem, attribute, planners)
    samples = benchdb.query_attribute(conn, problem, attribute, None, planners)
    if samples.type_tag not in NUMERIC_TAGS + ("ENUM", "BOOLEAN"):
        raise ValueError(f"attribute {attribute!r} is {samples.type_tag}, not plottable")
    cleaned = {
        name: {ver: _finite_list(vals) for ver, vals in by_version.items()}
        for name, by_version in grouped.items()
    }
    bars = [
        {
            "planner": bar.planner,
            "version": bar.version,
            "mean": _finite(bar.mean),
            "stderr": _finite(bar.stderr),
            "n": bar.n,
        }
        for bar in stats.regression_aggregate(cleaned)
    ]
    versions = sorted({bar["version"] for bar in bars})
    return {
        "kind": "regression",
        "problem": problem,
        "attribute": attribute,
        "version": "ALL",
        "planners": planners,
        "versions": versions,
        "bars": bars,
        "missing": _missing_table(samples.per_planner),
        "labels": {"x": "version", "y": _axis_label(attribute)},
    }


# ---------------------------------------------------------------------------
# CSV output


def _cell(v) -> str:
    if v is None:
        return ""
    return f"{v:.17g}" if isinstance(v, float) else str(v)


def write_csv(data: dict, out: IO[str]) -> None:
    """Write one plot payload as delimited rows, one observation per line."""
    w = csv.writer(out)
    kind = data["kind"]
    if kind == "performance" and data["mode"] == "box":
        w.writerow(
            ["planner", "n", "n_missing", "median", "q1", "q3",
             "whisker_low", "whisker_high", "notch_low", "notch_high", "outliers"]
        )
        for b in data["boxes"]:
            w.writerow(
                [b["planner"], b["n"], b["n_missing"]]
                + [_cell(b[k]) for k in ("median", "q1", "q3", "whisker_low",
                                         "whisker_high", "notch_low", "notch_high")]
                + [" ".join(_cell(v) for v in b["outliers"])]
            )
    elif kind == "performance" and data["mode"] == "ecdf":
        w.writerow(["planner", data["attribute"], "fraction"])
        for curve in data["curves"]:
            for x, f in curve["points"]:
                w.writerow([curve["planner"], _cell(x), _cell(f)])
    elif kind == "performance" and data["mode"] == "success":
        w.writerow(["planner", "fraction", "ci_low", "ci_high", "n"])
        for row in data["fractions"]:
            w.writerow([row["planner"]] + [_cell(row[k]) for k in ("fraction", "ci_low", "ci_high")] + [row["n"]])
    elif kind == "progress":
        w.writerow(["planner", "time", "mean", "ci_low", "ci_high"])
        for agg in data["aggregates"]:
            for i, t in enumerate(agg["grid"]):
                w.writerow(
                    [agg["planner"], _cell(t), _cell(agg["mean"][i]),
                     _cell(agg["ci_low"][i]), _cell(agg["ci_high"][i])]
                )
    elif kind == "regression":
        w.writerow(["planner", "version", "mean", "stderr", "n"])
        for bar in data["bars"]:
            w.writerow([bar["planner"], bar["version"], _cell(bar["mean"]), _cell(bar["stderr"]), bar["n"]])
    else:
        raise ValueError(f"no CSV layout for {kind!r}")


def write_missing_csv(data: dict, out: IO[str]) -> None:
    w = csv.writer(out)
    w.writerow(["planner", "total", "missing"])
    for row in data["missing"]:
        w.writerow([row["planner"], row["total"], row["missing"]])
