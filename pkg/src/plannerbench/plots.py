"""Render plot payloads to SVG bytes with matplotlib.

Rendering is deterministic: fixed figure sizes, a fixed palette, a fixed
id hash salt, and no embedded timestamps, so the same payload always
yields the same bytes. Figures draw exactly the numbers in the payload.
"""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg", force=True)

import matplotlib.pyplot as plt  # noqa: E402

HASH_SALT = "plannerbench"

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)

_RC = {
    "svg.hashsalt": HASH_SALT,
    "figure.dpi": 100,
    "font.size": 10,
}


def _color(i: int) -> str:
    return PALETTE[i % len(PALETTE)]


def _save(fig) -> bytes:
    buf = io.BytesIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


def _tick_label(name: str, n: int, missing: int) -> str:
    note = f"n={n}" if missing == 0 else f"n={n}, {missing} missing"
    return f"{name}\n({note})"


def _missing_by_planner(data: dict) -> dict[str, tuple[int, int]]:
    return {row["planner"]: (row["total"], row["missing"]) for row in data["missing"]}


def _render_box(data: dict) -> bytes:
    with matplotlib.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(7, 4.5))
        miss = _missing_by_planner(data)
        bxp_stats = []
        positions = []
        colors = []
        labels = []
        for i, box in enumerate(data["boxes"]):
            total, missing = miss.get(box["planner"], (box["n"] + box["n_missing"], box["n_missing"]))
            labels.append(_tick_label(box["planner"], box["n"], missing))
            if box["n"] == 0 or box["median"] is None:
                continue
            bxp_stats.append(
                {
                    "med": box["median"],
                    "q1": box["q1"],
                    "q3": box["q3"],
                    "whislo": box["whisker_low"],
                    "whishi": box["whisker_high"],
                    "cilo": box["notch_low"],
                    "cihi": box["notch_high"],
                    "fliers": [v for v in box["outliers"] if v is not None],
                }
            )
            positions.append(i + 1)
            colors.append(_color(i))
        if bxp_stats:
            artists = ax.bxp(
                bxp_stats,
                positions=positions,
                shownotches=True,
                patch_artist=True,
                widths=0.5,
            )
            for patch, color in zip(artists["boxes"], colors):
                patch.set_facecolor(color)
                patch.set_alpha(0.6)
        ax.set_xticks(range(1, len(data["boxes"]) + 1))
        ax.set_xticklabels(labels)
        ax.set_xlim(0.5, len(data["boxes"]) + 0.5)
        ax.set_ylabel(data["labels"]["y"])
        ax.set_title(f"{data['problem']}: {data['attribute']}")
        ax.grid(True, axis="y", alpha=0.3)
        fig.tight_layout()
        return _save(fig)


def _render_ecdf(data: dict) -> bytes:
    with matplotlib.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(7, 4.5))
        for i, curve in enumerate(data["curves"]):
            pts = curve["points"]
            if not pts:
                continue
            xs = [p[0] for p in pts]
            fs = [p[1] for p in pts]
            xs = [xs[0]] + xs
            fs = [0.0] + fs
            ax.plot(xs, fs, drawstyle="steps-post", color=_color(i), label=curve["planner"])
        ax.set_ylim(0.0, 1.05)
        ax.set_xlabel(data["labels"]["x"])
        ax.set_ylabel(data["labels"]["y"])
        ax.set_title(f"{data['problem']}: {data['attribute']} (ECDF)")
        ax.grid(True, alpha=0.3)
        ax.legend(loc="lower right")
        fig.tight_layout()
        return _save(fig)


def _render_success(data: dict) -> bytes:
    with matplotlib.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(7, 4.5))
        miss = _missing_by_planner(data)
        labels = []
        for i, row in enumerate(data["fractions"]):
            total, missing = miss.get(row["planner"], (row["n"], 0))
            labels.append(_tick_label(row["planner"], row["n"], missing))
            if row["fraction"] is None:
                continue
            ax.bar(i + 1, row["fraction"], width=0.5, color=_color(i), alpha=0.6)
            if row["ci_low"] is not None:
                ax.errorbar(
                    i + 1,
                    row["fraction"],
                    yerr=[[row["fraction"] - row["ci_low"]], [row["ci_high"] - row["fraction"]]],
                    fmt="none",
                    ecolor="#333333",
                    capsize=4,
                )
        ax.set_xticks(range(1, len(data["fractions"]) + 1))
        ax.set_xticklabels(labels)
        ax.set_xlim(0.5, len(data["fractions"]) + 0.5)
        ax.set_ylim(0.0, 1.05)
        ax.set_ylabel(data["labels"]["y"])
        ax.set_title(f"{data['problem']}: {data['attribute']}")
        ax.grid(True, axis="y", alpha=0.3)
        fig.tight_layout()
        return _save(fig)


def _segments(grid: list[float], *rows: list[float | None]):
    """Split aligned rows into runs of indices where every row is defined."""
    start = None
    for i in range(len(grid) + 1):
        defined = i < len(grid) and all(row[i] is not None for row in rows)
        if defined and start is None:
            start = i
        elif not defined and start is not None:
            yield start, i
            start = None


def _render_progress(data: dict) -> bytes:
    with matplotlib.rc_context(_RC):
        fig, (ax, axc) = plt.subplots(
            2, 1, figsize=(7, 6), sharex=True, gridspec_kw={"height_ratios": (3, 1)}
        )
        points = {p["planner"]: p["points"] for p in data.get("points", [])}
        for i, agg in enumerate(data["aggregates"]):
            color = _color(i)
            grid = agg["grid"]
            for lo, hi in _segments(grid, agg["ci_low"], agg["ci_high"]):
                ax.fill_between(
                    grid[lo:hi], agg["ci_low"][lo:hi], agg["ci_high"][lo:hi],
                    color=color, alpha=0.2, linewidth=0,
                )
            labeled = False
            for lo, hi in _segments(grid, agg["mean"]):
                ax.plot(
                    grid[lo:hi], agg["mean"][lo:hi], color=color,
                    label=None if labeled else agg["planner"],
                )
                labeled = True
            raw = points.get(agg["planner"], [])
            if raw:
                ax.scatter(
                    [p[0] for p in raw], [p[1] for p in raw],
                    s=4, color=color, alpha=0.25, linewidths=0,
                )
            counts = agg["counts_1s"]
            n_planners = max(1, len(data["aggregates"]))
            width = 0.8 / n_planners
            xs = [k + 0.1 + width * (i + 0.5) for k in range(len(counts))]
            axc.bar(xs, counts, width=width, color=color, alpha=0.7)
        ax.set_ylabel(data["labels"]["y"])
        ax.set_title(f"{data['problem']}: {data['attribute']} over time")
        ax.grid(True, alpha=0.3)
        if any(any(v is not None for v in agg["mean"]) for agg in data["aggregates"]):
            ax.legend(loc="upper right")
        axc.set_xlabel(data["labels"]["x"])
        axc.set_ylabel("samples / s")
        axc.set_xlim(0.0, max(data["time_limit"], 1e-9))
        axc.grid(True, axis="y", alpha=0.3)
        fig.tight_layout()
        return _save(fig)


def _render_regression(data: dict) -> bytes:
    with matplotlib.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(7, 4.5))
        versions = data["versions"]
        planners = data["planners"]
        index = {(b["planner"], b["version"]): b for b in data["bars"]}
        n = max(1, len(planners))
        width = 0.8 / n
        for i, planner in enumerate(planners):
            xs, hs, errs = [], [], []
            for v, version in enumerate(versions):
                bar = index.get((planner, version))
                if bar is None or bar["mean"] is None:
                    continue
                xs.append(v + width * (i + 0.5) - 0.4)
                hs.append(bar["mean"])
                errs.append(bar["stderr"] if bar["stderr"] is not None else 0.0)
            if not xs:
                continue
            ax.bar(xs, hs, width=width, color=_color(i), alpha=0.7, label=planner)
            if any(e > 0 for e in errs):
                ax.errorbar(xs, hs, yerr=errs, fmt="none", ecolor="#333333", capsize=3)
        ax.set_xticks(range(len(versions)))
        ax.set_xticklabels(versions)
        ax.set_xlabel(data["labels"]["x"])
        ax.set_ylabel(data["labels"]["y"])
        ax.set_title(f"{data['problem']}: {data['attribute']} by version")
        ax.grid(True, axis="y", alpha=0.3)
        if data["bars"]:
            ax.legend(loc="upper right")
        fig.tight_layout()
        return _save(fig)


def render_svg(data: dict) -> bytes:
    """Dispatch a plot payload to its renderer; returns SVG bytes."""
    kind = data.get("kind")
    if kind == "performance":
        mode = data.get("mode")
        if mode == "box":
            return _render_box(data)
        if mode == "ecdf":
            return _render_ecdf(data)
        if mode == "success":
            return _render_success(data)
        raise ValueError(f"unknown performance mode {mode!r}")
    if kind == "progress":
        return _render_progress(data)
    if kind == "regression":
        return _render_regression(data)
    raise ValueError(f"unknown plot kind {kind!r}")
