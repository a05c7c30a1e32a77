"""Release gate: one test per acceptance criterion, each with a wall-clock budget.

Every test prints a single `criterion N: PASS` line with its measured time
(visible with -s or in captured output) and fails if it exceeds its budget.
"""

from __future__ import annotations

import dataclasses
import math
import random
import statistics
import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from helpers import CrashingPlanner, random_log, sample_db, temp_planner_type
from plannerbench import benchdb, stats
from plannerbench.benchlog import parse_log, write_log
from plannerbench.geometry import distance
from plannerbench.records import ExperimentLog, PlannerBlock, RunRecord, RunStatus, ValueType
from plannerbench.reports import build_performance_plot
from plannerbench.runner import parse_config, run_benchmark
from plannerbench.server import create_app

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

TIMING_PROPS = ("time", "simplification_time")


def _done(num: int, t0: float, budget: float, detail: str) -> None:
    elapsed = time.perf_counter() - t0
    assert elapsed < budget, f"criterion {num} took {elapsed:.1f}s, budget {budget:g}s"
    print(f"criterion {num}: PASS  {detail} ({elapsed:.2f}s < {budget:g}s)")


def _flat_log(problem: str, planner: str, extra_schema, rows) -> ExperimentLog:
    """Campaign log with one planner block and no progress data."""
    run_schema = [("status", ValueType.ENUM), ("time", ValueType.REAL)] + list(extra_schema)
    runs = []
    for i, extra in enumerate(rows):
        props: dict[str, object | None] = {"status": RunStatus.EXACT_SOLUTION.value, "time": 0.5}
        props.update(extra)
        runs.append(RunRecord(planner, i, props))
    block = PlannerBlock(planner, {"type": "RRT"}, run_schema, runs)
    return ExperimentLog(
        name=problem,
        version="0.1.0",
        hostname="bench-host",
        cpuinfo="test cpu",
        date="2026-01-01T00:00:00+00:00",
        seed=1,
        time_limit=1.0,
        memory_limit=100.0,
        run_count=len(rows),
        total_time=1.0,
        problem_properties={},
        planners=[block],
    )


def test_criterion_1_log_round_trip_speed():
    t0 = time.perf_counter()
    rng = random.Random(424242)
    for _ in range(1000):
        log = random_log(rng)
        text = write_log(log)
        back = parse_log(text)
        assert back == log
        assert write_log(back) == text
    _done(1, t0, 10.0, "1000 randomized logs survive write/parse/write byte-identically")


def test_criterion_2_schema_extension_and_backfill(tmp_path):
    t0 = time.perf_counter()
    conn = benchdb.open_db(tmp_path / "dyn.db")
    with_novel = _flat_log(
        "dyn", "rrt", [("novel_metric", ValueType.REAL)],
        [{"novel_metric": 1.5}, {"novel_metric": 2.5}],
    )
    without = _flat_log("dyn", "rrt", [], [{}, {}])
    benchdb.ingest_log(conn, with_novel)
    benchdb.ingest_log(conn, without)
    grouped = benchdb.query_attribute(conn, "dyn", "novel_metric")
    assert grouped.per_planner == {"rrt": [1.5, 2.5, None, None]}
    rows = conn.execute(
        "SELECT value FROM enums WHERE name = 'status' ORDER BY value"
    ).fetchall()
    assert [r[0] for r in rows] == [0, 1, 2, 3, 4]
    assert conn.execute("SELECT COUNT(*) FROM enums").fetchone()[0] == 5
    conn.close()
    _done(2, t0, 1.0, "novel run property adds a column, earlier-schema rows read as NULL")


def test_criterion_3_run_containment_and_crash_isolation():
    t0 = time.perf_counter()
    contain_cfg = """
[problem]
world = corridor
space = R2
start = 2 17
goal = 18 3
objective = length
objective_threshold = 0

[benchmark]
time_limit = 1
run_count = 3
seed = 7

[planner:rrt]
type = RRT

[planner:rrt_star]
type = RRTSTAR
"""
    log = run_benchmark(parse_config(contain_cfg))
    checked = 0
    for block in log.planners:
        for run in block.runs:
            if run.status is RunStatus.CRASH:
                continue
            assert run.properties["time"] <= 1.5
            checked += 1
    assert checked == 6

    base_cfg = """
[problem]
world = corridor
space = R2
start = 2 17
goal = 18 3

[benchmark]
time_limit = 1
run_count = 3
seed = 7
"""
    clean = run_benchmark(parse_config(base_cfg + "\n[planner:rrt]\ntype = RRT\n"))
    with temp_planner_type(CrashingPlanner):
        crashy = run_benchmark(
            parse_config(
                base_cfg + "\n[planner:boom]\ntype = CRASHER\n\n[planner:rrt]\ntype = RRT\n"
            )
        )
    boom = next(b for b in crashy.planners if b.name == "boom")
    for run in boom.runs:
        assert run.status is RunStatus.CRASH
        assert run.properties["time"] is not None
        assert all(
            v is None for k, v in run.properties.items() if k not in ("status", "time")
        )
        assert run.progress == []

    def strip_timing(block: PlannerBlock):
        return [
            {k: v for k, v in run.properties.items() if k not in TIMING_PROPS}
            for run in block.runs
        ]

    after_crash = next(b for b in crashy.planners if b.name == "rrt")
    baseline = clean.planners[0]
    assert after_crash.settings == baseline.settings
    assert after_crash.run_schema == baseline.run_schema
    assert strip_timing(after_crash) == strip_timing(baseline)
    _done(3, t0, 120.0, "deadlines hold within 0.5s grace and a crash does not disturb later planners")


def _quantile_oracle(data: list[float], p: float) -> float:
    ordered = sorted(data)
    if len(ordered) == 1:
        return ordered[0]
    rank = (len(ordered) - 1) * p
    lo = int(math.floor(rank))
    hi = min(lo + 1, len(ordered) - 1)
    return ordered[lo] + (rank - lo) * (ordered[hi] - ordered[lo])


def _wilson_oracle(k: int, n: int) -> tuple[float, float]:
    z = 1.96
    p = k / n
    denom = 1 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return center - half, center + half


def test_criterion_4_statistics_against_brute_force():
    t0 = time.perf_counter()
    rng = random.Random(515151)
    for _ in range(1000):
        n = rng.randint(1, 40)
        values = [rng.uniform(-50.0, 50.0) for _ in range(n)]
        padded = values + [None] * rng.randint(0, 4)
        rng.shuffle(padded)

        box = stats.boxplot_stats(padded)
        assert box.n == n and box.n_missing == len(padded) - n
        q1 = _quantile_oracle(values, 0.25)
        q3 = _quantile_oracle(values, 0.75)
        assert abs(box.median - _quantile_oracle(values, 0.5)) < 1e-12
        assert abs(box.q1 - q1) < 1e-12
        assert abs(box.q3 - q3) < 1e-12
        iqr = q3 - q1
        inside = [v for v in values if q1 - 1.5 * iqr <= v <= q3 + 1.5 * iqr]
        assert abs(box.whisker_low - min(inside)) < 1e-12
        assert abs(box.whisker_high - max(inside)) < 1e-12
        assert sorted(box.outliers) == sorted(v for v in values if v not in inside)
        notch = 1.58 * iqr / math.sqrt(n)
        assert abs(box.notch_low - (box.median - notch)) < 1e-12
        assert abs(box.notch_high - (box.median + notch)) < 1e-12

        points = stats.ecdf(padded)
        total = len(padded)
        assert [x for x, _ in points] == sorted(set(values))
        for x, frac in points:
            assert abs(frac - sum(1 for v in values if v <= x) / total) < 1e-12

        codes = [rng.choice([0, 0, 1, 2, None]) for _ in range(n)]
        frac, lo, hi = stats.success_fraction(codes)
        k = sum(1 for c in codes if c == 0)
        assert abs(frac - k / len(codes)) < 1e-12
        ref_lo, ref_hi = _wilson_oracle(k, len(codes))
        assert abs(lo - max(0.0, ref_lo)) < 1e-12
        assert abs(hi - min(1.0, ref_hi)) < 1e-12

        grouped = {}
        for planner_i in range(rng.randint(1, 3)):
            versions = {}
            for version_i in range(rng.randint(1, 3)):
                versions[f"0.{version_i}.0"] = [
                    None if rng.random() < 0.3 else rng.uniform(-5.0, 5.0)
                    for _ in range(rng.randint(0, 5))
                ]
            grouped[f"p{planner_i}"] = versions
        bars = stats.regression_aggregate(grouped)
        expected = []
        for pname in sorted(grouped):
            for version in sorted(grouped[pname]):
                kept = [v for v in grouped[pname][version] if v is not None]
                if not kept:
                    continue
                mu = sum(kept) / len(kept)
                se = None
                if len(kept) >= 2:
                    var = sum((v - mu) ** 2 for v in kept) / (len(kept) - 1)
                    se = math.sqrt(var) / math.sqrt(len(kept))
                expected.append((pname, version, mu, se, len(kept)))
        assert [(b.planner, b.version, b.n) for b in bars] == [
            (p, v, cnt) for p, v, _, _, cnt in expected
        ]
        for bar, (_, _, mu, se, _) in zip(bars, expected):
            assert abs(bar.mean - mu) < 1e-12
            if se is None:
                assert bar.stderr is None
            else:
                assert abs(bar.stderr - se) < 1e-12

    two_runs = [[(0.0, 10.0)], [(0.0, 20.0)]]
    agg = stats.progress_aggregate(two_runs, 2.0, smooth_window=1)
    for mean, lo, hi in zip(agg.mean, agg.ci_low, agg.ci_high):
        assert abs(mean - 15.0) < 1e-12
        assert abs((15.0 - lo) - 9.8) < 1e-12
        assert abs((hi - 15.0) - 9.8) < 1e-12
    _done(4, t0, 30.0, "1000 random inputs match brute-force statistics to 1e-12")


def test_criterion_5_corridor_trend():
    t0 = time.perf_counter()
    spec = parse_config((CONFIG_DIR / "corridor.cfg").read_text(), CONFIG_DIR)
    keep = [ps for ps in spec.planner_specs if ps.instance_name in ("rrt", "rrt_connect")]
    spec = dataclasses.replace(spec, planner_specs=keep, run_count=50)
    log = run_benchmark(spec)
    times = {b.name: [r.properties["time"] for r in b.runs] for b in log.planners}
    assert all(len(v) == 50 for v in times.values())
    med_connect = statistics.median(times["rrt_connect"])
    med_rrt = statistics.median(times["rrt"])
    assert med_connect <= med_rrt
    _done(
        5, t0, 300.0,
        f"median solve time rrt_connect {med_connect:.3f}s <= rrt {med_rrt:.3f}s over 50 runs",
    )


def test_criterion_6_optimizer_convergence(tmp_path):
    t0 = time.perf_counter()
    # Tight goal tolerance so the optimal cost is the straight-line distance;
    # with a wide tolerance ball the optimum is shorter by the ball radius.
    conv_cfg = """
[problem]
world = empty
space = R2
start = 2 2
goal = 18 18
goal_tolerance = 0.1
objective = length
objective_threshold = 0

[benchmark]
time_limit = 10
run_count = 20
seed = 1

[planner:rrt_star]
type = RRTSTAR
"""
    spec = parse_config(conv_cfg)
    log = run_benchmark(spec)
    block = log.planners[0]
    assert len(block.runs) == 20
    for run in block.runs:
        costs = [sample[1] for sample in run.progress if sample[1] is not None]
        assert costs
        for earlier, later in zip(costs, costs[1:]):
            assert later <= earlier + 1e-9

    conn = benchdb.open_db(tmp_path / "conv.db")
    benchdb.ingest_log(conn, log)
    series = benchdb.query_progress(conn, log.name, "best_cost")["rrt_star"]
    agg = stats.progress_aggregate(series, 10.0, smooth_window=1)
    assert agg.grid[-1] == pytest.approx(10.0)
    straight = distance(spec.problem.space, spec.problem.start, spec.problem.goal)
    mean_final = agg.mean[-1]
    assert mean_final is not None
    assert abs(mean_final - straight) <= 0.05 * straight
    conn.close()
    _done(
        6, t0, 300.0,
        f"every cost stream is nonincreasing and mean at 10s is {mean_final:.3f} "
        f"vs straight line {straight:.3f}",
    )


def test_criterion_7_missing_values_still_plot(tmp_path):
    t0 = time.perf_counter()
    rows = [{"solution_length": None} for _ in range(99)] + [{"solution_length": 7.5}]
    log = _flat_log("sparse", "rrt", [("solution_length", ValueType.REAL)], rows)
    conn = benchdb.open_db(tmp_path / "sparse.db")
    benchdb.ingest_log(conn, log)
    payload = build_performance_plot(conn, "sparse", "solution_length")
    assert payload["missing"] == [{"planner": "rrt", "total": 100, "missing": 99}]
    box = payload["boxes"][0]
    assert box["n"] == 1 and box["n_missing"] == 99
    for key in ("median", "q1", "q3", "whisker_low", "whisker_high"):
        assert box[key] == 7.5
    conn.close()
    _done(7, t0, 1.0, "99 absent values of 100 yield a missing table and a one-point box")


def test_criterion_8_server_byte_determinism(tmp_path):
    t0 = time.perf_counter()
    db_path = tmp_path / "serve.db"
    sample_db(db_path).close()
    queries = [
        ("/api/entities", {}),
        ("/api/plot/performance", {"problem": "corridor", "attribute": "time"}),
        ("/api/plot/performance", {"problem": "corridor", "attribute": "time", "format": "svg"}),
        ("/api/plot/progress", {"problem": "empty"}),
        ("/api/plot/progress", {"problem": "empty", "format": "svg"}),
        ("/api/plot/regression", {"problem": "corridor", "attribute": "time"}),
    ]
    rounds = []
    for _ in range(2):
        with TestClient(create_app(db_path)) as client:
            body = []
            for path, params in queries:
                response = client.get(path, params=params)
                assert response.status_code == 200
                body.append(response.content)
            rounds.append(body)
    assert rounds[0] == rounds[1]
    _done(8, t0, 5.0, "JSON and SVG responses are byte-identical across server restarts")
