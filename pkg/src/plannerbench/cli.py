"""Command-line entry points.

  plannerbench run <config.cfg> [--output FILE] [--seed N]
  plannerbench db add <file.log>... --db <file>
  plannerbench db info --db <file>
  plannerbench report --db <file> --problem <name> [options] --out-dir <dir>
  plannerbench serve --db <file> --port <n>
"""

from __future__ import annotations

import argparse
import sys
from collections import Counter
from pathlib import Path

from . import __version__


def _add_run_parser(sub) -> None:
    p = sub.add_parser("run", help="execute a benchmark config and write its log")
    p.add_argument("config", help="benchmark configuration file")
    p.add_argument("--output", help="log file to write (default: <config stem>.log)")
    p.add_argument("--seed", type=int, help="override the seed from the config")
    p.add_argument(
        "--path-dir",
        help="directory for solution path files when the config enables them "
        "(default: alongside the log)",
    )


def _add_db_parser(sub) -> None:
    p = sub.add_parser("db", help="manage a results database")
    dbsub = p.add_subparsers(dest="db_command", required=True)
    add = dbsub.add_parser("add", help="ingest log files")
    add.add_argument("logs", nargs="+", help="log files to ingest")
    add.add_argument("--db", required=True, help="database file")
    info = dbsub.add_parser("info", help="summarize database contents")
    info.add_argument("--db", required=True, help="database file")


def _add_report_parser(sub) -> None:
    p = sub.add_parser("report", help="render figures and CSV tables from a database")
    p.add_argument("--db", required=True, help="database file")
    p.add_argument("--problem", required=True, help="problem name to report on")
    p.add_argument(
        "--attribute",
        action="append",
        help="run attribute to plot (repeatable; default: every plottable attribute)",
    )
    p.add_argument("--version", default="ALL", help="restrict to one version (default: ALL)")
    p.add_argument("--planners", help="comma-separated planner names (default: all)")
    p.add_argument("--ecdf", action="store_true", help="cumulative curves instead of box plots")
    p.add_argument("--progress-attribute", default="best_cost")
    p.add_argument("--smooth-window", type=int, default=5)
    p.add_argument("--out-dir", default="report", help="output directory (default: report/)")


def _add_serve_parser(sub) -> None:
    p = sub.add_parser("serve", help="serve the web API and UI")
    p.add_argument("--db", required=True, help="database file")
    p.add_argument("--port", type=int, required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--static", help="directory with the UI bundle to serve at /")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plannerbench",
        description="Benchmark sampling-based motion planners and explore the results.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_run_parser(sub)
    _add_db_parser(sub)
    _add_report_parser(sub)
    _add_serve_parser(sub)
    return parser


def _cmd_run(args) -> int:
    from .benchlog import write_log
    from .runner import SavePaths, parse_config, run_benchmark

    config_path = Path(args.config)
    try:
        text = config_path.read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    try:
        spec = parse_config(text, base_dir=config_path.parent)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.seed is not None:
        spec.seed = args.seed
    output = Path(args.output) if args.output else config_path.with_suffix(".log")
    path_dir = Path(args.path_dir) if args.path_dir else output.parent
    out_dir = path_dir if spec.save_paths is not SavePaths.NONE else None
    print(
        f"running {len(spec.planner_specs)} planner(s) x {spec.run_count} run(s), "
        f"time limit {spec.time_limit:g} s, seed {spec.seed}"
    )
    log = run_benchmark(spec, out_dir=out_dir)
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(write_log(log))
    for block in log.planners:
        counts = Counter(run.status.name for run in block.runs)
        summary = ", ".join(f"{name}: {n}" for name, n in sorted(counts.items()))
        print(f"  {block.name}: {summary}")
    print(f"wrote {output}")
    return 0


def _cmd_db_add(args) -> int:
    from . import benchdb
    from .benchlog import LogParseError, parse_log

    conn = benchdb.open_db(args.db)
    try:
        for log_path in args.logs:
            try:
                text = Path(log_path).read_text()
            except OSError as exc:
                print(f"error: cannot read {log_path}: {exc}", file=sys.stderr)
                return 1
            try:
                log = parse_log(text)
            except LogParseError as exc:
                print(f"error: {log_path}: {exc}", file=sys.stderr)
                return 1
            try:
                experiment_id = benchdb.ingest_log(conn, log)
            except ValueError as exc:
                print(f"error: {log_path}: {exc}", file=sys.stderr)
                return 1
            print(f"added {log_path} as experiment {experiment_id}")
    finally:
        conn.close()
    return 0


def _cmd_db_info(args) -> int:
    from . import benchdb

    if not Path(args.db).exists():
        print(f"error: no such database: {args.db}", file=sys.stderr)
        return 1
    conn = benchdb.open_db(args.db)
    try:
        summary = benchdb.db_summary(conn)
    finally:
        conn.close()
    counts = summary["counts"]
    print(f"experiments: {counts['experiments']}")
    print(f"planner configurations: {counts['plannerConfigs']}")
    print(f"runs: {counts['runs']}")
    print(f"progress rows: {counts['progress']}")
    print(f"problems: {', '.join(summary['problems']) or '(none)'}")
    print(f"planners: {', '.join(summary['planners']) or '(none)'}")
    print(f"versions: {', '.join(summary['versions']) or '(none)'}")
    run_attrs = ", ".join(f"{n} ({t})" for n, t in summary["run_attributes"])
    prog_attrs = ", ".join(f"{n} ({t})" for n, t in summary["progress_attributes"])
    print(f"run attributes: {run_attrs or '(none)'}")
    print(f"progress attributes: {prog_attrs or '(none)'}")
    return 0


def _cmd_report(args) -> int:
    from . import benchdb, plots, reports

    if not Path(args.db).exists():
        print(f"error: no such database: {args.db}", file=sys.stderr)
        return 1
    conn = benchdb.open_db(args.db)
    out_dir = Path(args.out_dir)
    planners = None
    if args.planners:
        planners = [p.strip() for p in args.planners.split(",") if p.strip()]
    written = []

    def emit(stem: str, data: dict) -> None:
        out_dir.mkdir(parents=True, exist_ok=True)
        svg_path = out_dir / f"{stem}.svg"
        svg_path.write_bytes(plots.render_svg(data))
        csv_path = out_dir / f"{stem}.csv"
        with open(csv_path, "w", newline="") as fh:
            reports.write_csv(data, fh)
        written.extend([svg_path, csv_path])
        if "missing" in data:
            missing_path = out_dir / f"{stem}_missing.csv"
            with open(missing_path, "w", newline="") as fh:
                reports.write_missing_csv(data, fh)
            written.append(missing_path)

    try:
        entities = benchdb.list_entities(conn)
        if args.problem not in entities.problems:
            print(
                f"error: unknown problem {args.problem!r}; "
                f"available: {', '.join(entities.problems) or '(none)'}",
                file=sys.stderr,
            )
            return 1
        version = args.version if args.version != "ALL" else None
        attributes = args.attribute
        if not attributes:
            attributes = [
                name
                for name, tag in entities.run_attributes
                if tag in ("INTEGER", "REAL", "ENUM", "BOOLEAN")
            ]
        for attribute in attributes:
            data = reports.build_performance_plot(
                conn, args.problem, attribute,
                version=version, planners=planners, use_ecdf=args.ecdf,
            )
            emit(f"performance_{attribute}", data)
        progress_names = [n for n, _ in entities.progress_attributes if n != "time"]
        if args.progress_attribute in progress_names:
            data = reports.build_progress_plot(
                conn, args.problem, args.progress_attribute,
                version=version, planners=planners, smooth_window=args.smooth_window,
            )
            emit(f"progress_{args.progress_attribute}", data)
        if len(entities.versions) > 1:
            for attribute in attributes:
                data = reports.build_regression_plot(
                    conn, args.problem, attribute, planners=planners
                )
                emit(f"regression_{attribute}", data)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    finally:
        conn.close()
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_serve(args) -> int:
    from .server import serve

    if not Path(args.db).exists():
        print(f"error: no such database: {args.db}", file=sys.stderr)
        return 1
    serve(args.db, port=args.port, host=args.host, static_dir=args.static)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "db":
        if args.db_command == "add":
            return _cmd_db_add(args)
        return _cmd_db_info(args)
    if args.command == "report":
        return _cmd_report(args)
    if args.command == "serve":
        return _cmd_serve(args)
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
