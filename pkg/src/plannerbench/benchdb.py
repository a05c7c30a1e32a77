"""SQLite storage for benchmark results with dynamic column growth.

One database file holds any number of experiments. Run and progress
properties become columns on demand: a novel property adds a column, an
INTEGER column fed REAL data is promoted to REAL by a table rebuild, and
planners that never reported a property simply hold NULL there. Planner
configurations are deduplicated by (name, canonical settings string).
"""

from __future__ import annotations

import difflib
import sqlite3
from dataclasses import dataclass, field
from pathlib import Path

from .records import NAME_RE, ExperimentLog, RunStatus, ValueType

_BASE_TABLES = """
CREATE TABLE IF NOT EXISTS experiments (
    id INTEGER PRIMARY KEY,
    name TEXT NOT NULL,
    totaltime REAL,
    timelimit REAL,
    memorylimit REAL,
    runcount INTEGER,
    version TEXT,
    hostname TEXT,
    cpuinfo TEXT,
    date TEXT,
    seed INTEGER
);
CREATE TABLE IF NOT EXISTS plannerConfigs (
    id INTEGER PRIMARY KEY,
    name TEXT NOT NULL,
    settings TEXT NOT NULL,
    UNIQUE(name, settings)
);
CREATE TABLE IF NOT EXISTS runs (
    id INTEGER PRIMARY KEY,
    experimentid INTEGER NOT NULL REFERENCES experiments(id),
    plannerid INTEGER NOT NULL REFERENCES plannerConfigs(id)
);
CREATE TABLE IF NOT EXISTS progress (
    runid INTEGER NOT NULL REFERENCES runs(id)
);
CREATE TABLE IF NOT EXISTS enums (
    name TEXT NOT NULL,
    value INTEGER NOT NULL,
    description TEXT NOT NULL,
    UNIQUE(name, value)
);
"""

_RESERVED_RUN_COLUMNS = {"id", "experimentid", "plannerid"}
_RESERVED_PROGRESS_COLUMNS = {"runid"}

_SQL_TYPE = {
    ValueType.INTEGER: "INTEGER",
    ValueType.ENUM: "INTEGER",
    # declared type BOOLEAN has numeric affinity but keeps the tag queryable
    ValueType.BOOLEAN: "BOOLEAN",
    ValueType.REAL: "REAL",
    ValueType.STRING: "TEXT",
}


def open_db(path: str | Path) -> sqlite3.Connection:
    """Open (creating if needed) a results database and ensure the base schema."""
    conn = sqlite3.connect(str(path))
    conn.row_factory = sqlite3.Row
    try:
        conn.executescript(_BASE_TABLES)
    except sqlite3.DatabaseError as exc:
        conn.close()
        raise ValueError(f"not a usable results database: {path} ({exc})") from None
    return conn


def _columns(conn: sqlite3.Connection, table: str) -> dict[str, str]:
    return {
        row["name"]: (row["type"] or "").upper()
        for row in conn.execute(f"PRAGMA table_info({table})")
    }


def _quote(name: str) -> str:
    if not NAME_RE.match(name):
        raise ValueError(f"illegal column name {name!r}")
    return f'"{name}"'


def _rebuild_with_real(conn: sqlite3.Connection, table: str, promote: set[str]) -> None:
    cols = _columns(conn, table)
    decls = []
    for name, sqltype in cols.items():
        if name == "id" and table == "runs":
            decls.append("id INTEGER PRIMARY KEY")
            continue
        newtype = "REAL" if name in promote else (sqltype or "TEXT")
        decls.append(f"{_quote(name) if name not in ('id',) else name} {newtype}")
    names = ", ".join(_quote(c) if c not in ("id",) else c for c in cols)
    tmp = f"{table}_promoted"
    conn.execute(f"CREATE TABLE {tmp} ({', '.join(decls)})")
    conn.execute(f"INSERT INTO {tmp} ({names}) SELECT {names} FROM {table}")
    conn.execute(f"DROP TABLE {table}")
    conn.execute(f"ALTER TABLE {tmp} RENAME TO {table}")


def _ensure_columns(
    conn: sqlite3.Connection,
    table: str,
    reserved: set[str],
    schema: list[tuple[str, ValueType]],
) -> None:
    existing = _columns(conn, table)
    # SQLite treats column names case-insensitively
    stored_by_fold = {n.lower(): n for n in existing}
    promote: set[str] = set()
    for name, tag in schema:
        if name.lower() in reserved:
            raise ValueError(f"property name {name!r} collides with a reserved {table} column")
        wanted = _SQL_TYPE[tag]
        stored = stored_by_fold.get(name.lower())
        if stored is not None and stored != name:
            raise ValueError(
                f"property name {name!r} collides with existing column {stored!r} "
                f"(column names are case-insensitive)"
            )
        current = existing.get(name)
        if current is None:
            conn.execute(f"ALTER TABLE {table} ADD COLUMN {_quote(name)} {wanted}")
            existing[name] = wanted
            stored_by_fold[name.lower()] = name
        elif current == "INTEGER" and wanted == "REAL":
            promote.add(name)
        elif current == "REAL" and wanted in ("INTEGER", "REAL"):
            pass
        elif current == wanted:
            pass
        else:
            raise ValueError(
                f"property {name!r}: stored type {current} clashes with incoming {wanted}"
            )
    if promote:
        _rebuild_with_real(conn, table, promote)


def _ensure_status_enum(conn: sqlite3.Connection) -> None:
    for status in RunStatus:
        conn.execute(
            "INSERT OR IGNORE INTO enums (name, value, description) VALUES (?, ?, ?)",
            ("status", status.value, status.name),
        )


def ingest_log(conn: sqlite3.Connection, log: ExperimentLog) -> int:
    """Insert one experiment log; returns the new experiment id. Transactional."""
    log.validate()
    with conn:
        _ensure_status_enum(conn)
        cursor = conn.execute(
            "INSERT INTO experiments "
            "(name, totaltime, timelimit, memorylimit, runcount, version, hostname, cpuinfo, date, seed) "
            "VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
            (
                log.name,
                log.total_time,
                log.time_limit,
                log.memory_limit,
                log.run_count,
                log.version,
                log.hostname,
                log.cpuinfo,
                log.date,
                log.seed,
            ),
        )
        experiment_id = cursor.lastrowid
        for block in log.planners:
            settings = canonical_settings(block.settings)
            row = conn.execute(
                "SELECT id FROM plannerConfigs WHERE name = ? AND settings = ?",
                (block.name, settings),
            ).fetchone()
            if row is not None:
                planner_id = row["id"]
            else:
                planner_id = conn.execute(
                    "INSERT INTO plannerConfigs (name, settings) VALUES (?, ?)",
                    (block.name, settings),
                ).lastrowid
            _ensure_columns(conn, "runs", _RESERVED_RUN_COLUMNS, block.run_schema)
            _ensure_columns(conn, "progress", _RESERVED_PROGRESS_COLUMNS, block.progress_schema)
            run_cols = [name for name, _ in block.run_schema]
            col_sql = ", ".join(["experimentid", "plannerid"] + [_quote(c) for c in run_cols])
            marks = ", ".join(["?"] * (2 + len(run_cols)))
            prog_cols = [name for name, _ in block.progress_schema]
            prog_sql = ", ".join(["runid"] + [_quote(c) for c in prog_cols])
            prog_marks = ", ".join(["?"] * (1 + len(prog_cols)))
            for run in block.runs:
                values = [run.properties.get(c) for c in run_cols]
                run_id = conn.execute(
                    f"INSERT INTO runs ({col_sql}) VALUES ({marks})",
                    [experiment_id, planner_id] + values,
                ).lastrowid
                if run.progress:
                    conn.executemany(
                        f"INSERT INTO progress ({prog_sql}) VALUES ({prog_marks})",
                        [[run_id] + list(sample) for sample in run.progress],
                    )
    return experiment_id


def canonical_settings(settings: dict[str, str]) -> str:
    return ", ".join(f"{k}={settings[k]}" for k in sorted(settings))


# ---------------------------------------------------------------------------
# Queries


@dataclass
class Entities:
    problems: list[str]
    planners: list[str]
    versions: list[str]
    run_attributes: list[tuple[str, str]]
    progress_attributes: list[tuple[str, str]]


def _attribute_tags(conn: sqlite3.Connection, table: str, reserved: set[str]) -> list[tuple[str, str]]:
    enum_names = {row["name"] for row in conn.execute("SELECT DISTINCT name FROM enums")}
    out = []
    for name, sqltype in _columns(conn, table).items():
        if name in reserved:
            continue
        if name in enum_names:
            tag = "ENUM"
        elif sqltype == "INTEGER":
            tag = "INTEGER"
        elif sqltype == "REAL":
            tag = "REAL"
        elif sqltype == "BOOLEAN":
            tag = "BOOLEAN"
        else:
            tag = "STRING"
        out.append((name, tag))
    return out


def list_entities(conn: sqlite3.Connection) -> Entities:
    problems = [r["name"] for r in conn.execute("SELECT DISTINCT name FROM experiments ORDER BY name")]
    planners = [r["name"] for r in conn.execute("SELECT DISTINCT name FROM plannerConfigs ORDER BY name")]
    versions = [
        r["version"]
        for r in conn.execute(
            "SELECT DISTINCT version FROM experiments WHERE version IS NOT NULL ORDER BY version"
        )
    ]
    return Entities(
        problems=problems,
        planners=planners,
        versions=versions,
        run_attributes=_attribute_tags(conn, "runs", _RESERVED_RUN_COLUMNS),
        progress_attributes=_attribute_tags(conn, "progress", _RESERVED_PROGRESS_COLUMNS),
    )


@dataclass
class AttributeSamples:
    attribute: str
    type_tag: str
    per_planner: dict[str, list[object | None]] = field(default_factory=dict)


def _check_problem(conn: sqlite3.Connection, problem: str) -> None:
    known = [r["name"] for r in conn.execute("SELECT DISTINCT name FROM experiments ORDER BY name")]
    if problem not in known:
        raise ValueError(f"unknown problem {problem!r}; available: {', '.join(known) or '(none)'}")


def _check_attribute(conn: sqlite3.Connection, table: str, reserved: set[str], attribute: str) -> str:
    tags = dict(_attribute_tags(conn, table, reserved))
    if attribute not in tags:
        near = difflib.get_close_matches(attribute, tags, n=3)
        hint = f" (did you mean {', '.join(near)}?)" if near else ""
        raise ValueError(
            f"unknown attribute {attribute!r}{hint}; available: {', '.join(sorted(tags))}"
        )
    return tags[attribute]


def _experiment_filter(version: str | None) -> tuple[str, list[str]]:
    if version is None or version == "ALL":
        return "e.name = ?", []
    return "e.name = ? AND e.version = ?", [version]


def query_attribute(
    conn: sqlite3.Connection,
    problem: str,
    attribute: str,
    version: str | None = None,
    planners: list[str] | None = None,
) -> AttributeSamples:
    """All per-run values of one attribute, grouped by planner name."""
    _check_problem(conn, problem)
    tag = _check_attribute(conn, "runs", _RESERVED_RUN_COLUMNS, attribute)
    where, extra = _experiment_filter(version)
    rows = conn.execute(
        f"SELECT p.name AS planner, r.{_quote(attribute)} AS value "
        f"FROM runs r JOIN experiments e ON r.experimentid = e.id "
        f"JOIN plannerConfigs p ON r.plannerid = p.id "
        f"WHERE {where} ORDER BY r.id",
        [problem] + extra,
    ).fetchall()
    if planners is None:
        planners = sorted({row["planner"] for row in rows})
    result = AttributeSamples(attribute, tag, {name: [] for name in planners})
    for row in rows:
        if row["planner"] in result.per_planner:
            result.per_planner[row["planner"]].append(row["value"])
    return result


def query_attribute_by_version(
    conn: sqlite3.Connection,
    problem: str,
    attribute: str,
    planners: list[str] | None = None,
) -> dict[str, dict[str, list[object | None]]]:
    """Attribute values grouped planner -> version -> samples."""
    _check_problem(conn, problem)
    _check_attribute(conn, "runs", _RESERVED_RUN_COLUMNS, attribute)
    rows = conn.execute(
        f"SELECT p.name AS planner, e.version AS version, r.{_quote(attribute)} AS value "
        f"FROM runs r JOIN experiments e ON r.experimentid = e.id "
        f"JOIN plannerConfigs p ON r.plannerid = p.id "
        f"WHERE e.name = ? ORDER BY r.id",
        [problem],
    ).fetchall()
    if planners is None:
        planners = sorted({row["planner"] for row in rows})
    out: dict[str, dict[str, list[object | None]]] = {name: {} for name in planners}
    for row in rows:
        if row["planner"] in out:
            out[row["planner"]].setdefault(row["version"], []).append(row["value"])
    return out


def query_progress(
    conn: sqlite3.Connection,
    problem: str,
    attribute: str = "best_cost",
    planners: list[str] | None = None,
    version: str | None = None,
) -> dict[str, list[list[tuple[float, float | None]]]]:
    """Per-run progress series (time, attribute value), grouped by planner name."""
    _check_problem(conn, problem)
    progress_cols = _columns(conn, "progress")
    if "time" not in progress_cols:
        if planners is None:
            return {}
        return {name: [] for name in planners}
    if attribute == "time":
        raise ValueError("attribute 'time' is the progress axis, not a plottable value")
    _check_attribute(conn, "progress", _RESERVED_PROGRESS_COLUMNS | {"time"}, attribute)
    where, extra = _experiment_filter(version)
    rows = conn.execute(
        f"SELECT p.name AS planner, r.id AS runid, g.time AS t, g.{_quote(attribute)} AS cost "
        f"FROM progress g JOIN runs r ON g.runid = r.id "
        f"JOIN experiments e ON r.experimentid = e.id "
        f"JOIN plannerConfigs p ON r.plannerid = p.id "
        f"WHERE {where} ORDER BY r.id, g.rowid",
        [problem] + extra,
    ).fetchall()
    if planners is None:
        planners = sorted({row["planner"] for row in rows})
    out: dict[str, list[list[tuple[float, float | None]]]] = {name: [] for name in planners}
    current_run = None
    series: list[tuple[float, float | None]] = []
    for row in rows:
        if row["planner"] not in out:
            continue
        if row["runid"] != current_run:
            current_run = row["runid"]
            series = []
            out[row["planner"]].append(series)
        series.append((row["t"], row["cost"]))
    for name in out:
        for series in out[name]:
            series.sort(key=lambda tc: tc[0])
    return out


def count_runs(
    conn: sqlite3.Connection,
    problem: str,
    planners: list[str] | None = None,
    version: str | None = None,
) -> dict[str, int]:
    _check_problem(conn, problem)
    where, extra = _experiment_filter(version)
    rows = conn.execute(
        f"SELECT p.name AS planner, COUNT(*) AS n "
        f"FROM runs r JOIN experiments e ON r.experimentid = e.id "
        f"JOIN plannerConfigs p ON r.plannerid = p.id "
        f"WHERE {where} GROUP BY p.name",
        [problem] + extra,
    ).fetchall()
    counts = {row["planner"]: row["n"] for row in rows}
    if planners is None:
        return counts
    return {name: counts.get(name, 0) for name in planners}


def max_time_limit(conn: sqlite3.Connection, problem: str, version: str | None = None) -> float:
    where, extra = _experiment_filter(version)
    row = conn.execute(
        f"SELECT MAX(timelimit) AS tl FROM experiments e WHERE {where}", [problem] + extra
    ).fetchone()
    return float(row["tl"]) if row and row["tl"] is not None else 0.0


def db_summary(conn: sqlite3.Connection) -> dict[str, object]:
    counts = {}
    for table in ("experiments", "plannerConfigs", "runs", "progress"):
        counts[table] = conn.execute(f"SELECT COUNT(*) AS n FROM {table}").fetchone()["n"]
    entities = list_entities(conn)
    return {
        "counts": counts,
        "problems": entities.problems,
        "planners": entities.planners,
        "versions": entities.versions,
        "run_attributes": entities.run_attributes,
        "progress_attributes": entities.progress_attributes,
    }
