"""Plain-text benchmark log format: bit-exact writer and parser.

The format is line-oriented and self-describing: an experiment header, then
one block per planner declaring its settings, its run property schema, one
delimited line per run, a progress schema, and one progress line per run.
Absent values are the literal `N/A`. Reals are written with 17 significant
digits so parse(write(x)) reproduces every float bit-for-bit. The full
grammar is documented in docs/log-format.md.
"""

from __future__ import annotations

from .records import (
    NAME_RE,
    ExperimentLog,
    PlannerBlock,
    RunRecord,
    ValueType,
)


def _fmt_real(v: float) -> str:
    return "%.17g" % v


def _fmt_value(value: object | None, tag: ValueType) -> str:
    if value is None:
        return "N/A"
    if tag is ValueType.REAL:
        return _fmt_real(float(value))
    if tag is ValueType.INTEGER or tag is ValueType.ENUM:
        return str(int(value))
    if tag is ValueType.BOOLEAN:
        return "true" if value else "false"
    text = str(value)
    if any(c in text for c in (";", "\t", "\n", "\r")):
        raise ValueError(f"string value {text!r} contains a reserved character")
    return text


def _parse_value(text: str, tag: ValueType, where: str) -> object | None:
    if text == "N/A":
        return None
    try:
        if tag is ValueType.REAL:
            return float(text)
        if tag is ValueType.INTEGER or tag is ValueType.ENUM:
            return int(text)
        if tag is ValueType.BOOLEAN:
            if text == "true":
                return True
            if text == "false":
                return False
            raise ValueError(text)
    except ValueError:
        raise LogParseError(f"{where}: {text!r} is not a valid {tag.value}") from None
    return text


class LogParseError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Writer


def write_log(log: ExperimentLog) -> str:
    log.validate()
    out: list[str] = []
    out.append(f"Experiment {log.name}")
    out.append(f"Suite version {log.version}".rstrip())
    out.append(f"Running on {log.hostname}")
    out.append(f"Starting at {log.date}")
    cpu_lines = log.cpuinfo.splitlines() if log.cpuinfo else []
    for line in cpu_lines:
        if line.rstrip() == ".":
            raise ValueError("cpuinfo must not contain a lone '.' line")
        if "\t" in line:
            raise ValueError("cpuinfo must not contain tabs")
        out.append(line)
    out.append(".")
    out.append(f"Seed {log.seed}")
    out.append(f"Time limit {_fmt_real(log.time_limit)} seconds")
    out.append(f"Memory limit {_fmt_real(log.memory_limit)} MB")
    out.append(f"{log.run_count} runs per planner")
    out.append(f"Total time {_fmt_real(log.total_time)} seconds")
    out.append(f"{len(log.problem_properties)} problem properties")
    for key, value in log.problem_properties.items():
        out.append(f"{key} = {value}")
    out.append(f"{len(log.planners)} planners")
    for block in log.planners:
        _write_planner(out, block)
    return "\n".join(out) + "\n"


def _write_planner(out: list[str], block: PlannerBlock) -> None:
    out.append(f"planner {block.name}")
    out.append(f"{len(block.settings)} common properties")
    for key, value in block.settings.items():
        out.append(f"{key} = {value}")
    out.append(f"{len(block.run_schema)} properties for each run")
    for name, tag in block.run_schema:
        if not NAME_RE.match(name):
            raise ValueError(f"invalid run property name {name!r}")
        out.append(f"{name} {tag.value}")
    out.append(f"{len(block.runs)} runs")
    for run in block.runs:
        values = [
            _fmt_value(run.properties.get(name), tag) for name, tag in block.run_schema
        ]
        out.append("; ".join(values))
    out.append(f"{len(block.progress_schema)} progress properties")
    for name, tag in block.progress_schema:
        if not NAME_RE.match(name):
            raise ValueError(f"invalid progress property name {name!r}")
        out.append(f"{name} {tag.value}")
    if block.progress_schema:
        out.append(f"{len(block.runs)} runs with progress data")
        for run in block.runs:
            tuples = [
                ",".join(_fmt_value(v, tag) for v, (_, tag) in zip(sample, block.progress_schema))
                for sample in run.progress
            ]
            out.append(";".join(tuples))
    else:
        out.append("0 runs with progress data")
    out.append(".")


# ---------------------------------------------------------------------------
# Parser


class _Cursor:
    def __init__(self, text: str):
        self.lines = text.split("\n")
        if self.lines and self.lines[-1] == "":
            self.lines.pop()
        self.pos = 0

    @property
    def lineno(self) -> int:
        return self.pos + 1

    def eof(self) -> bool:
        return self.pos >= len(self.lines)

    def peek(self) -> str:
        if self.eof():
            raise LogParseError(f"line {self.lineno}: unexpected end of log")
        return self.lines[self.pos]

    def take(self) -> str:
        line = self.peek()
        self.pos += 1
        return line

    def expect_prefix(self, prefix: str) -> str:
        line = self.take()
        if not line.startswith(prefix):
            raise LogParseError(
                f"line {self.lineno - 1}: expected a line starting with {prefix!r}, got {line!r}"
            )
        return line[len(prefix) :]

    def fail(self, message: str) -> LogParseError:
        return LogParseError(f"line {self.lineno}: {message}")


def _int_prefix(cur: _Cursor, suffix: str) -> int:
    line = cur.take()
    if not line.endswith(suffix):
        raise LogParseError(f"line {cur.lineno - 1}: expected `<int> {suffix.strip()}`, got {line!r}")
    head = line[: -len(suffix)]
    try:
        return int(head)
    except ValueError:
        raise LogParseError(f"line {cur.lineno - 1}: {head!r} is not an integer") from None


def _real_between(cur: _Cursor, prefix: str, suffix: str) -> float:
    line = cur.take()
    if not line.startswith(prefix) or not line.endswith(suffix):
        raise LogParseError(
            f"line {cur.lineno - 1}: expected `{prefix}<real>{suffix}`, got {line!r}"
        )
    body = line[len(prefix) : len(line) - len(suffix)]
    try:
        return float(body)
    except ValueError:
        raise LogParseError(f"line {cur.lineno - 1}: {body!r} is not a real") from None


def _key_value(cur: _Cursor) -> tuple[str, str]:
    line = cur.take()
    if " = " not in line:
        raise LogParseError(f"line {cur.lineno - 1}: expected `key = value`, got {line!r}")
    key, value = line.split(" = ", 1)
    return key, value


def _schema_line(cur: _Cursor, seen: set[str]) -> tuple[str, ValueType]:
    line = cur.take()
    parts = line.rsplit(" ", 1)
    if len(parts) != 2:
        raise LogParseError(f"line {cur.lineno - 1}: expected `<name> <TYPETAG>`, got {line!r}")
    name, tag_text = parts
    if not NAME_RE.match(name):
        raise LogParseError(f"line {cur.lineno - 1}: invalid property name {name!r}")
    if name in seen:
        raise LogParseError(f"line {cur.lineno - 1}: duplicate property {name!r}")
    seen.add(name)
    try:
        tag = ValueType(tag_text)
    except ValueError:
        raise LogParseError(f"line {cur.lineno - 1}: unknown type tag {tag_text!r}") from None
    return name, tag


def parse_log(text: str) -> ExperimentLog:
    cur = _Cursor(text)
    name = cur.expect_prefix("Experiment ")
    version = ""
    if not cur.eof() and cur.peek().startswith("Suite version"):
        version = cur.take()[len("Suite version") :].strip()
    hostname = cur.expect_prefix("Running on ")
    date = cur.expect_prefix("Starting at ")
    cpu_lines: list[str] = []
    while True:
        line = cur.take()
        if line == ".":
            break
        cpu_lines.append(line)
    seed_text = cur.expect_prefix("Seed ")
    try:
        seed = int(seed_text)
    except ValueError:
        raise LogParseError(f"line {cur.lineno - 1}: seed {seed_text!r} is not an integer") from None
    time_limit = _real_between(cur, "Time limit ", " seconds")
    memory_limit = _real_between(cur, "Memory limit ", " MB")
    run_count = _int_prefix(cur, " runs per planner")
    total_time = _real_between(cur, "Total time ", " seconds")

    problem_properties: dict[str, str] = {}
    if not cur.eof() and cur.peek().endswith(" problem properties"):
        n_props = _int_prefix(cur, " problem properties")
        for _ in range(n_props):
            key, value = _key_value(cur)
            if key in problem_properties:
                raise LogParseError(f"line {cur.lineno - 1}: duplicate problem property {key!r}")
            problem_properties[key] = value

    n_planners = _int_prefix(cur, " planners")
    planners = [_parse_planner(cur, run_count) for _ in range(n_planners)]
    while not cur.eof():
        if cur.take().strip():
            raise LogParseError(f"line {cur.lineno - 1}: trailing content after last planner")

    return ExperimentLog(
        name=name,
        version=version,
        hostname=hostname,
        cpuinfo="\n".join(cpu_lines),
        date=date,
        seed=seed,
        time_limit=time_limit,
        memory_limit=memory_limit,
        run_count=run_count,
        total_time=total_time,
        problem_properties=problem_properties,
        planners=planners,
    )


def _parse_planner(cur: _Cursor, run_count: int) -> PlannerBlock:
    name = cur.expect_prefix("planner ")
    n_settings = _int_prefix(cur, " common properties")
    settings: dict[str, str] = {}
    for _ in range(n_settings):
        key, value = _key_value(cur)
        if key in settings:
            raise LogParseError(f"line {cur.lineno - 1}: duplicate setting {key!r}")
        settings[key] = value

    n_run_props = _int_prefix(cur, " properties for each run")
    seen: set[str] = set()
    run_schema = [_schema_line(cur, seen) for _ in range(n_run_props)]

    n_runs = _int_prefix(cur, " runs")
    runs: list[RunRecord] = []
    for run_index in range(n_runs):
        lineno = cur.lineno
        line = cur.take()
        values = line.split("; ") if line else []
        if len(values) != n_run_props:
            raise LogParseError(
                f"line {lineno}: run line has {len(values)} values, schema declares {n_run_props}"
            )
        props = {
            prop_name: _parse_value(v, tag, f"line {lineno}, column {prop_name}")
            for v, (prop_name, tag) in zip(values, run_schema)
        }
        runs.append(RunRecord(name, run_index, props))

    n_prog_props = _int_prefix(cur, " progress properties")
    prog_seen: set[str] = set()
    progress_schema = [_schema_line(cur, prog_seen) for _ in range(n_prog_props)]
    if progress_schema and progress_schema[0] != ("time", ValueType.REAL):
        raise LogParseError(
            f"line {cur.lineno - 1}: first progress property must be `time REAL`"
        )

    n_prog_runs = _int_prefix(cur, " runs with progress data")
    if progress_schema:
        if n_prog_runs != n_runs:
            raise LogParseError(
                f"line {cur.lineno - 1}: {n_prog_runs} progress lines for {n_runs} runs"
            )
        for run in runs:
            lineno = cur.lineno
            line = cur.take()
            if line:
                stream = []
                for chunk in line.split(";"):
                    fields = chunk.split(",")
                    if len(fields) != len(progress_schema):
                        raise LogParseError(
                            f"line {lineno}: progress tuple has {len(fields)} values, "
                            f"schema declares {len(progress_schema)}"
                        )
                    stream.append(
                        tuple(
                            _parse_value(f, tag, f"line {lineno}, progress {prop_name}")
                            for f, (prop_name, tag) in zip(fields, progress_schema)
                        )
                    )
                run.progress = stream
    elif n_prog_runs != 0:
        raise LogParseError(
            f"line {cur.lineno - 1}: progress lines declared without a progress schema"
        )

    terminator = cur.take()
    if terminator != ".":
        raise LogParseError(f"line {cur.lineno - 1}: expected `.` to close planner block")
    return PlannerBlock(name, settings, run_schema, runs, progress_schema)
