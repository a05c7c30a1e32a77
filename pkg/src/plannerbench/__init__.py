"""Benchmarking suite for sampling-based motion planners.

Plan in 2D polygonal worlds, run repeatable benchmark campaigns, store the
results in an extensible plain-text log and a SQLite database, and render
statistical plots from either the command line or a small web server.
"""

from pathlib import Path

__version__ = "0.1.0"

SAMPLE_LOGS_DIR = Path(__file__).parent / "data" / "sample_logs"


def sample_logs() -> list[Path]:
    """Paths of the log files bundled for demos and tests."""
    return sorted(SAMPLE_LOGS_DIR.glob("*.log"))
