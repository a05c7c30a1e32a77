"""Record API fixtures for the UI tests.

Builds a database from the bundled sample logs with the plannerbench CLI,
serves it, and saves raw response bytes for the exact request paths the UI
issues.  Tests replay these bytes through a stub fetch, so they exercise the
real wire format without a live server.
"""

import argparse
import json
import socket
import subprocess
import sys
import tempfile
import time
import urllib.error
import urllib.request
from pathlib import Path

from plannerbench import sample_logs

# Paths must match the URL builder in src/api.ts byte for byte.
GET_FIXTURES = [
    ("/api/entities", "entities.json"),
    ("/api/plot/performance?problem=corridor&attribute=time", "performance_box.json"),
    ("/api/plot/performance?problem=corridor&attribute=time&format=svg", "performance_box.svg"),
    ("/api/plot/performance?problem=corridor&attribute=time&ecdf=true", "performance_ecdf.json"),
    ("/api/plot/performance?problem=corridor&attribute=time&version=0.1.0", "performance_box_v010.json"),
    ("/api/plot/performance?problem=corridor&attribute=time&planners=rrt%2Crrt_connect", "performance_subset.json"),
    ("/api/plot/performance?problem=corridor&attribute=status", "performance_success.json"),
    ("/api/plot/progress?problem=corridor&attribute=best_cost", "progress_corridor.json"),
    ("/api/plot/progress?problem=empty&attribute=best_cost", "progress_empty.json"),
    ("/api/plot/progress?problem=empty&attribute=best_cost&format=svg", "progress_empty.svg"),
    ("/api/plot/progress?problem=empty&attribute=best_cost&show_points=true", "progress_points.json"),
    ("/api/plot/progress?problem=empty&attribute=best_cost&smooth_window=0", "progress_sw0_error.json"),
    ("/api/plot/regression?problem=corridor&attribute=time", "regression.json"),
    ("/api/plot/regression?problem=corridor&attribute=time&format=svg", "regression.svg"),
]

MALFORMED_UPLOAD = b"this is not a log\n"


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def wait_ready(base: str, proc: subprocess.Popen, timeout: float = 20.0) -> None:
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        if proc.poll() is not None:
            raise RuntimeError(f"server exited early with code {proc.returncode}")
        try:
            with urllib.request.urlopen(base + "/api/entities", timeout=2.0):
                return
        except (urllib.error.URLError, ConnectionError):
            time.sleep(0.15)
    raise RuntimeError("server did not become ready")


def fetch(base: str, path: str, method: str = "GET", body: bytes | None = None):
    req = urllib.request.Request(base + path, data=body, method=method)
    if body is not None:
        req.add_header("content-type", "application/octet-stream")
    try:
        with urllib.request.urlopen(req, timeout=30.0) as resp:
            return resp.status, resp.headers.get("content-type", ""), resp.read()
    except urllib.error.HTTPError as err:
        return err.code, err.headers.get("content-type", ""), err.read()


def serve(db: Path, port: int) -> subprocess.Popen:
    return subprocess.Popen(
        ["plannerbench", "serve", "--db", str(db), "--port", str(port), "--host", "127.0.0.1"],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )


def record_sample(out: Path, db: Path) -> None:
    logs = [str(p) for p in sample_logs()]
    subprocess.run(
        ["plannerbench", "db", "add", *logs, "--db", str(db)],
        check=True,
        stdout=subprocess.DEVNULL,
    )
    port = free_port()
    base = f"http://127.0.0.1:{port}"
    proc = serve(db, port)
    manifest = {}
    try:
        wait_ready(base, proc)
        for path, name in GET_FIXTURES:
            status, ctype, data = fetch(base, path)
            (out / name).write_bytes(data)
            manifest[f"GET {path}"] = {"file": name, "status": status, "content_type": ctype}
            print(f"GET {path} -> {name} ({status}, {len(data)} bytes)")
        upload_body = sample_logs()[-1].read_bytes()
        (out / "upload_body.log").write_bytes(upload_body)
        status, ctype, data = fetch(base, "/api/upload", "POST", upload_body)
        (out / "upload_ok.json").write_bytes(data)
        manifest["POST /api/upload"] = {
            "file": "upload_ok.json",
            "status": status,
            "content_type": ctype,
            "body_file": "upload_body.log",
        }
        print(f"POST /api/upload -> upload_ok.json ({status})")
        status, ctype, data = fetch(base, "/api/upload", "POST", MALFORMED_UPLOAD)
        (out / "upload_bad.json").write_bytes(data)
        manifest["POST /api/upload#malformed"] = {
            "file": "upload_bad.json",
            "status": status,
            "content_type": ctype,
        }
        print(f"POST /api/upload (malformed) -> upload_bad.json ({status})")
    finally:
        proc.terminate()
        proc.wait(timeout=10)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def record_empty(out: Path, db: Path) -> None:
    db.touch()
    port = free_port()
    base = f"http://127.0.0.1:{port}"
    proc = serve(db, port)
    try:
        wait_ready(base, proc)
        status, ctype, data = fetch(base, "/api/entities")
        (out / "entities_empty.json").write_bytes(data)
        manifest = {
            "GET /api/entities": {
                "file": "entities_empty.json",
                "status": status,
                "content_type": ctype,
            }
        }
        print(f"GET /api/entities (empty db) -> entities_empty.json ({status})")
    finally:
        proc.terminate()
        proc.wait(timeout=10)
    (out / "manifest_empty.json").write_text(json.dumps(manifest, indent=2) + "\n")


def main() -> int:
    default_out = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=default_out, help="fixture directory")
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        record_sample(args.out, Path(tmp) / "sample.db")
        record_empty(args.out, Path(tmp) / "empty.db")
    print(f"fixtures written to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
