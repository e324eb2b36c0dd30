import json
import os
import subprocess
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[2]


def _binary():
    env = os.environ.get("CANONSCREEN_BIN")
    return Path(env) if env else ROOT / "build" / "canonscreen"


@pytest.fixture(scope="session")
def schema_dir():
    return Path(os.environ.get("CANONSCREEN_SCHEMA_DIR", ROOT / "schemas"))


@pytest.fixture(scope="session")
def cli():
    exe = _binary()
    if not exe.exists():
        pytest.skip(f"CLI binary not built: {exe}")

    def run(*args, cwd=None, expect=0):
        proc = subprocess.run([str(exe), *map(str, args)], cwd=cwd, capture_output=True, text=True)
        assert proc.returncode == expect, proc.stderr
        out = json.loads(proc.stdout) if proc.returncode == 0 and proc.stdout.strip() else None
        return proc, out

    return run


def write_csv(path, ids, columns, rows):
    lines = [",".join(["id", *columns])]
    for i, row in zip(ids, rows):
        lines.append(",".join([i, *(repr(float(v)) for v in row)]))
    Path(path).write_text("\n".join(lines) + "\n")


def split_csv(src, head_path, tail_path, n_head):
    lines = Path(src).read_text().splitlines()
    Path(head_path).write_text("\n".join(lines[: n_head + 1]) + "\n")
    Path(tail_path).write_text("\n".join([lines[0], *lines[n_head + 1 :]]) + "\n")
