"""Acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line (shown even when pytest
captures output) and enforces the criterion's time limit.  Run directly with
``python tests/test_acceptance.py`` for the same lines without pytest.
"""

import os
import subprocess
import sys
import time
from pathlib import Path

import pytest

from valuations.suite import RUNNERS

SEED = 1
ROOT = Path(__file__).resolve().parent.parent
REPRODUCE = ROOT / "scripts" / "reproduce.sh"

# seconds allowed per criterion
LIMITS = {1: 30, 2: 60, 3: 10, 4: 60, 5: 30, 6: 60, 7: 60, 8: 30}


def _emit(line: str, capsys=None):
    if capsys is None:
        print(line, flush=True)
    else:
        with capsys.disabled():
            print("\n" + line, flush=True)


def run_criterion(number: int, capsys=None) -> bool:
    start = time.perf_counter()
    result = RUNNERS[number](SEED)
    elapsed = time.perf_counter() - start
    in_time = elapsed < LIMITS[number]
    ok = result.passed and in_time
    summary = ", ".join(f"{k}={v}" for k, v in result.details.items())
    timing = f"{elapsed:.1f}s < {LIMITS[number]}s" if in_time else f"{elapsed:.1f}s EXCEEDS {LIMITS[number]}s"
    _emit(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {result.title}: {summary} ({timing})", capsys)
    return ok


def run_end_to_end(capsys=None) -> bool:
    env = dict(os.environ, PYTHON=sys.executable)
    runs = [subprocess.run(["bash", str(REPRODUCE)], capture_output=True, env=env, cwd=ROOT) for _ in range(2)]
    codes = [r.returncode for r in runs]
    identical = runs[0].stdout == runs[1].stdout and runs[0].stdout != b""
    ok = codes == [0, 0] and identical
    _emit(
        f"[{'PASS' if ok else 'FAIL'}] criterion 9: end-to-end CLI: exit codes {codes}, "
        f"--json output {'byte-identical' if identical else 'DIFFERS'} across two runs ({len(runs[0].stdout)} bytes)",
        capsys,
    )
    if not ok:
        sys.stderr.write(runs[0].stderr.decode())
    return ok


@pytest.mark.parametrize("number", sorted(LIMITS))
def test_criterion(number, capsys):
    assert run_criterion(number, capsys)


def test_criterion_9_end_to_end(capsys):
    assert run_end_to_end(capsys)


if __name__ == "__main__":
    results = [run_criterion(k) for k in sorted(LIMITS)] + [run_end_to_end()]
    sys.exit(0 if all(results) else 1)
