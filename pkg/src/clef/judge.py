"""Compile-and-run judge enforcing time and memory limits per test.

Each judged program is compiled once and executed against the suite's cases
in id order, stopping at the first failure.  Execution uses a fresh process
per test with stdin/stdout redirected to files; wall-clock time is enforced by
a polling kill and peak memory is read from the child's rusage accounting.
Submissions classify into one of seven outcomes: Accepted, Compile-Time Error,
Runtime Error, Time Limit Exceeded, Memory Limit Exceeded, Wrong Answer, or
Other (infrastructure problems surfaced as a verdict in batch reports).
"""

from __future__ import annotations

import enum
import json
import os
import resource
import shutil
import signal
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

#: Address-space headroom above the memory limit so that moderately
#: over-limit allocations succeed and show up in the peak-RSS accounting
#: instead of failing inside malloc.
_AS_HEADROOM_BYTES = 256 * 1024 * 1024
_OUTPUT_CAP_BYTES = 64 * 1024 * 1024
_POLL_SECONDS = 0.002


class JudgeInfrastructureError(Exception):
    """Missing compiler, broken sandbox, or similar non-verdict faults."""


class Outcome(str, enum.Enum):
    ACCEPTED = "Accepted"
    COMPILE_TIME_ERROR = "CompileTimeError"
    RUNTIME_ERROR = "RuntimeError"
    TIME_LIMIT_EXCEEDED = "TimeLimitExceeded"
    MEMORY_LIMIT_EXCEEDED = "MemoryLimitExceeded"
    WRONG_ANSWER = "WrongAnswer"
    OTHER = "Other"

    @property
    def code(self) -> str:
        return _OUTCOME_CODES[self]


_OUTCOME_CODES = {
    Outcome.ACCEPTED: "AC",
    Outcome.COMPILE_TIME_ERROR: "CE",
    Outcome.RUNTIME_ERROR: "RE",
    Outcome.TIME_LIMIT_EXCEEDED: "TLE",
    Outcome.MEMORY_LIMIT_EXCEEDED: "MLE",
    Outcome.WRONG_ANSWER: "WA",
    Outcome.OTHER: "OT",
}

OUTCOME_BY_CODE = {code: outcome for outcome, code in _OUTCOME_CODES.items()}


@dataclass(frozen=True)
class ResourceLimits:
    time_ms: int
    memory_kb: int

    def __post_init__(self):
        if self.time_ms <= 0 or self.memory_kb <= 0:
            raise ValueError("time_ms and memory_kb must be positive")


@dataclass(frozen=True)
class TestCase:
    __test__ = False  # not a pytest class

    id: int
    input: bytes
    expected_output: bytes


@dataclass(frozen=True)
class TestSuite:
    __test__ = False  # not a pytest class

    cases: tuple[TestCase, ...]
    limits: ResourceLimits

    def __post_init__(self):
        if not self.cases:
            raise ValueError("a test suite needs at least one case")
        ids = [c.id for c in self.cases]
        if ids != list(range(1, len(ids) + 1)):
            raise ValueError(f"test ids must be dense 1..n, got {ids}")


@dataclass(frozen=True)
class TestMeasure:
    __test__ = False  # not a pytest class

    test_id: int
    status: str  # pass, WA, TLE, MLE, RE
    time_ms: int
    memory_kb: int


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    first_failed_test: Optional[int] = None
    measured: tuple[TestMeasure, ...] = ()
    detail: str = ""

    def __post_init__(self):
        terminal = self.outcome in (Outcome.ACCEPTED, Outcome.COMPILE_TIME_ERROR)
        if terminal != (self.first_failed_test is None):
            raise ValueError("first_failed_test must be set exactly for per-test failures")


@dataclass(frozen=True)
class CompilerConfig:
    command: tuple[str, ...] = ("gcc",)
    flags: tuple[str, ...] = ("-O2", "-std=c99", "-w")
    link_flags: tuple[str, ...] = ("-lm",)


@dataclass(frozen=True)
class Binary:
    path: Path
    log: str = ""


@dataclass(frozen=True)
class CompileFailure:
    log: str


def compile_source(
    source: str, workdir: str | Path, cc: CompilerConfig | None = None
) -> Binary | CompileFailure:
    """Compile C text inside ``workdir``; diagnostics are captured either way."""
    cc = cc or CompilerConfig()
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    src = workdir / "program.c"
    exe = workdir / "program"
    src.write_text(source, encoding="utf-8")
    cmd = [*cc.command, *cc.flags, str(src), "-o", str(exe), *cc.link_flags]
    try:
        proc = subprocess.run(cmd, capture_output=True, text=True, timeout=60)
    except FileNotFoundError as exc:
        raise JudgeInfrastructureError(f"compiler not found: {cc.command[0]}") from exc
    except subprocess.TimeoutExpired as exc:
        raise JudgeInfrastructureError("compiler timed out") from exc
    log = proc.stderr + proc.stdout
    if proc.returncode != 0 or not exe.exists():
        return CompileFailure(log or f"compiler exited with {proc.returncode}")
    return Binary(exe, log)


def _child_limits(limits: ResourceLimits):
    as_bytes = limits.memory_kb * 1024 + _AS_HEADROOM_BYTES
    cpu_s = limits.time_ms // 1000 + 2

    def apply() -> None:
        resource.setrlimit(resource.RLIMIT_AS, (as_bytes, as_bytes))
        resource.setrlimit(resource.RLIMIT_CPU, (cpu_s, cpu_s))
        resource.setrlimit(resource.RLIMIT_CORE, (0, 0))
        resource.setrlimit(resource.RLIMIT_FSIZE, (_OUTPUT_CAP_BYTES, _OUTPUT_CAP_BYTES))

    return apply


def run_test(bin: Binary, case: TestCase, limits: ResourceLimits) -> TestMeasure:
    """Execute one test in a fresh process and classify the result."""
    with tempfile.TemporaryDirectory(prefix="clef-run-") as rundir:
        in_path = os.path.join(rundir, "stdin.txt")
        out_path = os.path.join(rundir, "stdout.txt")
        with open(in_path, "wb") as f:
            f.write(case.input)
        with open(in_path, "rb") as stdin, open(out_path, "wb") as stdout:
            try:
                proc = subprocess.Popen(
                    [str(bin.path)],
                    stdin=stdin,
                    stdout=stdout,
                    stderr=subprocess.DEVNULL,
                    cwd=rundir,
                    preexec_fn=_child_limits(limits),
                )
            except OSError as exc:
                raise JudgeInfrastructureError(f"failed to launch program: {exc}") from exc
            start = time.monotonic()
            deadline = start + limits.time_ms / 1000.0
            timed_out = False
            while True:
                pid, status, ru = os.wait4(proc.pid, os.WNOHANG)
                if pid == proc.pid:
                    break
                now = time.monotonic()
                if now >= deadline:
                    timed_out = True
                    try:
                        os.kill(proc.pid, signal.SIGKILL)
                    except ProcessLookupError:
                        pass
                    pid, status, ru = os.wait4(proc.pid, 0)
                    break
                time.sleep(min(_POLL_SECONDS, max(deadline - now, 0)))
            proc.returncode = 0  # reaped via wait4; silence Popen cleanup
        elapsed_ms = int((time.monotonic() - start) * 1000)
        peak_kb = ru.ru_maxrss  # KiB on Linux
        signaled = os.WIFSIGNALED(status)
        sig = os.WTERMSIG(status) if signaled else 0
        exit_code = os.WEXITSTATUS(status) if os.WIFEXITED(status) else -1

        if timed_out or sig == signal.SIGXCPU:
            return TestMeasure(case.id, "TLE", max(elapsed_ms, limits.time_ms), peak_kb)
        if peak_kb > limits.memory_kb:
            return TestMeasure(case.id, "MLE", elapsed_ms, peak_kb)
        if signaled or exit_code != 0:
            return TestMeasure(case.id, "RE", elapsed_ms, peak_kb)
        with open(out_path, "rb") as f:
            actual = f.read()
        if not outputs_match(actual, case.expected_output):
            return TestMeasure(case.id, "WA", elapsed_ms, peak_kb)
        return TestMeasure(case.id, "pass", elapsed_ms, peak_kb)


def outputs_match(actual: bytes, expected: bytes) -> bool:
    """Byte equality ignoring trailing whitespace per line and final newlines."""
    return _normalize(actual) == _normalize(expected)


def _normalize(data: bytes) -> list[bytes]:
    lines = [line.rstrip() for line in data.replace(b"\r\n", b"\n").split(b"\n")]
    while lines and not lines[-1]:
        lines.pop()
    return lines


_STATUS_TO_OUTCOME = {
    "WA": Outcome.WRONG_ANSWER,
    "TLE": Outcome.TIME_LIMIT_EXCEEDED,
    "MLE": Outcome.MEMORY_LIMIT_EXCEEDED,
    "RE": Outcome.RUNTIME_ERROR,
}


def judge(
    source: str,
    suite: TestSuite,
    cc: CompilerConfig | None = None,
    workdir: str | Path | None = None,
) -> Verdict:
    """Compile and run ``source`` against the suite, stopping at the first failure."""
    own_dir = workdir is None
    workdir = Path(workdir) if workdir else Path(tempfile.mkdtemp(prefix="clef-judge-"))
    try:
        compiled = compile_source(source, workdir, cc)
        if isinstance(compiled, CompileFailure):
            return Verdict(Outcome.COMPILE_TIME_ERROR, None, (), compiled.log)
        measures: list[TestMeasure] = []
        for case in suite.cases:
            m = run_test(compiled, case, suite.limits)
            measures.append(m)
            if m.status != "pass":
                return Verdict(
                    _STATUS_TO_OUTCOME[m.status], case.id, tuple(measures), compiled.log
                )
        return Verdict(Outcome.ACCEPTED, None, tuple(measures), compiled.log)
    finally:
        if own_dir:
            shutil.rmtree(workdir, ignore_errors=True)


# ---------------------------------------------------------------------------
# Suite directory layout: tests/<n>.in, tests/<n>.ans, limits.json


def load_suite(directory: str | Path) -> TestSuite:
    directory = Path(directory)
    limits_path = directory / "limits.json"
    if not limits_path.exists():
        raise FileNotFoundError(f"missing {limits_path}")
    raw = json.loads(limits_path.read_text())
    limits = ResourceLimits(int(raw["time_ms"]), int(raw["memory_kb"]))
    cases: list[TestCase] = []
    n = 1
    while (directory / f"{n}.in").exists():
        ans = directory / f"{n}.ans"
        if not ans.exists():
            raise FileNotFoundError(f"missing answer file {ans}")
        cases.append(TestCase(n, (directory / f"{n}.in").read_bytes(), ans.read_bytes()))
        n += 1
    if not cases:
        raise FileNotFoundError(f"no test cases found under {directory}")
    return TestSuite(tuple(cases), limits)


def save_suite(suite: TestSuite, directory: str | Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "limits.json").write_text(
        json.dumps({"time_ms": suite.limits.time_ms, "memory_kb": suite.limits.memory_kb})
        + "\n"
    )
    for case in suite.cases:
        (directory / f"{case.id}.in").write_bytes(case.input)
        (directory / f"{case.id}.ans").write_bytes(case.expected_output)
