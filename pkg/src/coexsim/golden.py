"""Replay shipped scenarios and compare byte-for-byte against stored traces."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .builtins import GOLDEN_NAMES, get_builtin
from .runner import run_scenario

_PACKAGE_DIR = "golden"


class GoldenError(Exception):
    pass


def golden_names() -> tuple[str, ...]:
    return GOLDEN_NAMES


def load_golden_text(name: str) -> str:
    ref = resources.files(__package__) / _PACKAGE_DIR / f"{name}.trace"
    if not ref.is_file():
        raise GoldenError(f"no stored trace for scenario {name!r}")
    return ref.read_text()


@dataclass
class ReplayResult:
    name: str
    ok: bool
    expected_sha256: str
    actual_sha256: str
    divergence_line: int | None = None   # 1-based; None when traces match
    expected_line: str = ""
    actual_line: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name, "ok": self.ok,
            "expected_sha256": self.expected_sha256,
            "actual_sha256": self.actual_sha256,
            "divergence_line": self.divergence_line,
            "expected_line": self.expected_line,
            "actual_line": self.actual_line,
        }


def _first_divergence(expected: str, actual: str) -> tuple[int, str, str]:
    exp_lines = expected.splitlines()
    act_lines = actual.splitlines()
    for i, (e, a) in enumerate(zip(exp_lines, act_lines), start=1):
        if e != a:
            return i, e, a
    i = min(len(exp_lines), len(act_lines)) + 1
    longer = exp_lines if len(exp_lines) > len(act_lines) else act_lines
    missing = longer[i - 1] if len(exp_lines) != len(act_lines) else ""
    if len(exp_lines) > len(act_lines):
        return i, missing, ""
    return i, "", missing


def replay_builtin(name: str) -> ReplayResult:
    """Re-run a stored scenario and diff its fresh trace against the archive."""
    import hashlib

    expected = load_golden_text(name)
    artifacts = run_scenario(get_builtin(name))
    actual = artifacts.trace.text()
    expected_sha = hashlib.sha256(expected.encode()).hexdigest()
    actual_sha = artifacts.trace.sha256()
    if expected == actual:
        return ReplayResult(name, True, expected_sha, actual_sha)
    line, exp, act = _first_divergence(expected, actual)
    return ReplayResult(name, False, expected_sha, actual_sha,
                        divergence_line=line, expected_line=exp,
                        actual_line=act)
