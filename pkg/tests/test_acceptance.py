"""Acceptance gate: every registered criterion must pass at its stated tolerance.

Run with -s (or read the captured output) to see one pass/fail line per
criterion, including the measured value and tolerance.
"""

import pytest

from cmvspectra.acceptance import CRITERIA

_cache = {}


def _run(name):
    if name not in _cache:
        fn = dict(CRITERIA)[name]
        _cache[name] = fn()
    return _cache[name]


@pytest.mark.parametrize("name", [name for name, _ in CRITERIA])
def test_criterion(name):
    result = _run(name)
    status = "PASS" if result.passed else "FAIL"
    line = (f"{status} {result.name}: measured={result.measured:.6e} "
            f"tolerance={result.tolerance:.6e}")
    if result.detail:
        line += f" ({result.detail})"
    print(line)
    assert result.passed, line
