"""The verification battery: every check must pass on the worked corpus,
and the reported results must carry usable residual/tolerance data.
"""

from __future__ import annotations

import pytest

import refinable as rf

from conftest import make_mask

CHECK_NAMES = [
    "spectrum-decomposition",
    "jordan-identity",
    "conventions",
    "extension-recurrence",
    "homogeneity",
    "zero-at-origin",
    "reconstruction",
    "accuracy-reproduction",
    "independence-consistency",
]


@pytest.mark.parametrize("name", ["bspline3", "d4", "jordan13", "half", "haar"])
def test_battery_passes_on_corpus(name):
    battery = rf.run_battery(make_mask(name), level=9)
    failed = [c for c in battery.checks if not c.passed]
    assert battery.passed, [(c.name, c.residual, c.detail) for c in failed]
    got = [c.name for c in battery.checks]
    for check in CHECK_NAMES:
        assert check in got, check
    for c in battery.checks:
        if c.residual is not None and c.tolerance is not None:
            assert c.residual <= c.tolerance, c.name


def test_half_reports_dependency_witness():
    battery = rf.run_battery(make_mask("half"), level=8)
    witness = battery.check("dependency-witness")
    assert witness.passed
    assert witness.residual <= witness.tolerance


def test_exact_mode_battery():
    battery = rf.run_battery(make_mask("bspline3"), level=8, exact=True)
    assert battery.passed
    # the similarity B T = J B is exact in rational arithmetic; the spectrum
    # check still compares against float eigenvalues, so only near-zero there
    assert battery.check("jordan-identity").residual == 0.0


def test_check_lookup_raises_for_unknown_name():
    battery = rf.run_battery(make_mask("haar"), level=6)
    with pytest.raises(KeyError):
        battery.check("no-such-check")


def test_battery_level_is_recorded():
    battery = rf.run_battery(make_mask("haar"), level=6, tolerance=1e-7)
    assert battery.level == 6
    assert battery.tolerance == 1e-7
