"""Acceptance gate: every criterion at its pinned tolerance.

Each test runs one registered criterion and prints its pass/fail line, so
``pytest -s tests/test_acceptance.py`` doubles as the human-readable
acceptance report.  Tolerances live as constants next to the criterion
implementations and are asserted here to stay at their contract values.
"""

import pytest

from jspec import verification as V


@pytest.mark.parametrize("cid,title", [(num, title) for num, title, _ in V.CRITERIA])
def test_criterion(cid, title, capsys):
    result = V.run_criterion(cid)
    with capsys.disabled():
        print(f"\n{result.line()}", end="")
    assert result.passed, result.line()


def test_all_fifteen_registered():
    assert [num for num, _, _ in V.CRITERIA] == list(range(1, 16))


def test_tolerances_pinned():
    # the contract values; failing here means a silent goalpost move
    assert V.TOL_TRACE_REL == 1e-12
    assert V.TOL_COMPLETENESS == 1e-8
    assert V.TOL_MODE_AGREE == 1e-10
    assert V.TOL_P2_COEFF == 1e-12
    assert V.TOL_ZERO_REL == 1e-12
    assert V.TOL_ORTHO == 1e-6
    assert V.TOL_MASS_SUM == 1e-8
    assert V.TOL_MASS_ROUTES == 1e-6
    assert V.TOL_WRONSKIAN == 1e-9
    assert V.TOL_EIGRES == 1e-8
    assert V.TOL_NORM_ID == 1e-8
    assert V.TOL_WEYL == 1e-8
    assert V.TOL_WEYL_ASYMP == 0.02
    assert V.TOL_CHAR_EQ == 1e-9
    assert V.TOL_IDENTITY_SLACK == 1e-10
    assert V.TOL_QLAG_COEFF == 1e-12
    assert V.TOL_QLAG_F == 1e-10
    assert V.TOL_QLAG_W == 1e-9
    assert V.TOL_QLAG_REL42 == 1e-9
    assert V.TOL_QLAG_LADDER == 1e-12
    assert V.TOL_ROOTS == 1e-6
    assert V.TOL_ASSOC_TRACE == 1e-8
    assert V.TOL_ASSOC_ZEROS == 1e-6
    assert V.TOL_ORACLE == 1e-14
