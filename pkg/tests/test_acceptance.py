"""Acceptance criteria at their stated tolerances and default oracle sizes.

Each test prints one pass/fail line. Criteria 1 and 2 are known to fail: the
midpoint grid oracle at N=2^20 has not converged to the stated tolerance for
heavy-tailed legs and Wang distortions (see README).
"""

import pytest

from riskdist import verify


@pytest.mark.parametrize("number", sorted(verify.CRITERIA))
def test_criterion(number, capsys):
    res = verify.CRITERIA[number]()
    with capsys.disabled():
        print("\n" + res.summary())
        for row in res.failures[:5]:
            print(f"    {row.label}: value {row.value:.12g}, reference {row.reference:.12g}, "
                  f"dev {row.deviation:.3g} > tol {row.tolerance:.3g}")
    if not res.passed:
        pytest.fail(res.summary(), pytrace=False)
