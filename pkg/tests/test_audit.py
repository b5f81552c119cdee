import pytest

from paramech.audit import (
    STATUS_DISCREPANCY,
    STATUS_FAIL,
    STATUS_PASS,
    verify_all,
)


def test_report_covers_the_identity_list():
    report = verify_all(2)
    assert len(report.records) >= 20
    names = [r.name for r in report.records]
    assert any("F^2" in n for n in names)
    assert any("F*" in n for n in names)
    assert any("metric compatibility" in n for n in names)
    assert any("Liouville route" in n for n in names)
    assert any("Euler-Lagrange" in n for n in names)


def test_no_failures_and_one_documented_discrepancy():
    report = verify_all(2)
    assert report.n_fail == 0
    assert report.n_discrepancy == 1
    flagged = [r for r in report.records if r.status == STATUS_DISCREPANCY]
    assert len(flagged) == 1
    assert "F" in flagged[0].name
    assert flagged[0].max_abs_error >= 0.1


def test_rerun_is_bit_identical():
    assert verify_all(1).render() == verify_all(1).render()


def test_exact_records_render_exact():
    report = verify_all(1)
    exact = [r for r in report.records if r.max_abs_error is None]
    assert exact
    assert all(r.error_text == "exact" for r in exact)
    assert all(r.status in (STATUS_PASS, STATUS_FAIL, STATUS_DISCREPANCY) for r in report.records)


def test_n_max_validation():
    with pytest.raises(ValueError):
        verify_all(0)
