import pathlib

import pytest

import eqhms

DATA = pathlib.Path(__file__).resolve().parents[2] / "data"


def test_mirror_cp1_two_rows():
    rep = eqhms.mirror_report("cp1", "T", precision="3")
    assert len(rep["rows"]) == 2
    assert all(row["u"] == [1, 2] for row in rep["rows"])


def test_hypothesis_error():
    with pytest.raises(eqhms.HypothesisError):
        eqhms.mirror_report("cp1", "1")
    with pytest.raises(eqhms.InputError):
        eqhms.mirror_report("cp7", "T")


def test_novikov_literal():
    assert eqhms.parse_novikov("2T^{1/2}") == {"precision": None, "terms": [[1, 2, 2.0, 0.0]]}


@pytest.mark.parametrize("fan,expected", [("p1", 2), ("p2", 3), ("p1xp1", 4), ("f1", 4), ("c", 1), ("c2", 1), ("bl0c2", 2)])
def test_jacobian_counts(fan, expected):
    assert eqhms.jacobian_count(fan) == (expected, expected, True)


def test_cli_round_trip():
    code, report, _ = eqhms.cli("mf", "verify", "--input", DATA / "koszul_x2.json")
    assert code == 0 and report == {"ok": True}
    code, report, _ = eqhms.cli("check", "ainfty", "--input", DATA / "mirror_cp1.json")
    assert code == 0 and report["pass"]
    code, _, err = eqhms.cli("mirror", "--geometry", "cp1", "--lambda", "1")
    assert code == 2 and "Lagrangians collapse" in err
    code, _, _ = eqhms.cli("mirror", "--lambda", "T^{")
    assert code == 1
