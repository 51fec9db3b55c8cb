import math

import pytest

import hofer


def test_config_keys():
    keys = hofer.config_keys()
    assert "seed" in keys and "suite" in keys


def test_unknown_key_rejected(tmp_path):
    with pytest.raises(ValueError):
        hofer.verify(colour="red", out=str(tmp_path))


def test_extremal_closed_forms():
    for k in (1, 2):
        e = hofer.extremal_energies(k)
        assert e["multiplicity"] == k
        assert e["e_symp"] == pytest.approx(k * math.pi, rel=1e-5)
        assert abs(e["e_omega"]) < 1e-8
        assert e["e_lambda"] == pytest.approx(2 * math.pi * k, rel=1e-5)
        assert e["period"] == pytest.approx(2 * math.pi * k, rel=1e-5)


def test_decay_rates():
    assert hofer.decay_rate("standard")["exactly_cylindrical"]
    assert hofer.decay_rate("quadratic")["delta"] == pytest.approx(1.0, abs=0.1)
    assert hofer.decay_rate("cubic")["delta"] == pytest.approx(2.0, abs=0.2)


def test_monotonicity_suite(tmp_path):
    code, report = hofer.verify(suite="monotonicity", families=["extremal"], kmax=3, out=str(tmp_path))
    assert code == 0
    assert report["schema_version"] == 1
    assert report["status"] == "pass"
    lines = (tmp_path / "monotonicity.csv").read_text().splitlines()
    assert len(lines) == 4
    for line in lines[1:]:
        assert float(line.split(",")[-1]) == pytest.approx(math.pi, abs=1e-6)


def test_empty_catalog(tmp_path):
    code, report = hofer.verify(suite="energy", families="none", out=str(tmp_path))
    assert code == 0
    assert report["status"] == "no checks run"
