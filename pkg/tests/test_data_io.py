"""Scenario file formats and the synthetic correlated generator."""

import numpy as np
import pytest

from drjcc import ScenarioSet, SynthSpec, load_scenarios, save_scenarios, synth_scenarios
from drjcc.data_io import ScenarioFormatError


class TestCsv:
    def test_t1_parse(self, tmp_path, t1):
        p = tmp_path / "scen.csv"
        p.write_text("0.0\n0.1\n0.2\n0.3\n")
        scen = load_scenarios(p)
        assert scen.n == 4 and scen.dim == 1
        np.testing.assert_array_equal(scen.samples, t1.scen.samples)

    def test_ragged_names_row(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("1.0,2.0\n3.0\n")
        with pytest.raises(ScenarioFormatError, match="row 2"):
            load_scenarios(p)

    def test_non_numeric_names_row(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("1.0,2.0\n3.0,oops\n")
        with pytest.raises(ScenarioFormatError, match="row 2"):
            load_scenarios(p)

    def test_empty_file(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text("")
        with pytest.raises(ScenarioFormatError, match="empty"):
            load_scenarios(p)

    def test_header_line_tolerated(self, tmp_path):
        p = tmp_path / "hdr.csv"
        p.write_text("wind_a,wind_b\n1.0,2.0\n3.0,4.0\n")
        scen = load_scenarios(p)
        assert scen.n == 2 and scen.dim == 2

    def test_round_trip_bitwise(self, tmp_path):
        rng = np.random.default_rng(8)
        scen = ScenarioSet(rng.normal(size=(7, 3)))
        p = tmp_path / "rt.csv"
        save_scenarios(scen, p)
        back = load_scenarios(p)
        np.testing.assert_array_equal(back.samples, scen.samples)


class TestJson:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(9)
        scen = ScenarioSet(rng.normal(size=(5, 2)))
        p = tmp_path / "rt.json"
        save_scenarios(scen, p)
        back = load_scenarios(p)
        np.testing.assert_array_equal(back.samples, scen.samples)

    def test_header_consistency_enforced(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"k": 3, "n": 1, "rows": [[1.0, 2.0]]}')
        with pytest.raises(ScenarioFormatError):
            load_scenarios(p)

    def test_no_rows(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"k": 1, "n": 0, "rows": []}')
        with pytest.raises(ScenarioFormatError):
            load_scenarios(p)


class TestSynth:
    def test_determinism(self):
        spec = SynthSpec(k=4, n=50, seed=123, rho=0.3)
        a = synth_scenarios(spec)
        b = synth_scenarios(spec)
        np.testing.assert_array_equal(a.samples, b.samples)

    def test_seed_changes_output(self):
        a = synth_scenarios(SynthSpec(k=4, n=50, seed=1))
        b = synth_scenarios(SynthSpec(k=4, n=50, seed=2))
        assert not np.array_equal(a.samples, b.samples)

    def test_standard_normal_column_means(self):
        scen = synth_scenarios(SynthSpec(k=2, n=1000, marginal=("normal", 0.0, 1.0), seed=7))
        assert np.all(np.abs(scen.samples.mean(axis=0)) < 0.15)

    def test_lag1_correlation_zero(self):
        scen = synth_scenarios(SynthSpec(k=6, n=1000, rho=0.0, seed=11))
        s = scen.samples
        r = np.corrcoef(s[:, :-1].ravel(), s[:, 1:].ravel())[0, 1]
        assert abs(r) < 0.1

    def test_lag1_correlation_high(self):
        scen = synth_scenarios(SynthSpec(k=6, n=1000, rho=0.9, seed=12))
        s = scen.samples
        r = np.corrcoef(s[:, :-1].ravel(), s[:, 1:].ravel())[0, 1]
        assert 0.8 <= r < 1.0

    def test_uniform_marginal_lag1(self):
        scen = synth_scenarios(
            SynthSpec(k=6, n=1000, marginal=("uniform", -1.0, 1.0), rho=0.7, seed=13)
        )
        s = scen.samples
        assert s.min() >= -1.0 and s.max() <= 1.0
        r = np.corrcoef(s[:, :-1].ravel(), s[:, 1:].ravel())[0, 1]
        assert abs(r - 0.7) < 0.1

    def test_truncation_exact(self):
        spec = SynthSpec(k=3, n=500, marginal=("normal", 0.0, 2.0), bounds=(-1.5, 1.5), seed=3)
        scen = synth_scenarios(spec)
        assert scen.samples.min() >= -1.5
        assert scen.samples.max() <= 1.5

    def test_invalid_specs(self):
        with pytest.raises(ValueError):
            SynthSpec(k=0, n=5)
        with pytest.raises(ValueError):
            SynthSpec(k=1, n=5, rho=1.0)
        with pytest.raises(ValueError):
            SynthSpec(k=1, n=5, marginal=("normal", 0.0, -1.0))
        with pytest.raises(ValueError):
            SynthSpec(k=1, n=5, marginal=("uniform", 2.0, 1.0))
