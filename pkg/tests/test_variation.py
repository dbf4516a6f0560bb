import json

import numpy as np
import pytest

from fexor.variation import COMBOS, McConfig, run_mc, sense_margin


class TestConfig:
    @pytest.mark.parametrize("kw", [{"n_samples": 0}, {"sigma_vth": -0.01}, {"seed": -1}])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            McConfig(**kw)

    def test_mlc_rejected(self, mlc):
        with pytest.raises(ValueError):
            run_mc(McConfig(n_samples=2), mlc)


class TestZeroSigma:
    def test_four_point_distributions(self, slc):
        rep = run_mc(McConfig(n_samples=50, sigma_vth=0.0), slc)
        expected = {(1, 1): 0.0, (0, 1): 0.49, (1, 0): 0.5, (0, 0): 0.01}
        for combo, v in expected.items():
            assert rep.v_sl_samples[combo] == pytest.approx(np.full(50, v))
        assert rep.worst_case_margin == pytest.approx(0.48)


class TestSampling:
    def test_vth_moments(self, slc):
        rep = run_mc(McConfig(n_samples=4000, sigma_vth=0.04, seed=3), slc)
        for ct, nominal in ((0, 0.4), (1, 1.75)):
            v = rep.vth_samples[ct]
            assert abs(v.mean() - nominal) < 3 * 0.04 / np.sqrt(v.size)
            assert v.std() == pytest.approx(0.04, rel=0.1)

    def test_seed_changes_samples(self, slc):
        a = run_mc(McConfig(n_samples=10, seed=1), slc)
        b = run_mc(McConfig(n_samples=10, seed=2), slc)
        assert not np.array_equal(a.vth_samples[0], b.vth_samples[0])

    def test_prefix_stable(self, slc):
        # sample i depends only on (seed, i)
        short = run_mc(McConfig(n_samples=10, seed=5), slc)
        long = run_mc(McConfig(n_samples=30, seed=5), slc)
        assert np.array_equal(short.vth_samples[1], long.vth_samples[1][:10])

    def test_json_deterministic(self, slc):
        cfg = McConfig(n_samples=100, seed=9)
        assert run_mc(cfg, slc).to_json() == run_mc(cfg, slc).to_json()

    def test_parallel_matches_serial(self, slc):
        cfg = McConfig(n_samples=101, seed=4)
        assert run_mc(cfg, slc, workers=3).to_json() == run_mc(cfg, slc).to_json()


class TestMargin:
    def test_populations_separate(self, slc):
        rep = run_mc(McConfig(), slc)
        pt0 = np.concatenate([rep.v_sl_samples[c] for c in COMBOS if c[0] ^ c[1] == 0])
        pt1 = np.concatenate([rep.v_sl_samples[c] for c in COMBOS if c[0] ^ c[1] == 1])
        assert pt0.max() < pt1.min()
        assert sense_margin(rep) == rep.worst_case_margin >= 0.2

    def test_margin_collapses_when_read_misses_window(self, slc):
        # V_R above every HVT sample: every cell conducts, PT=1 from CT1/Key0 drops to 0.01
        rep = run_mc(McConfig(n_samples=200, v_read=2.5), slc)
        assert rep.worst_case_margin < 0

    def test_histogram_counts(self, slc):
        rep = run_mc(McConfig(n_samples=200), slc)
        d = json.loads(rep.to_json())
        for name, counts in d["histogram"]["counts"].items():
            assert sum(counts) == 200, name
        assert len(d["histogram"]["bin_edges"]) == 61

    def test_csv_shapes(self, slc):
        rep = run_mc(McConfig(n_samples=5), slc)
        assert len(rep.vth_csv().splitlines()) == 6
        assert rep.sl_csv().splitlines()[0] == "sample,CT1_Key1,CT0_Key1,CT1_Key0,CT0_Key0"
