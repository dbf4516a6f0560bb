import numpy as np
import pytest

from fexor import array as fa
from fexor.array import ArrayGeometry, BiasVector, FeArray, ModeError
from fexor.cipher import SenseThresholds, decrypt_array
from fexor.device import InvalidSymbolError


def readback(arr):
    """Stored levels recovered through the read path (all-zero key gives PT = CT)."""
    th = SenseThresholds.simulation(arr.profile.v_dd)
    out, _ = decrypt_array(arr, np.zeros(arr.geometry.shape, dtype=int), th)
    return out


class TestConstruction:
    def test_default_is_hvt(self, slc0):
        arr = fa.new_array(3, 4, slc0)
        assert arr.levels.shape == (3, 4)
        assert (arr.levels == 1).all() and (arr.vth == 1.75).all()

    def test_immutable(self, slc0):
        arr = fa.new_array(2, 2, slc0)
        with pytest.raises(ValueError):
            arr.levels[0, 0] = 0

    def test_bad_geometry(self):
        with pytest.raises(ValueError):
            ArrayGeometry(0, 3)

    def test_bad_symbol(self, slc0):
        with pytest.raises(InvalidSymbolError):
            fa.new_array(2, 2, slc0, levels=[[0, 2], [1, 1]])

    def test_bias_shape_checked(self, slc0):
        arr = fa.new_array(2, 3, slc0)
        bias = BiasVector(np.zeros(2), np.zeros(2), np.zeros(2))
        with pytest.raises(ValueError):
            fa.read_cycle(arr, 0, bias, 1.1)


class TestWrite:
    def test_reset_erases_everything(self, slc0):
        arr = fa.new_array(4, 4, slc0, levels=np.eye(4, dtype=int))
        out = fa.reset_all(arr)
        assert (out.levels == 1).all()
        assert (arr.levels == np.eye(4)).all()  # input untouched

    def test_program_row(self, slc0):
        arr = fa.new_array(3, 4, slc0)
        out = fa.program_row_slc(arr, 1, [0, 1, 0, 1])
        assert out.levels.tolist() == [[1, 1, 1, 1], [0, 1, 0, 1], [1, 1, 1, 1]]

    def test_program_without_reset_keeps_stale_lvt(self, slc0):
        # the set step only inhibits; erasing is the reset step's job
        arr = fa.new_array(1, 2, slc0, levels=[[0, 0]])
        out = fa.program_row_slc(arr, 0, [1, 1])
        assert out.levels.tolist() == [[0, 0]]

    def test_program_matrix(self, slc0):
        ct = np.array([[0, 1, 1], [1, 0, 0]])
        arr = fa.program_matrix_slc(fa.new_array(2, 3, slc0, levels=[[0, 0, 0], [0, 0, 0]]), ct)
        assert np.array_equal(arr.levels, ct)

    def test_program_row_rejects_mlc(self, mlc0):
        with pytest.raises(ModeError):
            fa.program_row_slc(fa.new_array(2, 2, mlc0), 0, [0, 1])

    def test_program_row_bad_row(self, slc0):
        with pytest.raises(IndexError):
            fa.program_row_slc(fa.new_array(2, 2, slc0), 2, [0, 1])

    def test_program_bias_values(self, slc0):
        bias = fa.program_bias(ArrayGeometry(3, 2), slc0, 1, [1, 0])
        assert bias.wl.tolist() == [1.2, 3.6, 1.2]
        assert bias.bl.tolist() == [2.4, 0.0]
        assert np.array_equal(bias.bl, bias.sl_precharge)

    def test_write_locality(self, slc):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            rows, cols = rng.integers(2, 6, size=2)
            arr = fa.new_array(rows, cols, slc, levels=rng.integers(0, 2, (rows, cols)), rng=rng)
            row = int(rng.integers(rows))
            bits = rng.integers(0, 2, cols)
            out = fa.program_row_slc(arr, row, bits, rng)
            others = np.arange(rows) != row
            assert np.array_equal(out.levels[others], arr.levels[others])
            assert np.array_equal(out.vth[others], arr.vth[others])
            assert np.array_equal(out.levels[row, bits == 1], arr.levels[row, bits == 1])
            assert (out.levels[row, bits == 0] == 0).all()

    def test_mlc_program_levels(self, mlc0):
        lv = np.arange(8).reshape(2, 4) % 4
        arr = fa.program_levels(fa.new_array(2, 4, mlc0), lv)
        assert np.array_equal(arr.levels, lv)
        assert arr.vth[0].tolist() == [0.4, 1.45, 2.15, 2.85]


class TestRoundTrip:
    @pytest.mark.parametrize("seed", range(5))
    def test_slc(self, slc, seed):
        rng = np.random.default_rng(seed)
        ct = rng.integers(0, 2, (6, 5))
        arr = fa.program_matrix_slc(fa.new_array(6, 5, slc, rng=rng), ct, rng)
        assert np.array_equal(readback(arr), ct)

    @pytest.mark.parametrize("seed", range(5))
    def test_mlc(self, mlc, seed):
        rng = np.random.default_rng(seed)
        lv = rng.integers(0, 4, (6, 5))
        arr = fa.program_levels(fa.new_array(6, 5, mlc, rng=rng), lv, rng)
        assert np.array_equal(readback(arr), lv)

    def test_wide_variation_produces_errors(self, mlc):
        # sigma of 0.5 V is far wider than the 0.35 V half-gap between MLC levels
        rng = np.random.default_rng(1)
        lv = rng.integers(0, 4, (8, 8))
        arr = fa.program_levels(fa.new_array(8, 8, mlc.with_(sigma_vth=0.5)), lv, rng)
        th = SenseThresholds.simulation(mlc.v_dd)
        got, _ = decrypt_array(arr, np.zeros_like(lv), th, strict=False)
        assert (got != lv).sum() >= 1


class TestDisturb:
    def test_program_is_disturb_free(self, slc0):
        arr = fa.new_array(4, 4, slc0)
        for row in range(4):
            bias = fa.program_bias(arr.geometry, slc0, row, [0, 1, 0, 1])
            assert fa.disturb_audit(arr, bias, selected=row) == []

    def test_read_is_disturb_free(self, slc0):
        arr = fa.new_array(4, 3, slc0)
        bias = fa.read_bias(arr.geometry, slc0, 2, 1.1, [0.5, 0, 0.5], [0, 0.5, 0])
        assert fa.disturb_audit(arr, bias, selected=2) == []

    def test_reset_flags_everything_unless_selected(self, slc0):
        arr = fa.new_array(2, 3, slc0)
        bias = fa.reset_bias(arr.geometry, slc0)
        hits = fa.disturb_audit(arr, bias)
        assert len(hits) == 6 and hits[0][2] == pytest.approx(3.2)
        assert fa.disturb_audit(arr, bias, selected=range(2)) == []

    def test_half_select_violation_reported(self, slc0):
        arr = fa.new_array(2, 2, slc0)
        bad = BiasVector([3.6, 3.6], [0.0, 2.4], [0.0, 2.4])
        assert fa.disturb_audit(arr, bad, selected=0) == [(1, 0, 3.6)]


class TestRead:
    def test_read_is_pure(self, slc):
        rng = np.random.default_rng(0)
        arr = fa.program_matrix_slc(fa.new_array(3, 3, slc, rng=rng), np.eye(3, dtype=int), rng)
        before = (arr.levels.copy(), arr.vth.copy())
        bias = fa.read_bias(arr.geometry, slc, 0, 1.1, np.full(3, 0.5), np.zeros(3))
        for _ in range(3):
            fa.read_cycle(arr, 0, bias, 1.1)
        assert np.array_equal(arr.levels, before[0]) and np.array_equal(arr.vth, before[1])

    def test_sl_values(self, slc0):
        arr = fa.new_array(2, 2, slc0, levels=[[0, 1], [1, 0]])
        bias = fa.read_bias(arr.geometry, slc0, 0, 1.1, [0.5, 0.5], [0.0, 0.0])
        assert fa.read_cycle(arr, 0, bias, 1.1) == pytest.approx([0.49, 0.0])


class TestDump:
    def test_csv_round_trip(self, mlc, tmp_path):
        rng = np.random.default_rng(4)
        arr = fa.new_array(3, 5, mlc, levels=rng.integers(0, 4, (3, 5)), rng=rng)
        text = fa.dumps_csv(arr)
        assert text.startswith("# rows=3,cols=5,mode=MLC\n")
        assert fa.loads_csv(text, mlc).same_state(arr)
        fa.save(arr, tmp_path / "a.csv")
        assert fa.load(tmp_path / "a.csv", mlc).same_state(arr)

    def test_json_round_trip(self, slc, tmp_path):
        arr = fa.new_array(2, 2, slc, rng=np.random.default_rng(5))
        fa.save(arr, tmp_path / "a.json")
        back = fa.load(tmp_path / "a.json")
        assert back.same_state(arr) and back.profile == slc

    def test_mode_mismatch(self, slc, mlc):
        with pytest.raises(ModeError):
            fa.loads_csv(fa.dumps_csv(fa.new_array(1, 1, slc)), mlc)

    def test_truncated_dump(self, slc):
        text = fa.dumps_csv(fa.new_array(2, 2, slc)).rsplit("\n", 2)[0]
        with pytest.raises(ValueError):
            fa.loads_csv(text, slc)
