import math

import numpy as np
import pytest

from qblockmatch import experiments as ex
from qblockmatch.errors import ArgumentError
from qblockmatch.imaging import GrayImage, classical_euclidean_distance


class TestPairSet:
    def test_size_and_range(self):
        pairs = ex.default_pair_set()
        assert len(pairs) == 17
        assert pairs.ced[0] == 0 and pairs.ced[1] == 1
        assert max(pairs.ced) >= 25

    def test_fixed_pairs(self):
        pairs = ex.default_pair_set()
        assert pairs.pairs[0] == (ex.BASE_BLOCK, ex.BASE_BLOCK)
        assert pairs.pairs[1] == (ex.BASE_BLOCK, ex.NEAR_BLOCK)

    def test_four_bit_values(self):
        for (a, b), ced in ex.default_pair_set(seed=3):
            assert all(0 <= v <= 15 for v in a + b)
            assert any(a) and any(b)
            assert ced == classical_euclidean_distance(a, b)

    def test_sorted_after_fixed(self):
        ced = ex.default_pair_set(seed=1).ced
        assert list(ced[2:]) == sorted(ced[2:])

    def test_seeded(self):
        assert ex.default_pair_set(5).pairs == ex.default_pair_set(5).pairs


class TestConfig:
    def test_defaults(self):
        cfg = ex.ExperimentConfig()
        assert (cfg.shots, cfg.runs, cfg.search_k, cfg.block_n) == (4000, 20, 10, 8)
        assert cfg.fidelity_2q == 0.99 and cfg.fidelity_1q == 0.9999

    @pytest.mark.parametrize("change", [{"mode": "other"}, {"shots": 0}, {"fidelity_2q": 1.5},
                                        {"method": "tss"}, {"distance": "manhattan"}])
    def test_rejects(self, change):
        with pytest.raises(ArgumentError):
            ex.ExperimentConfig(**change)


class TestCSV:
    def test_version_line_and_header(self):
        text = ex.format_csv("qft-sweep", ex.SWEEP_COLUMNS,
                             [{"fidelity": 1.0, "success_probability": 0.5, "cnot_count": 64}])
        lines = text.splitlines()
        assert lines[0] == "# qblockmatch qft-sweep csv v1"
        assert lines[1] == "fidelity,success_probability,cnot_count"
        assert lines[2] == "1,0.5,64"

    def test_missing_value_is_empty(self):
        text = ex.format_csv("x", ("a", "b"), [{"a": 1, "b": None}])
        assert text.splitlines()[-1] == "1,"


class TestSwapExperiment:
    def test_rows(self):
        cfg = ex.ExperimentConfig(shots=200, runs=3)
        rows = ex.run_swap_experiment(cfg)
        assert [r["pair_index"] for r in rows] == list(range(17))
        assert set(rows[0]) == set(ex.SWAP_COLUMNS)
        assert rows[0]["fidelity_2q"] == 1.0

    def test_noisy_rows_record_fidelity(self):
        cfg = ex.ExperimentConfig(mode="swap_noisy", shots=100, runs=2)
        pairs = ex.PairSet(ex.default_pair_set().pairs[:2], ex.default_pair_set().ced[:2])
        rows = ex.run_swap_experiment(cfg, pairs)
        assert rows[0]["fidelity_2q"] == 0.99 and rows[0]["fidelity_1q"] == 0.9999

    def test_noise_inflates_zero_distance(self):
        pairs = ex.PairSet(((ex.BASE_BLOCK, ex.BASE_BLOCK),), (0.0,))
        clean = ex.run_swap_experiment(ex.ExperimentConfig(), pairs)[0]
        noisy = ex.run_swap_experiment(ex.ExperimentConfig(mode="swap_noisy"), pairs)[0]
        assert noisy["p0_mean"] > 0.5
        assert noisy["qed_mean"] > clean["qed_mean"]


class TestSweep:
    def test_small_sweep(self):
        rows = ex.run_qft_sweep(ex.ExperimentConfig(mode="qft_sweep", shots=500),
                                (1.0, 0.99))
        assert rows[0]["success_probability"] == 1.0
        assert rows[1]["success_probability"] < 1.0
        assert rows[0]["cnot_count"] == rows[1]["cnot_count"]


class TestGateReport:
    def test_swap(self):
        rep = ex.gate_report("swap", dim=4)
        assert rep.total_qubits == 5

    def test_swap_larger_dim(self):
        assert ex.gate_report("swap", dim=16).total_qubits == 7

    def test_qft(self):
        rep = ex.gate_report("qft_subtract", bits=4)
        assert rep.total_qubits == 12
        assert rep.cnot_count == 64

    def test_unknown(self):
        with pytest.raises(ArgumentError):
            ex.gate_report("grover")

    def test_bad_dim(self):
        with pytest.raises(ArgumentError):
            ex.gate_report("swap", dim=3)


class TestDistanceBackends:
    @pytest.mark.parametrize("backend", ["classical", "swap", "qft"])
    def test_self_distance_zero(self, backend):
        dist = ex.make_distance(ex.ExperimentConfig(distance=backend, shots=500, runs=3))
        v = np.array([3, 7, 1, 12])
        assert dist(v, v) == pytest.approx(0.0, abs=0.1 * math.sqrt(2 * 2 * v @ v))

    def test_qft_exact_noiseless(self):
        dist = ex.make_distance(ex.ExperimentConfig(distance="qft", shots=50))
        assert dist([15, 0, 3, 3], [0, 15, 3, 4]) == pytest.approx(math.sqrt(451))

    def test_swap_zero_block_falls_back(self):
        dist = ex.make_distance(ex.ExperimentConfig(distance="swap"))
        assert dist([0, 0, 0, 0], [3, 4, 0, 0]) == 5.0


class TestMatch:
    def test_planted_shift(self):
        rng = np.random.default_rng(0)
        base = rng.integers(0, 256, size=(64, 64))
        ref = GrayImage(base, 8)
        tgt = GrayImage(np.roll(base, (-1, 2), axis=(0, 1)), 8)
        cfg = ex.ExperimentConfig(mode="block_match", sigma=0, factor=1)
        row = ex.match_images(ref, tgt, cfg)
        assert (row["offset_x"], row["offset_y"]) == (2, -1)
        assert row["wall_time"] is None

    def test_timing_opt_in(self):
        img = GrayImage(np.zeros((32, 32), dtype=int), 8)
        cfg = ex.ExperimentConfig(mode="block_match", sigma=0, factor=1, search_k=1, timing=True)
        assert ex.match_images(img, img, cfg)["wall_time"] >= 0
