"""Seeded batch experiments producing plot-ready CSV tables."""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, fields, replace
from typing import Iterable, Sequence

import numpy as np

from .encoding import build_pair_encoding
from .errors import ArgumentError
from .imaging import (
    BlockRef,
    GrayImage,
    classical_euclidean_distance,
    full_search,
    hierarchical_search,
    load_pgm,
    preprocess,
)
from .noise import NoiseModel
from .qft import build_subtractor, run_subtraction, ssd_distance
from .sim import GateReport, gate_counts
from .swap import build_swap_test_circuit, estimate_distance, run_seeds, swap_test_width

CSV_VERSION = 1
BASE_BLOCK = (9, 9, 9, 9)
NEAR_BLOCK = (9, 9, 8, 9)
SWEEP_FIDELITIES = (1.0, 0.999, 0.995, 0.99, 0.98)

SWAP_COLUMNS = ("pair_index", "ced", "qed_mean", "qed_std", "p0_mean", "shots", "runs",
                "fidelity_1q", "fidelity_2q", "seed")
SWEEP_COLUMNS = ("fidelity", "success_probability", "cnot_count")
MATCH_COLUMNS = ("offset_x", "offset_y", "distance", "evaluations", "wall_time")
GATE_COLUMNS = ("circuit", "total_qubits", "cnot_count", "single_qubit_count", "depth")

MODES = ("swap_noiseless", "swap_noisy", "qft_sweep", "block_match")


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str = "swap_noiseless"
    shots: int = 4000
    runs: int = 20
    fidelity_2q: float = 0.99
    fidelity_1q: float = 0.9999
    seed: int = 0
    out: str | None = None
    sigma: float = 20.0
    search_k: int = 10
    block_n: int = 8
    block_x: int | None = None
    block_y: int | None = None
    factor: int = 8
    smooth: bool = False
    method: str = "full"
    distance: str = "classical"
    noisy: bool = False
    bits: int = 4
    dim: int = 4
    timing: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ArgumentError(f"unknown mode {self.mode!r}")
        if self.shots < 1 or self.runs < 1:
            raise ArgumentError("shots and runs must be >= 1")
        NoiseModel(self.fidelity_1q, self.fidelity_2q)
        if self.method not in ("full", "hier"):
            raise ArgumentError(f"method must be full or hier, got {self.method!r}")
        if self.distance not in ("classical", "swap", "qft"):
            raise ArgumentError(f"unknown distance {self.distance!r}")

    @property
    def noise(self) -> NoiseModel:
        return NoiseModel(self.fidelity_1q, self.fidelity_2q)

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def updated(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class PairSet:
    pairs: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    ced: tuple[float, ...]

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(zip(self.pairs, self.ced))


def _diverge(target: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Push two copies of the base block apart one grey level at a time."""
    a = np.array(BASE_BLOCK)
    b = np.array(BASE_BLOCK)
    while classical_euclidean_distance(a, b) < target:
        moves = [(0, i) for i in range(4) if a[i] < 15]
        moves += [(1, i) for i in range(4) if b[i] > 0 and b.sum() > 1]
        if not moves:
            break
        which, i = moves[rng.integers(len(moves))]
        if which == 0:
            a[i] += 1
        else:
            b[i] -= 1
    return a, b


def default_pair_set(seed: int = 0, size: int = 17) -> PairSet:
    """Seventeen 4-pixel 4-bit block pairs with CED from 0 up to about 29.

    The first two pairs are fixed: the base block against itself and against
    the one-level perturbation. The rest aim at evenly spaced distances and
    are ordered by CED.
    """
    rng = np.random.default_rng(seed)
    fixed = [(BASE_BLOCK, BASE_BLOCK), (BASE_BLOCK, NEAR_BLOCK)]
    grown = []
    for target in np.linspace(2.0, 29.0, size - len(fixed)):
        a, b = _diverge(float(target), rng)
        grown.append((tuple(int(v) for v in a), tuple(int(v) for v in b)))
    grown.sort(key=lambda p: classical_euclidean_distance(*p))
    pairs = tuple(fixed + grown)
    return PairSet(pairs, tuple(classical_euclidean_distance(a, b) for a, b in pairs))


# ---------------------------------------------------------------------------
# CSV


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".10g")
    return "" if value is None else str(value)


def format_csv(command: str, columns: Sequence[str], rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    buf.write(f"# qblockmatch {command} csv v{CSV_VERSION}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def write_csv(text: str, path) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc


# ---------------------------------------------------------------------------
# experiments


def run_swap_experiment(config: ExperimentConfig, pairs: PairSet | None = None) -> list[dict]:
    """One row per pair: mean/std swap-test distance over ``runs`` runs."""
    pairs = pairs or default_pair_set(config.seed)
    noisy = config.noisy or config.mode == "swap_noisy"
    noise = config.noise if noisy else None
    f1, f2 = (config.fidelity_1q, config.fidelity_2q) if noisy else (1.0, 1.0)
    rows = []
    for i, (((a, b), ced), sub) in enumerate(zip(pairs, run_seeds(config.seed, len(pairs)))):
        est = estimate_distance(a, b, config.shots, config.runs, noise, sub)
        rows.append({
            "pair_index": i,
            "ced": ced,
            "qed_mean": est.mean_distance,
            "qed_std": est.std_distance,
            "p0_mean": est.p0_mean,
            "shots": config.shots,
            "runs": config.runs,
            "fidelity_1q": f1,
            "fidelity_2q": f2,
            "seed": sub,
        })
    return rows


def run_qft_sweep(config: ExperimentConfig,
                  fidelities: Sequence[float] = SWEEP_FIDELITIES,
                  a: int = 9, b: int = 8) -> list[dict]:
    """Success rate of one subtraction versus CNOT fidelity.

    Only CNOTs are noisy here. Every fidelity reuses ``config.seed``, so the
    error draws are shared across rows and the curve is not jittered by
    independent sampling noise.
    """
    bits = config.bits
    circuit, _ = build_subtractor(bits)
    cx = gate_counts(circuit).cnot_count
    expected = format((a - b) % (1 << bits), f"0{bits}b")
    rows = []
    for f in fidelities:
        hist = run_subtraction(a, b, bits, NoiseModel(1.0, f), config.shots, config.seed)
        rows.append({
            "fidelity": float(f),
            "success_probability": hist.get(expected, 0) / config.shots,
            "cnot_count": cx,
        })
    return rows


def gate_report(circuit_name: str, dim: int = 4, bits: int = 4) -> GateReport:
    if circuit_name == "swap":
        if dim < 2 or dim & (dim - 1):
            raise ArgumentError(f"vector dimension must be a power of two >= 2, got {dim}")
        swap_test_width(dim)
        a = [9] * dim
        b = [9] * dim
        b[min(2, dim - 1)] = 8
        return gate_counts(build_swap_test_circuit(build_pair_encoding(a, b)))
    if circuit_name == "qft_subtract":
        return gate_counts(build_subtractor(bits)[0])
    raise ArgumentError(f"unknown circuit {circuit_name!r}; expected swap or qft_subtract")


def gate_report_rows(circuit_name: str, dim: int = 4, bits: int = 4) -> list[dict]:
    rep = gate_report(circuit_name, dim, bits)
    return [{
        "circuit": circuit_name,
        "total_qubits": rep.total_qubits,
        "cnot_count": rep.cnot_count,
        "single_qubit_count": rep.single_qubit_count,
        "depth": rep.depth,
    }]


def make_distance(config: ExperimentConfig):
    """Block distance for the configured backend.

    Quantum backends receive a fresh seed per call, derived from the master
    seed and the call index, so a search is reproducible as long as the
    candidates are visited in the same order.
    """
    if config.distance == "classical":
        return classical_euclidean_distance
    noise = config.noise if config.noisy else None
    calls = [0]

    def next_seed():
        calls[0] += 1
        return int(np.random.SeedSequence([config.seed, calls[0]]).generate_state(1)[0])

    if config.distance == "swap":
        def swap_distance(v1, v2):
            # an all-zero block has no amplitude encoding; its distance is the other norm
            if not np.any(v1) or not np.any(v2):
                return classical_euclidean_distance(v1, v2)
            return estimate_distance(v1, v2, config.shots, config.runs, noise,
                                     next_seed()).mean_distance
        return swap_distance

    def qft_distance(v1, v2):
        # 4-bit pixels differ by up to 15, which needs a 5-bit signed register
        return math.sqrt(ssd_distance(v1, v2, max(config.bits, 5), noise, config.shots,
                                      next_seed()))
    return qft_distance


def match_images(reference: GrayImage, target: GrayImage, config: ExperimentConfig) -> dict:
    """Preprocess both images, then search for the reference block in the target."""
    ref_seed, tgt_seed = run_seeds(config.seed, 2)
    ref_img = preprocess(reference, config.sigma, ref_seed, config.factor, config.smooth)
    tgt_img = preprocess(target, config.sigma, tgt_seed, config.factor, config.smooth)
    n = config.block_n
    bx = (ref_img.width - n) // 2 if config.block_x is None else config.block_x
    by = (ref_img.height - n) // 2 if config.block_y is None else config.block_y
    ref = BlockRef(ref_img, bx, by, n)
    search = full_search if config.method == "full" else hierarchical_search
    start = time.perf_counter()
    result = search(ref, tgt_img, config.search_k, make_distance(config))
    elapsed = time.perf_counter() - start
    return {
        "offset_x": result.offset_x,
        "offset_y": result.offset_y,
        "distance": result.distance,
        "evaluations": result.evaluations,
        "wall_time": elapsed if config.timing else None,
    }


def run_block_match(config: ExperimentConfig, reference_path, target_path) -> list[dict]:
    return [match_images(load_pgm(reference_path), load_pgm(target_path), config)]
