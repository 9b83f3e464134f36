"""Experiment-level orchestration: designs, batch simulation, analysis.

A design pins everything needed to regenerate its circuits bit-for-bit:
sampling parameters, depths, circuit counts, shots and the master seed.
Simulation seeds derive per circuit from the master seed, so results are
identical for any worker count and any execution order.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .analysis import DecayDataset, ErmDatum, FitResult, bootstrap_decay, erm_counts
from .builder import QirbCircuit, build_qirb_circuit
from .sampler import SamplingConfig, sample_core_circuit
from .seeding import derive_rng, derive_seed
from .simulator import NoiseModel, SimResult, simulate_result

__all__ = [
    "DEFAULT_DEPTHS",
    "ExperimentDesign",
    "CircuitResult",
    "build_design_circuits",
    "simulate_design",
    "decay_dataset_from_results",
    "analyze_decay",
    "erm_data_from_results",
]

DEFAULT_DEPTHS = (0, 1, 4, 32, 128)


@dataclass(frozen=True)
class ExperimentDesign:
    """One benchmark experiment: a sampling config plus acquisition sizes."""

    n: int
    p_cnot: float
    p_mcm: float
    depths: tuple[int, ...] = DEFAULT_DEPTHS
    circuits_per_depth: int = 15
    shots: int = 100
    connectivity: tuple[tuple[int, int], ...] | None = None
    reset: bool = True
    mode: str = "at-most-one"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.circuits_per_depth < 1 or self.shots < 1:
            raise ValueError("circuits per depth and shots must be >= 1")
        if list(self.depths) != sorted(set(self.depths)) or any(d < 0 for d in self.depths):
            raise ValueError("depths must be sorted, unique and non-negative")
        # Validate the sampler parameters eagerly.
        self.sampling_config()

    def sampling_config(self) -> SamplingConfig:
        return SamplingConfig(
            n=self.n,
            p_cnot=self.p_cnot,
            p_mcm=self.p_mcm,
            connectivity=self.connectivity,
            reset=self.reset,
            mode=self.mode,
        )

    def with_seed(self, seed: int) -> "ExperimentDesign":
        return replace(self, seed=seed)

    def to_obj(self) -> dict:
        return {
            "n": self.n,
            "p_cnot": self.p_cnot,
            "p_mcm": self.p_mcm,
            "depths": list(self.depths),
            "circuits_per_depth": self.circuits_per_depth,
            "shots": self.shots,
            "connectivity": None if self.connectivity is None else [list(e) for e in self.connectivity],
            "reset": self.reset,
            "mode": self.mode,
            "seed": self.seed,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "ExperimentDesign":
        conn = obj["connectivity"]
        return cls(
            n=obj["n"],
            p_cnot=obj["p_cnot"],
            p_mcm=obj["p_mcm"],
            depths=tuple(obj["depths"]),
            circuits_per_depth=obj["circuits_per_depth"],
            shots=obj["shots"],
            connectivity=None if conn is None else tuple(tuple(e) for e in conn),
            reset=obj["reset"],
            mode=obj["mode"],
            seed=obj["seed"],
        )


def build_design_circuits(design: ExperimentDesign) -> list[tuple[int, int, QirbCircuit]]:
    """All (circuit id, depth, circuit) triples of a design, in file order."""
    config = design.sampling_config()
    out = []
    cid = 0
    for depth in design.depths:
        for j in range(design.circuits_per_depth):
            rng = derive_rng(design.seed, "circuit", depth, j)
            core = sample_core_circuit(config, depth, rng)
            circuit = build_qirb_circuit(core, design.reset, rng, n=design.n)
            out.append((cid, depth, circuit))
            cid += 1
    return out


@dataclass(frozen=True)
class CircuitResult:
    circuit_id: int
    depth: int
    circuit: QirbCircuit
    result: SimResult


def _simulate_one(args) -> tuple[int, SimResult]:
    cid, circuit, noise, shots, seed, mode, with_counts = args
    res = simulate_result(circuit, noise, shots, seed, reset_free_mode=mode,
                          with_counts=with_counts)
    return cid, res


def simulate_design(
    circuits: list[tuple[int, int, QirbCircuit]],
    noise: NoiseModel,
    design: ExperimentDesign,
    seed: int | None = None,
    reset_free_mode: str = "frame-correction",
    threads: int = 1,
    with_counts: bool = True,
) -> list[CircuitResult]:
    """Simulate every circuit; output is independent of ``threads``."""
    master = design.seed if seed is None else seed
    jobs = [
        (cid, circ, noise, design.shots, derive_seed(master, "sim", cid), reset_free_mode, with_counts)
        for cid, _, circ in circuits
    ]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            got = dict(pool.map(_simulate_one, jobs, chunksize=max(1, len(jobs) // (4 * threads))))
    else:
        got = dict(map(_simulate_one, jobs))
    return [
        CircuitResult(cid, depth, circ, got[cid]) for cid, depth, circ in circuits
    ]


def decay_dataset_from_results(results: list[CircuitResult]) -> DecayDataset:
    data = DecayDataset()
    for r in results:
        data.add(r.depth, r.result.n_success, r.result.shots)
    return data


def analyze_decay(results: list[CircuitResult], bootstrap: int = 100, seed: int = 0) -> FitResult:
    data = decay_dataset_from_results(results)
    return bootstrap_decay(data, bootstrap, seed)


def erm_data_from_results(results_by_config: list[list[CircuitResult]]) -> list[ErmDatum]:
    """Flatten multi-config results into ERM fitting records."""
    out = []
    for config_id, results in enumerate(results_by_config):
        for r in results:
            k1, k2, km = erm_counts(r.circuit)
            out.append(
                ErmDatum(k1, k2, km, r.depth, config_id, r.result.n_success, r.result.shots)
            )
    return out
