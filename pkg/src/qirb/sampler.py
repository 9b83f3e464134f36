"""Sampling of core circuit layers from the user-specified distribution.

The default ("at-most-one") rule per layer: with probability ``p_mcm`` place
one MCM on a uniformly random wire; then with probability ``p_cnot`` place
one CNOT on a uniformly random connectivity edge whose endpoints are both
still free (if no such edge exists, no CNOT is placed); every remaining wire
receives an independent uniformly random single-qubit Clifford.

The optional "density" mode instead treats each wire independently: every
wire becomes an MCM with probability ``p_mcm``; eligible edges are then
visited in random order and each becomes a CNOT with probability ``p_cnot``
if both endpoints are still free; leftover wires get random single-qubit
Cliffords.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .pauli import CNOT_INDEX, NUM_ONEQ_CLIFFORDS, CircuitLayer, CliffordGate

__all__ = ["SamplingConfig", "complete_graph", "sample_core_layer", "sample_core_circuit"]


def complete_graph(n: int) -> tuple[tuple[int, int], ...]:
    return tuple((a, b) for a in range(n) for b in range(a + 1, n))


@dataclass(frozen=True)
class SamplingConfig:
    """Layer-distribution parameters for the core circuit sampler."""

    n: int
    p_cnot: float
    p_mcm: float
    connectivity: tuple[tuple[int, int], ...] | None = None
    reset: bool = True
    mode: str = "at-most-one"

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not (0.0 <= self.p_cnot <= 1.0 and 0.0 <= self.p_mcm <= 1.0):
            raise ValueError("p_cnot and p_mcm must lie in [0, 1]")
        if self.mode not in ("at-most-one", "density"):
            raise ValueError(f"unknown sampling mode {self.mode!r}")
        if self.connectivity is not None:
            for a, b in self.connectivity:
                if a == b or not (0 <= a < self.n and 0 <= b < self.n):
                    raise ValueError(f"bad connectivity edge ({a}, {b})")

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        if self.connectivity is not None:
            return self.connectivity
        return complete_graph(self.n)


def _random_oneq(rng: random.Random, wire: int) -> CliffordGate:
    return CliffordGate(rng.randrange(NUM_ONEQ_CLIFFORDS), (wire,))


def _place_cnot(rng: random.Random, edges, occupied: set[int]) -> CliffordGate | None:
    free = [e for e in edges if e[0] not in occupied and e[1] not in occupied]
    if not free:
        return None
    a, b = free[rng.randrange(len(free))]
    if rng.getrandbits(1):
        a, b = b, a
    occupied.update((a, b))
    return CliffordGate(CNOT_INDEX, (a, b))


def sample_core_layer(config: SamplingConfig, rng: random.Random) -> CircuitLayer:
    """Draw one core layer. Draw order is fixed, so a seeded rng is repeatable."""
    occupied: set[int] = set()
    mcm_wires: list[int] = []
    gates: list[CliffordGate] = []

    if config.mode == "at-most-one":
        if rng.random() < config.p_mcm:
            w = rng.randrange(config.n)
            mcm_wires.append(w)
            occupied.add(w)
        if rng.random() < config.p_cnot:
            g = _place_cnot(rng, config.edges, occupied)
            if g is not None:
                gates.append(g)
    else:
        for w in range(config.n):
            if rng.random() < config.p_mcm:
                mcm_wires.append(w)
                occupied.add(w)
        eligible = [e for e in config.edges if e[0] not in occupied and e[1] not in occupied]
        rng.shuffle(eligible)
        for a, b in eligible:
            if a in occupied or b in occupied:
                continue
            if rng.random() < config.p_cnot:
                if rng.getrandbits(1):
                    a, b = b, a
                occupied.update((a, b))
                gates.append(CliffordGate(CNOT_INDEX, (a, b)))

    for w in range(config.n):
        if w not in occupied:
            gates.append(_random_oneq(rng, w))
    return CircuitLayer(config.n, tuple(gates), tuple(mcm_wires), reset=config.reset)


def sample_core_circuit(config: SamplingConfig, depth: int, rng: random.Random) -> list[CircuitLayer]:
    """``depth`` independently sampled layers (the empty list for depth 0)."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    return [sample_core_layer(config, rng) for _ in range(depth)]
