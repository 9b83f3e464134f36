"""Noisy stabilizer simulation of benchmark circuits.

Gate noise is stochastic-Pauli (depolarizing shorthand), measurement noise
follows the uniform-stochastic-instrument picture: a pre-measurement bitflip
mask, a post-measurement bitflip mask, and an independent Pauli on the
unmeasured wires, all sampled per shot.

The executor is a standard stabilizer tableau (generator matrix plus phase
column), batched over shots: because every shot of a fixed circuit applies
the same gate and measurement schedule, the binary generator matrix evolves
identically across shots, and only the per-shot phase column (and the
classical randomness) differs. Gates, Pauli noise, conditional resets and
measurement row-reductions therefore vectorize across the shot axis while
remaining exactly the Aaronson-Gottesman algebra; the per-shot reference
implementation in :mod:`qirb.tableau` is the oracle it is tested against.

All mid-circuit measurement outcomes resolve genuine quantum randomness: a
deterministic outcome is read from the per-shot stabilizer phases, a random
one consumes one random bit per shot.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .builder import OutcomeString, QirbCircuit
from .pauli import clifford_action
from .seeding import derive_np_rng
from .tableau import pauli_product_phase

__all__ = [
    "OneQubitPauliChannel",
    "TwoQubitDepolarizing",
    "InstrumentErrorSpec",
    "NoiseModel",
    "ShotRecord",
    "SimResult",
    "simulate_shots",
    "simulate_result",
]

MAX_SIM_WIRES = 64  # frame masks are packed into uint64 per shot


@dataclass(frozen=True)
class OneQubitPauliChannel:
    """Stochastic Pauli error attached to every single-qubit gate."""

    px: float = 0.0
    py: float = 0.0
    pz: float = 0.0

    def __post_init__(self) -> None:
        if min(self.px, self.py, self.pz) < 0 or self.px + self.py + self.pz > 1 + 1e-12:
            raise ValueError("invalid one-qubit error probabilities")

    @classmethod
    def from_fidelity(cls, f1q: float) -> "OneQubitPauliChannel":
        eps = (1.0 - f1q) / 3.0
        return cls(eps, eps, eps)

    @property
    def total(self) -> float:
        return self.px + self.py + self.pz

    @property
    def fidelity(self) -> float:
        return 1.0 - self.total


@dataclass(frozen=True)
class TwoQubitDepolarizing:
    """Each of the 15 non-identity two-qubit Paulis with equal probability."""

    eps_each: float = 0.0

    def __post_init__(self) -> None:
        if self.eps_each < 0 or 15 * self.eps_each > 1 + 1e-12:
            raise ValueError("invalid two-qubit error probability")

    @classmethod
    def from_fidelity(cls, f2q: float) -> "TwoQubitDepolarizing":
        return cls((1.0 - f2q) / 15.0)

    @property
    def total(self) -> float:
        return 15 * self.eps_each

    @property
    def fidelity(self) -> float:
        return 1.0 - self.total


@dataclass(frozen=True)
class InstrumentErrorSpec:
    """Factorized uniform-stochastic-instrument noise for one MCM layer.

    Each measured wire takes an independent pre-measurement bitflip with
    probability ``pre_flip`` and a post-measurement bitflip with probability
    ``post_flip``; each unmeasured wire takes an independent depolarizing
    Pauli with total probability ``unmeasured_depol``. The induced joint
    distribution over (a, P, b) tuples is a uniform stochastic instrument
    whose no-error probability is its process fidelity.
    """

    pre_flip: float = 0.0
    post_flip: float = 0.0
    unmeasured_depol: float = 0.0

    def __post_init__(self) -> None:
        for p in (self.pre_flip, self.post_flip, self.unmeasured_depol):
            if not 0.0 <= p <= 1.0:
                raise ValueError("instrument error probabilities must lie in [0, 1]")

    def no_error_prob(self, n_unmeasured: int = 0) -> float:
        return (
            (1.0 - self.pre_flip)
            * (1.0 - self.post_flip)
            * (1.0 - self.unmeasured_depol) ** n_unmeasured
        )


@dataclass(frozen=True)
class NoiseModel:
    """Per-operation stochastic noise for the whole simulation."""

    oneq: OneQubitPauliChannel
    twoq: TwoQubitDepolarizing
    mcm: InstrumentErrorSpec
    readout_flip: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.readout_flip <= 1.0:
            raise ValueError("readout flip probability must lie in [0, 1]")

    @classmethod
    def zero(cls) -> "NoiseModel":
        return cls(OneQubitPauliChannel(), TwoQubitDepolarizing(), InstrumentErrorSpec(), 0.0)

    @classmethod
    def depolarizing(
        cls,
        f1q: float = 0.999,
        f2q: float = 0.995,
        mcm_flip: float = 0.02,
        readout_flip: float | None = None,
        mcm_post_flip: float = 0.0,
        mcm_unmeasured_depol: float = 0.0,
    ) -> "NoiseModel":
        """Shorthand model: gate fidelities plus measurement bitflip rates.

        The end-of-circuit readout flip defaults to the MCM pre-measurement
        flip rate.
        """
        return cls(
            oneq=OneQubitPauliChannel.from_fidelity(f1q),
            twoq=TwoQubitDepolarizing.from_fidelity(f2q),
            mcm=InstrumentErrorSpec(mcm_flip, mcm_post_flip, mcm_unmeasured_depol),
            readout_flip=mcm_flip if readout_flip is None else readout_flip,
        )


@dataclass(frozen=True)
class ShotRecord:
    outcome: OutcomeString
    success: int


@dataclass(frozen=True)
class SimResult:
    """Aggregated shots for one circuit."""

    shots: int
    n_success: int
    n_fail: int
    counts: dict[str, int] | None = None

    @property
    def f_value(self) -> float:
        return (self.n_success - self.n_fail) / self.shots


# Enumeration of the 15 non-identity two-qubit Pauli pairs (letter codes),
# plus the identity pair as the no-error slot.
_TWOQ_PAIRS = np.array(
    [(a, b) for a in range(4) for b in range(4) if (a, b) != (0, 0)] + [(0, 0)],
    dtype=np.uint8,
)


class _BatchExecutor:
    """One circuit, all shots at once. See the module docstring."""

    def __init__(self, circuit: QirbCircuit, noise: NoiseModel, shots: int,
                 rng: np.random.Generator, reset_free_mode: str,
                 injections: dict | None = None):
        n = circuit.n
        if n > MAX_SIM_WIRES:
            raise ValueError(f"simulator supports at most {MAX_SIM_WIRES} wires")
        if shots < 1:
            raise ValueError("shot count must be >= 1")
        if not circuit.reset and reset_free_mode not in ("frame-correction", "feedforward-x"):
            raise ValueError(f"unknown reset-free mode {reset_free_mode!r}")
        self.circuit = circuit
        self.noise = noise
        self.shots = shots
        self.rng = rng
        self.mode = reset_free_mode
        self.injections = injections or {}
        self.n = n
        self.x = [1 << i for i in range(n)] + [0] * n
        self.z = [0] * n + [1 << i for i in range(n)]
        self.r = np.zeros((2 * n, shots), dtype=np.uint8)
        self.out = np.zeros((shots, circuit.m + n), dtype=np.uint8)
        self.frame_x = np.zeros(shots, dtype=np.uint64)
        self.frame_z = np.zeros(shots, dtype=np.uint64)
        self.flip_parity = np.zeros(shots, dtype=np.uint8)
        self.use_frame = (not circuit.reset) and reset_free_mode == "frame-correction"

    # -- tableau primitives (bits shared, phases per shot) --

    def _apply_clifford(self, idx: int, q: int) -> None:
        action = clifford_action(idx)
        bit = 1 << q
        x, z, r = self.x, self.z, self.r
        for i in range(2 * self.n):
            code = (1 if x[i] & bit else 0) | (2 if z[i] & bit else 0)
            if code:
                new_code, sign = action[code]
                x[i] = (x[i] & ~bit) | (bit if new_code & 1 else 0)
                z[i] = (z[i] & ~bit) | (bit if new_code & 2 else 0)
                if sign < 0:
                    r[i] ^= 1

    def _apply_cnot(self, c: int, t: int) -> None:
        cbit, tbit = 1 << c, 1 << t
        x, z, r = self.x, self.z, self.r
        for i in range(2 * self.n):
            xc = x[i] & cbit
            zt = z[i] & tbit
            if xc and zt:
                xt = 1 if x[i] & tbit else 0
                zc = 1 if z[i] & cbit else 0
                if xt == zc:
                    r[i] ^= 1
            if xc:
                x[i] ^= tbit
            if zt:
                z[i] ^= cbit

    def _apply_pauli_codes(self, q: int, codes: np.ndarray) -> None:
        """Apply per-shot single-wire Paulis given by letter codes (0=I)."""
        bit = 1 << q
        x, z, r = self.x, self.z, self.r
        for i in range(2 * self.n):
            code = (1 if x[i] & bit else 0) | (2 if z[i] & bit else 0)
            if code:
                r[i] ^= (codes != 0) & (codes != code)

    def _apply_x_masked(self, q: int, mask: np.ndarray) -> None:
        """Apply X on wire q for the shots where mask is 1."""
        bit = 1 << q
        x, z, r = self.x, self.z, self.r
        for i in range(2 * self.n):
            if z[i] & bit:
                r[i] ^= mask

    def _apply_fixed_pauli(self, xmask: int, zmask: int) -> None:
        """Apply one fixed unsigned Pauli to every shot (error injection)."""
        x, z, r = self.x, self.z, self.r
        for i in range(2 * self.n):
            if ((x[i] & zmask).bit_count() + (z[i] & xmask).bit_count()) % 2:
                r[i] ^= 1

    def _measure(self, q: int) -> np.ndarray:
        """Measure Z on wire q for all shots; returns the physical bits.

        In frame-correction mode a genuinely random outcome is drawn so that
        the frame-corrected bit equals the bit a feedforward execution would
        have produced from the same draw, keeping the two reset-free modes
        aligned shot-by-shot under a shared seed.
        """
        n = self.n
        bit = 1 << q
        x, z, r = self.x, self.z, self.r
        pivot = -1
        for i in range(n, 2 * n):
            if x[i] & bit:
                pivot = i
                break
        if self.use_frame:
            fx = ((self.frame_x >> np.uint64(q)) & np.uint64(1)).astype(np.uint8)
        else:
            fx = None
        if pivot >= 0:
            draw = self.rng.integers(0, 2, size=self.shots, dtype=np.uint8)
            outcome = draw if fx is None else draw ^ fx
            for h in range(2 * n):
                if h != pivot and x[h] & bit:
                    if h >= n:
                        k = pauli_product_phase(x[pivot], z[pivot], x[h], z[h])
                        assert k % 2 == 0
                        r[h] ^= r[pivot]
                        if k & 2:
                            r[h] ^= 1
                    # Destabilizer phases are never read; track bits only.
                    x[h] ^= x[pivot]
                    z[h] ^= z[pivot]
            d = pivot - n
            x[d], z[d] = x[pivot], z[pivot]
            r[d] = r[pivot]
            x[pivot], z[pivot] = 0, bit
            r[pivot] = outcome
            return outcome
        # Deterministic outcome: product of stabilizers selected by the
        # destabilizers that anticommute with Z_q.
        ax = az = 0
        const = 0
        outcome = np.zeros(self.shots, dtype=np.uint8)
        for i in range(n):
            if x[i] & bit:
                s = n + i
                const += pauli_product_phase(ax, az, x[s], z[s])
                outcome ^= r[s]
                ax ^= x[s]
                az ^= z[s]
        assert ax == 0 and az == bit and const % 2 == 0
        if const & 2:
            outcome ^= 1
        return outcome

    # -- noise sampling --

    def _oneq_noise(self, q: int) -> None:
        ch = self.noise.oneq
        if ch.total <= 0.0:
            return
        u = self.rng.random(self.shots)
        codes = np.zeros(self.shots, dtype=np.uint8)
        codes[u < ch.px] = 1  # X
        codes[(u >= ch.px) & (u < ch.px + ch.py)] = 3  # Y
        codes[(u >= ch.px + ch.py) & (u < ch.total)] = 2  # Z
        self._apply_pauli_codes(q, codes)

    def _twoq_noise(self, c: int, t: int) -> None:
        ch = self.noise.twoq
        if ch.eps_each <= 0.0:
            return
        u = self.rng.random(self.shots)
        idx = np.minimum((u / ch.eps_each).astype(np.int64), 15)
        self._apply_pauli_codes(c, _TWOQ_PAIRS[idx, 0])
        self._apply_pauli_codes(t, _TWOQ_PAIRS[idx, 1])

    def _depol_noise(self, q: int, total: float) -> None:
        if total <= 0.0:
            return
        u = self.rng.random(self.shots)
        third = total / 3.0
        codes = np.zeros(self.shots, dtype=np.uint8)
        codes[u < third] = 1
        codes[(u >= third) & (u < 2 * third)] = 3
        codes[(u >= 2 * third) & (u < total)] = 2
        self._apply_pauli_codes(q, codes)

    def _bernoulli(self, p: float) -> np.ndarray:
        if p <= 0.0:
            return np.zeros(self.shots, dtype=np.uint8)
        return (self.rng.random(self.shots) < p).astype(np.uint8)

    # -- circuit walk --

    def _gate_sublayer(self, layer) -> None:
        for g in layer.gates:
            if g.is_cnot:
                self._apply_cnot(*g.wires)
                self._twoq_noise(*g.wires)
            else:
                self._apply_clifford(g.index, g.wires[0])
                self._oneq_noise(g.wires[0])

    def _inject(self, tag) -> None:
        p = self.injections.get(tag)
        if p is not None:
            self._apply_fixed_pauli(p.x, p.z)

    def _frame_conjugate_gates(self, layer) -> None:
        if not self.use_frame:
            return
        fx, fz = self.frame_x, self.frame_z
        for g in layer.gates:
            if g.is_cnot:
                c, t = g.wires
                cq, tq = np.uint64(c), np.uint64(t)
                one = np.uint64(1)
                xc = (fx >> cq) & one
                zt = (fz >> tq) & one
                fx ^= (xc << tq)
                fz ^= (zt << cq)
            else:
                q = np.uint64(g.wires[0])
                one = np.uint64(1)
                xb = (fx >> q) & one
                zb = (fz >> q) & one
                code = xb | (zb << one)
                action = clifford_action(g.index)
                new_x = np.zeros_like(xb)
                new_z = np.zeros_like(zb)
                for in_code in (1, 2, 3):
                    out_code = action[in_code][0]
                    sel = code == in_code
                    if out_code & 1:
                        new_x |= sel
                    if out_code & 2:
                        new_z |= sel
                fx &= ~(one << q)
                fz &= ~(one << q)
                fx |= new_x.astype(np.uint64) << q
                fz |= new_z.astype(np.uint64) << q
        self.frame_x, self.frame_z = fx, fz

    def _mcm_step(self, layer, k0: int) -> None:
        if not layer.mcm_wires:
            return
        spec = self.noise.mcm
        zmask = self.circuit.target.z
        for j, q in enumerate(layer.mcm_wires):
            k = k0 + j
            a = self._bernoulli(spec.pre_flip)
            if a.any():
                self._apply_x_masked(q, a)
            if self.use_frame:
                fx = ((self.frame_x >> np.uint64(q)) & np.uint64(1)).astype(np.uint8)
                if (zmask >> k) & 1:
                    self.flip_parity ^= fx
            outcome = self._measure(q)
            self.out[:, k] = outcome
            b = self._bernoulli(spec.post_flip)
            if self.use_frame:
                one = np.uint64(1)
                self.frame_x &= ~(one << np.uint64(q))
                self.frame_z &= ~(one << np.uint64(q))
                self.frame_x |= outcome.astype(np.uint64) << np.uint64(q)
            else:
                # Reset (or feedforward X): return the wire to |0>.
                if outcome.any():
                    self._apply_x_masked(q, outcome)
            if b.any():
                self._apply_x_masked(q, b)
        if spec.unmeasured_depol > 0.0:
            mset = set(layer.mcm_wires)
            for w in range(self.n):
                if w not in mset:
                    self._depol_noise(w, spec.unmeasured_depol)

    def run(self) -> tuple[np.ndarray, np.ndarray]:
        """Execute all shots; returns (success array of +/-1, outcome bits)."""
        c = self.circuit
        self._gate_sublayer(c.prep_layer)
        self._inject(("prep",))
        k0 = 0
        for i, d in enumerate(c.dressed):
            self._frame_conjugate_gates(d.l1)
            self._gate_sublayer(d.l1)
            self._inject(("l1", i))
            self._frame_conjugate_gates(d.l2)
            self._gate_sublayer(d.l2)
            self._inject(("l2", i))
            self._mcm_step(d.l2, k0)
            self._inject(("postmeas", i))
            k0 += len(d.l2.mcm_wires)
            self._frame_conjugate_gates(d.l3)
            self._gate_sublayer(d.l3)
            self._inject(("l3", i))
        self._frame_conjugate_gates(c.final_layer)
        self._gate_sublayer(c.final_layer)
        self._inject(("final",))

        zmask = c.target.z
        for q in range(self.n):
            if self.use_frame and (zmask >> (c.m + q)) & 1:
                fx = ((self.frame_x >> np.uint64(q)) & np.uint64(1)).astype(np.uint8)
                self.flip_parity ^= fx
            outcome = self._measure(q)
            flips = self._bernoulli(self.noise.readout_flip)
            self.out[:, c.m + q] = outcome ^ flips

        parity = np.zeros(self.shots, dtype=np.uint8)
        for v in range(c.n + c.m):
            if (zmask >> v) & 1:
                parity ^= self.out[:, v]
        parity ^= self.flip_parity
        observed = 1 - 2 * parity.astype(np.int64)
        success = np.where(observed == c.target.sign, 1, -1).astype(np.int64)
        return success, self.out


def _run(circuit: QirbCircuit, noise: NoiseModel, shots: int, seed: int,
         reset_free_mode: str, injections: dict | None = None):
    rng = derive_np_rng(seed)
    ex = _BatchExecutor(circuit, noise, shots, rng, reset_free_mode, injections)
    return ex.run()


def simulate_shots(
    circuit: QirbCircuit,
    noise: NoiseModel,
    shots: int,
    seed: int,
    reset_free_mode: str = "frame-correction",
    injections: dict | None = None,
) -> list[ShotRecord]:
    """Simulate and return every shot's outcome string and +/-1 success."""
    success, out = _run(circuit, noise, shots, seed, reset_free_mode, injections)
    return [
        ShotRecord(OutcomeString(tuple(int(b) for b in out[s])), int(success[s]))
        for s in range(shots)
    ]


def simulate_result(
    circuit: QirbCircuit,
    noise: NoiseModel,
    shots: int,
    seed: int,
    reset_free_mode: str = "frame-correction",
    with_counts: bool = True,
) -> SimResult:
    """Simulate and aggregate: success/fail totals plus outcome counts."""
    success, out = _run(circuit, noise, shots, seed, reset_free_mode)
    n_success = int((success > 0).sum())
    counts = None
    if with_counts:
        counts = {}
        digits = np.char.mod("%d", out)
        for s in range(shots):
            key = "".join(digits[s])
            counts[key] = counts.get(key, 0) + 1
    return SimResult(shots, n_success, shots - n_success, counts)
