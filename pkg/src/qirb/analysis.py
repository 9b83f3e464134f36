"""Turning shot records into error rates.

Covers the success statistic F, the exponential decay fit for the benchmark
error rate, bootstrap uncertainties, the four-parameter error-rates model
(ERM), and the bright-state depumping curve fit.

Declared conventions (the underlying protocol fixes none of these):

* decay fits minimize weighted least squares, weights 1/SE_d^2 when every
  depth has a positive standard error and uniform otherwise, seeded by a
  log-linear regression over depths with positive means and refined by a
  bounded Nelder-Mead simplex;
* bootstrap resamples circuits with replacement within each depth, then
  redraws each chosen circuit's success count from a binomial at its
  empirical rate, and reports the sample standard deviation of the re-fits;
* ERM gate counts include the dressing sublayers and the preparation and
  final rotation layers, matching the simulator's noise attachment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .builder import QirbCircuit
from .seeding import derive_np_rng
from .simulator import ShotRecord

__all__ = [
    "FitDegenerateError",
    "DepthStats",
    "FitResult",
    "ErmParams",
    "ErmDatum",
    "DepumpFit",
    "DecayDataset",
    "compute_f",
    "f_from_counts",
    "fit_decay",
    "bootstrap_decay",
    "erm_predict",
    "erm_predict_counts",
    "erm_counts",
    "fit_erm",
    "bootstrap_erm",
    "fit_depumping",
]


class FitDegenerateError(Exception):
    """Raised when the data cannot pin down the requested fit."""


def f_from_counts(n_success: int, n_fail: int) -> Fraction:
    n = n_success + n_fail
    if n < 1:
        raise ValueError("need at least one shot")
    return Fraction(n_success - n_fail, n)


def compute_f(shots: list[ShotRecord]) -> Fraction:
    """(N_success - N_fail) / N as an exact rational."""
    if not shots:
        raise ValueError("need at least one shot")
    n_success = sum(1 for s in shots if s.success > 0)
    return f_from_counts(n_success, len(shots) - n_success)


@dataclass(frozen=True)
class DepthStats:
    """Per-depth aggregation of per-circuit F values."""

    depth: int
    f_values: tuple[Fraction, ...]
    mean: float
    stderr: float

    @classmethod
    def from_f_values(cls, depth: int, f_values) -> "DepthStats":
        fs = tuple(Fraction(f) for f in f_values)
        if not fs:
            raise ValueError("need at least one circuit per depth")
        mean = float(sum(fs) / len(fs))
        if len(fs) > 1:
            var = sum((float(f) - mean) ** 2 for f in fs) / (len(fs) - 1)
            stderr = math.sqrt(var / len(fs))
        else:
            stderr = 0.0
        return cls(depth, fs, mean, stderr)


@dataclass
class DecayDataset:
    """Per-circuit success counts grouped by depth (bootstrap needs counts)."""

    by_depth: dict[int, list[tuple[int, int]]] = field(default_factory=dict)

    def add(self, depth: int, n_success: int, shots: int) -> None:
        self.by_depth.setdefault(depth, []).append((n_success, shots))

    def depth_stats(self) -> list[DepthStats]:
        out = []
        for depth in sorted(self.by_depth):
            fs = [f_from_counts(ns, n - ns) for ns, n in self.by_depth[depth]]
            out.append(DepthStats.from_f_values(depth, fs))
        return out


@dataclass(frozen=True)
class FitResult:
    amplitude: float
    r_omega: float
    residual: float
    bootstrap_sigma: float | None = None
    bootstrap_samples: tuple[float, ...] = ()


_BOUNDS = ((1e-9, 1.05), (0.0, 1.0 - 1e-9))


def _decay_loss(params, depths, means, weights):
    a, r = params
    base = 1.0 - r
    total = 0.0
    for d, mean, w in zip(depths, means, weights):
        diff = mean - a * base**d
        total += w * diff * diff
    return total


def fit_decay(stats: list[DepthStats]) -> FitResult:
    """Weighted least-squares fit of mean-F(d) = A (1 - r)^d."""
    stats = sorted(stats, key=lambda s: s.depth)
    depths = np.array([s.depth for s in stats], dtype=float)
    means = np.array([s.mean for s in stats], dtype=float)
    if len(set(s.depth for s in stats)) < 2:
        raise FitDegenerateError("need at least two distinct depths")
    if not np.all(np.isfinite(means)) or np.all(means <= 0.0):
        raise FitDegenerateError("means do not support a decay fit")
    errs = np.array([s.stderr for s in stats], dtype=float)
    weights = 1.0 / errs**2 if np.all(errs > 0.0) else np.ones_like(means)

    pos = means > 0.0
    if pos.sum() >= 2:
        slope, intercept = np.polyfit(depths[pos], np.log(means[pos]), 1)
        a0 = float(np.clip(math.exp(intercept), 1e-6, 1.05))
        r0 = float(np.clip(1.0 - math.exp(slope), 0.0, 1.0 - 1e-9))
    else:
        a0, r0 = float(np.clip(means[0], 1e-6, 1.05)), 0.1
    # The simplex refines the seed on noisy data; on noiseless data the
    # log-linear seed is already exact and is kept if the simplex cannot
    # improve on it.
    best = np.array([a0, r0])
    best_loss = _decay_loss(best, depths, means, weights)
    res = minimize(
        _decay_loss,
        best,
        args=(depths, means, weights),
        method="Nelder-Mead",
        bounds=_BOUNDS,
        options={"xatol": 1e-9, "fatol": 1e-15, "maxiter": 2000},
    )
    if res.fun < best_loss:
        best, best_loss = res.x, float(res.fun)
    return FitResult(amplitude=float(best[0]), r_omega=float(best[1]), residual=best_loss)


def bootstrap_decay(data: DecayDataset, resamples: int, seed: int) -> FitResult:
    """Fit plus bootstrap 1-sigma from circuit/shot resampling."""
    if resamples < 2:
        raise ValueError("need at least two bootstrap resamples")
    base = fit_decay(data.depth_stats())
    rng = derive_np_rng(seed, "bootstrap-decay")
    samples = []
    for _ in range(resamples):
        stats = []
        for depth in sorted(data.by_depth):
            circuits = data.by_depth[depth]
            idx = rng.integers(0, len(circuits), size=len(circuits))
            fs = []
            for i in idx:
                ns, n = circuits[i]
                ns2 = int(rng.binomial(n, ns / n))
                fs.append(f_from_counts(ns2, n - ns2))
            stats.append(DepthStats.from_f_values(depth, fs))
        try:
            samples.append(fit_decay(stats).r_omega)
        except FitDegenerateError:
            continue
    if len(samples) < 2:
        raise FitDegenerateError("bootstrap resamples degenerate")
    arr = np.array(samples)
    sigma = float(arr.std(ddof=1))
    return FitResult(
        amplitude=base.amplitude,
        r_omega=base.r_omega,
        residual=base.residual,
        bootstrap_sigma=sigma,
        bootstrap_samples=tuple(float(v) for v in arr),
    )


# --- error rates model -------------------------------------------------------


@dataclass(frozen=True)
class ErmParams:
    """Four-parameter per-component error model.

    ``eps_spam`` is the multiplicative prefactor exactly as it appears in
    the model's prediction (a retention factor near 1), despite the name.
    """

    eps_1q: float
    eps_2q: float
    eps_mcm: float
    eps_spam: float

    def __post_init__(self) -> None:
        for v in (self.eps_1q, self.eps_2q, self.eps_mcm, self.eps_spam):
            if not 0.0 <= v <= 1.0:
                raise ValueError("ERM parameters must lie in [0, 1]")


def erm_counts(circuit: QirbCircuit) -> tuple[int, int, int]:
    """(single-qubit gates, CNOTs, MCMs), dressing and prep/final included."""
    return circuit.oneq_gate_count(), circuit.cnot_count(), circuit.m


def erm_predict_counts(params: ErmParams, k1: int, k2: int, km: int) -> float:
    """Model prediction from operation counts.

    The per-MCM factor is the effective fidelity of a one-measurement
    subsystem at bitflip rate eps_mcm, i.e. (1 - 1.5 eps_mcm) per MCM.
    """
    return (
        params.eps_spam
        * (1.0 - params.eps_1q) ** k1
        * (1.0 - params.eps_2q) ** k2
        * (1.0 - 1.5 * params.eps_mcm) ** km
    )


def erm_predict(params: ErmParams, circuit: QirbCircuit) -> float:
    k1, k2, km = erm_counts(circuit)
    return erm_predict_counts(params, k1, k2, km)


@dataclass(frozen=True)
class ErmDatum:
    """One circuit's observation for ERM fitting."""

    k1: int
    k2: int
    km: int
    depth: int
    config_id: int
    n_success: int
    shots: int

    @property
    def f_obs(self) -> float:
        return (2 * self.n_success - self.shots) / self.shots


_ERM_BOUNDS = ((0.0, 1.0),) * 4


def _erm_loss_arrays(data: list[ErmDatum]):
    k1 = np.array([d.k1 for d in data], dtype=np.int64)
    k2 = np.array([d.k2 for d in data], dtype=np.int64)
    km = np.array([d.km for d in data], dtype=np.int64)
    f = np.array([d.f_obs for d in data], dtype=float)
    return k1, k2, km, f


def _erm_loss(params, k1, k2, km, f):
    e1, e2, em, spam = params
    pred = spam * (1.0 - e1) ** k1 * (1.0 - e2) ** k2 * (1.0 - 1.5 * em) ** km
    return float(np.mean((pred - f) ** 2))


_DEFAULT_ERM_STARTS = (
    (1e-3, 5e-3, 2e-2, 0.98),
    (1e-4, 1e-3, 5e-3, 1.0),
    (5e-3, 2e-2, 5e-2, 0.95),
    (1e-2, 5e-2, 1e-1, 0.9),
    (1e-3, 1e-2, 1e-2, 1.0),
    (3e-4, 3e-3, 3e-2, 0.99),
    (2e-3, 8e-3, 1e-2, 0.97),
    (5e-4, 2e-3, 4e-2, 1.0),
)


def fit_erm(
    data: list[ErmDatum],
    seed: int = 0,
    starts=None,
    perturbed_starts: int = 0,
) -> tuple[ErmParams, float]:
    """Fit the four ERM parameters by mean-squared-error minimization.

    Runs a bounded Nelder-Mead simplex from every start (defaults to 8
    spread-out starts; a single-config input is accepted but poorly
    conditioned) and keeps the best residual.
    """
    if not data:
        raise FitDegenerateError("no circuits to fit")
    arrays = _erm_loss_arrays(data)
    start_list = list(starts if starts is not None else _DEFAULT_ERM_STARTS)
    if perturbed_starts:
        rng = derive_np_rng(seed, "erm-starts")
        for _ in range(perturbed_starts):
            base = start_list[0]
            start_list.append(tuple(np.clip(np.array(base) * rng.lognormal(0, 0.5, 4), 0, 1)))
    best_x = None
    best_loss = math.inf
    for s in start_list:
        res = minimize(
            _erm_loss,
            np.array(s, dtype=float),
            args=arrays,
            method="Nelder-Mead",
            bounds=_ERM_BOUNDS,
            options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 6000},
        )
        if res.fun < best_loss:
            best_loss = float(res.fun)
            best_x = res.x
    if best_x is None or not np.all(np.isfinite(best_x)):
        raise FitDegenerateError("ERM optimization failed from every start")
    e1, e2, em, spam = (float(np.clip(v, 0.0, 1.0)) for v in best_x)
    return ErmParams(e1, e2, em, spam), best_loss


def bootstrap_erm(data: list[ErmDatum], resamples: int, seed: int):
    """Bootstrap sigma for each ERM parameter.

    Resamples circuits with replacement within every (config, depth) group,
    then redraws shot counts binomially, and re-fits. Resample fits start
    from the full-data solution (the multi-start search already found it).
    """
    params, residual = fit_erm(data, seed=seed)
    base_start = [(params.eps_1q, params.eps_2q, params.eps_mcm, params.eps_spam)]
    groups: dict[tuple[int, int], list[ErmDatum]] = {}
    for d in data:
        groups.setdefault((d.config_id, d.depth), []).append(d)
    rng = derive_np_rng(seed, "bootstrap-erm")
    draws = []
    for _ in range(resamples):
        resampled = []
        for key in sorted(groups):
            members = groups[key]
            idx = rng.integers(0, len(members), size=len(members))
            for i in idx:
                d = members[i]
                ns2 = int(rng.binomial(d.shots, d.n_success / d.shots))
                resampled.append(
                    ErmDatum(d.k1, d.k2, d.km, d.depth, d.config_id, ns2, d.shots)
                )
        p, _ = fit_erm(resampled, seed=seed, starts=base_start)
        draws.append((p.eps_1q, p.eps_2q, p.eps_mcm, p.eps_spam))
    arr = np.array(draws)
    sigma = arr.std(axis=0, ddof=1)
    return params, residual, {
        "eps_1q": float(sigma[0]),
        "eps_2q": float(sigma[1]),
        "eps_mcm": float(sigma[2]),
        "eps_spam": float(sigma[3]),
    }


# --- bright-state depumping --------------------------------------------------


@dataclass(frozen=True)
class DepumpFit:
    gamma: float
    residual: float


def fit_depumping(samples) -> DepumpFit:
    """Least-squares rate for the depumping curve (2/3)(1 - exp(-3 gamma t))."""
    pts = [(float(t), float(p)) for t, p in samples]
    if len(pts) < 2:
        raise FitDegenerateError("need at least two samples")
    if any(t < 0 for t, _ in pts):
        raise ValueError("times must be >= 0")
    t = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if np.allclose(y, 0.0):
        return DepumpFit(0.0, float(np.sum(y**2)))

    def loss(gamma):
        pred = (2.0 / 3.0) * (1.0 - np.exp(-3.0 * gamma * t))
        return float(np.sum((pred - y) ** 2))

    tmax = max(t.max(), 1e-12)
    hi = 100.0 / tmax
    res = minimize_scalar(loss, bounds=(0.0, hi), method="bounded",
                          options={"xatol": 1e-14})
    gamma = float(res.x)
    # Polish with a simplex in case the bracket was wide.
    res2 = minimize(lambda g: loss(g[0]), np.array([gamma]), method="Nelder-Mead",
                    options={"xatol": 1e-14, "fatol": 1e-20})
    if res2.fun < res.fun:
        gamma = float(res2.x[0])
    return DepumpFit(max(gamma, 0.0), loss(max(gamma, 0.0)))
