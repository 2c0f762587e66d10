"""Unadjusted Langevin chains and the reference diffusion they discretize.

The update rule is

    x_{k+1} = x_k - h * grad V(x_k) + sqrt(2 h) * xi_k,   xi_k ~ N(0, I_d),

run as a batch of independent chains stored in an ``(n_chains, d)`` array.

Randomness contract
-------------------
All noise comes from counter-based Philox streams derived from a single root
seed.  Stream 0 is reserved for the initial draw; stream k+1 supplies the
noise for iteration k (the update producing x_{k+1}).  Within a stream, the
block ``standard_normal((n_chains, d))`` is laid out row-major, so chain i
always reads row i: the noise consumed by chain i is a function of
``(root_seed, iteration, i)`` only.  Consequences, both tested:

* runs with the same root seed are bit-identical, and
* the first chains of a larger batch reproduce a smaller batch exactly
  (advancing chain i never consumes randomness addressed to chain j).

Divergence policy
-----------------
A chain is declared divergent when any coordinate exceeds 1e150 in magnitude
or stops being finite.  :class:`ChainDivergenceError` carries the chain
index, the iteration at which the blow-up was detected, and the moment trace
recorded so far.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .targets import (
    HeavyTailError,
    InputValidationError,
    PotentialSpec,
    grad_potential,
)

__all__ = [
    "ChainDivergenceError",
    "ChainBatch",
    "MomentTrace",
    "gaussian_init",
    "lmc_step",
    "run_chains",
    "reference_diffusion",
    "write_trace_csv",
]

#: Magnitude at which a coordinate is declared divergent.
DIVERGENCE_LIMIT = 1e150


class ChainDivergenceError(HeavyTailError, RuntimeError):
    """A chain coordinate left the representable region.

    Attributes
    ----------
    chain_index : int
        Index (within the batch) of the first offending chain.
    iteration : int
        Iteration index of the freshly produced state.
    partial_trace : MomentTrace or None
        Whatever had been recorded before the blow-up.
    """

    def __init__(self, chain_index: int, iteration: int, partial_trace=None):
        super().__init__(
            f"chain {chain_index} diverged at iteration {iteration} "
            f"(coordinate beyond {DIVERGENCE_LIMIT:.0e} or non-finite)"
        )
        self.chain_index = int(chain_index)
        self.iteration = int(iteration)
        self.partial_trace = partial_trace


@dataclass(frozen=True)
class ChainBatch:
    """State of a batch of chains after ``k`` iterations.

    ``rng_root`` addresses the Philox stream family; the batch consumes
    stream ``k + 1`` on its next step.
    """

    positions: np.ndarray
    h: float
    k: int
    rng_root: int

    def __post_init__(self) -> None:
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2:
            raise InputValidationError(
                f"positions must have shape (n_chains, d), got {pos.shape}"
            )
        if self.h <= 0 or not np.isfinite(self.h):
            raise InputValidationError(f"step size h must be positive, got {self.h}")
        if self.k < 0:
            raise InputValidationError(f"iteration counter k must be >= 0, got {self.k}")
        object.__setattr__(self, "positions", pos)

    @property
    def n_chains(self) -> int:
        return self.positions.shape[0]

    @property
    def d(self) -> int:
        return self.positions.shape[1]


@dataclass
class MomentTrace:
    """Second-moment summary of a run, aligned on recorded iterations.

    ``dm2_next`` / ``dm2_next_se`` hold the paired one-step increment
    mean(|x_{k+1}|^2 - |x_k|^2) and its standard error at each recorded k
    (NaN where no successor step exists); they exist so per-step drift
    inequalities can be tested at full statistical strength.
    """

    iters: np.ndarray
    m2: np.ndarray
    se: np.ndarray
    n_chains: int
    dm2_next: np.ndarray = field(default=None)  # type: ignore[assignment]
    dm2_next_se: np.ndarray = field(default=None)  # type: ignore[assignment]
    times: Union[np.ndarray, None] = None
    final_positions: Union[np.ndarray, None] = None
    stopped_early: bool = False


def _noise_block(root: int, stream: int, n: int, d: int) -> np.ndarray:
    """The (n, d) standard-normal block addressed by (root, stream)."""
    gen = np.random.Generator(np.random.Philox(key=root, counter=stream << 128))
    return gen.standard_normal((n, d))


def gaussian_init(
    sigma2: float, d: int, n_chains: int, h: float, seed: int
) -> ChainBatch:
    """Draw x_0 ~ N(0, sigma2 * I_d) for every chain (stream 0 of ``seed``)."""
    if sigma2 <= 0 or not np.isfinite(sigma2):
        raise InputValidationError(f"sigma2 must be positive, got {sigma2}")
    if n_chains < 1:
        raise InputValidationError(f"n_chains must be >= 1, got {n_chains}")
    block = _noise_block(seed, 0, n_chains, d)
    return ChainBatch(positions=np.sqrt(sigma2) * block, h=h, k=0, rng_root=seed)


def _check_divergence(pos: np.ndarray, iteration: int, trace=None) -> None:
    bad = ~np.isfinite(pos) | (np.abs(pos) > DIVERGENCE_LIMIT)
    if np.any(bad):
        idx = int(np.nonzero(np.any(bad, axis=1))[0][0])
        raise ChainDivergenceError(idx, iteration, partial_trace=trace)


def lmc_step(batch: ChainBatch, spec: PotentialSpec) -> ChainBatch:
    """Advance every chain one iteration; returns a new batch at k+1."""
    if spec.d != batch.d:
        raise InputValidationError(
            f"spec dimension {spec.d} does not match batch dimension {batch.d}"
        )
    x = batch.positions
    h = batch.h
    xi = _noise_block(batch.rng_root, batch.k + 1, batch.n_chains, batch.d)
    new = x - h * grad_potential(spec, x) + np.sqrt(2.0 * h) * xi
    _check_divergence(new, batch.k + 1)
    return ChainBatch(positions=new, h=h, k=batch.k + 1, rng_root=batch.rng_root)


def _m2_stats(pos: np.ndarray) -> tuple[float, float]:
    sq = np.einsum("ij,ij->i", pos, pos)
    n = sq.shape[0]
    m2 = float(sq.mean())
    se = float(sq.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return m2, se


def _paired_stats(pos_old: np.ndarray, pos_new: np.ndarray) -> tuple[float, float]:
    diff = np.einsum("ij,ij->i", pos_new, pos_new) - np.einsum(
        "ij,ij->i", pos_old, pos_old
    )
    n = diff.shape[0]
    mean = float(diff.mean())
    se = float(diff.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return mean, se


def run_chains(
    spec: PotentialSpec,
    init: ChainBatch,
    n_iters: int,
    record_every: int = 1,
    stop_below: Union[float, None] = None,
) -> MomentTrace:
    """Run the batch for ``n_iters`` iterations, recording second moments.

    Iteration 0 (the initial state) and every multiple of ``record_every``
    are recorded, as is the final iteration reached.  When ``stop_below`` is
    given, the run ends at the first recorded iteration whose upper
    confidence value m2 + 2 se falls below it (that iteration is recorded and
    ``stopped_early`` is set).

    Returns
    -------
    MomentTrace
        With per-recorded-iteration paired one-step increments and the final
        chain positions attached.
    """
    if n_iters < 0:
        raise InputValidationError(f"n_iters must be >= 0, got {n_iters}")
    if record_every < 1:
        raise InputValidationError(f"record_every must be >= 1, got {record_every}")

    iters: list[int] = []
    m2s: list[float] = []
    ses: list[float] = []
    d_next: list[float] = []
    d_next_se: list[float] = []
    stopped = False

    batch = init
    pending: Union[np.ndarray, None] = None  # positions at the last recorded iter

    def record(b: ChainBatch) -> bool:
        nonlocal pending
        m2, se = _m2_stats(b.positions)
        iters.append(b.k - init.k)
        m2s.append(m2)
        ses.append(se)
        d_next.append(np.nan)
        d_next_se.append(np.nan)
        pending = b.positions
        return stop_below is not None and m2 + 2.0 * se < stop_below

    try:
        hit = record(batch)
        if hit:
            stopped = True
        else:
            for step in range(1, n_iters + 1):
                old_pos = batch.positions
                batch = lmc_step(batch, spec)
                if pending is old_pos:
                    dm, dse = _paired_stats(old_pos, batch.positions)
                    d_next[-1] = dm
                    d_next_se[-1] = dse
                if step % record_every == 0 or step == n_iters:
                    if record(batch):
                        stopped = True
                        break
    except ChainDivergenceError as err:
        err.partial_trace = MomentTrace(
            iters=np.asarray(iters, dtype=int),
            m2=np.asarray(m2s),
            se=np.asarray(ses),
            n_chains=init.n_chains,
            dm2_next=np.asarray(d_next),
            dm2_next_se=np.asarray(d_next_se),
        )
        raise

    return MomentTrace(
        iters=np.asarray(iters, dtype=int),
        m2=np.asarray(m2s),
        se=np.asarray(ses),
        n_chains=init.n_chains,
        dm2_next=np.asarray(d_next),
        dm2_next_se=np.asarray(d_next_se),
        final_positions=batch.positions,
        stopped_early=stopped,
    )


def reference_diffusion(
    spec: PotentialSpec,
    init: ChainBatch,
    T: float,
    substeps_per_unit: int,
    record_every: int = 1,
    check_discretization: bool = True,
) -> MomentTrace:
    """Euler-Maruyama integration of dX = -grad V dt + sqrt(2) dB to time T.

    ``dt = 1 / substeps_per_unit``; the number of steps is rounded up to an
    even count so the built-in halving check can couple a coarse path
    (dt' = 2 dt) to the fine one through the exact Brownian aggregation
    eta_j = (xi_{2j} + xi_{2j+1}) / sqrt(2), regenerated from the same
    counters rather than stored.  If the final second moments of the two
    resolutions differ by more than 1% (relative to max(1, m2)), a
    discretization warning is emitted.

    The ``h`` carried by ``init`` is ignored; noise streams are drawn from
    ``init.rng_root`` exactly as in :func:`run_chains`.
    """
    if T <= 0 or not np.isfinite(T):
        raise InputValidationError(f"horizon T must be positive, got {T}")
    if substeps_per_unit < 1:
        raise InputValidationError(
            f"substeps_per_unit must be >= 1, got {substeps_per_unit}"
        )
    dt = 1.0 / substeps_per_unit
    n_steps = int(np.ceil(T * substeps_per_unit))
    n_steps += n_steps % 2
    n, d = init.n_chains, init.d

    iters: list[int] = []
    m2s: list[float] = []
    ses: list[float] = []

    x = init.positions.copy()
    m2, se = _m2_stats(x)
    iters.append(0)
    m2s.append(m2)
    ses.append(se)
    root = init.rng_root
    for step in range(1, n_steps + 1):
        xi = _noise_block(root, step, n, d)
        x = x - dt * grad_potential(spec, x) + np.sqrt(2.0 * dt) * xi
        _check_divergence(x, step)
        if step % record_every == 0 or step == n_steps:
            m2, se = _m2_stats(x)
            iters.append(step)
            m2s.append(m2)
            ses.append(se)

    if check_discretization:
        dt2 = 2.0 * dt
        y = init.positions.copy()
        for j in range(n_steps // 2):
            eta = (
                _noise_block(root, 2 * j + 1, n, d)
                + _noise_block(root, 2 * j + 2, n, d)
            ) / np.sqrt(2.0)
            y = y - dt2 * grad_potential(spec, y) + np.sqrt(2.0 * dt2) * eta
            _check_divergence(y, j + 1)
        m2_coarse, _ = _m2_stats(y)
        if abs(m2_coarse - m2s[-1]) > 0.01 * max(1.0, abs(m2s[-1])):
            warnings.warn(
                f"reference_diffusion: halving check disagrees "
                f"(fine m2={m2s[-1]:.6g}, coarse m2={m2_coarse:.6g}); "
                f"increase substeps_per_unit",
                RuntimeWarning,
                stacklevel=2,
            )

    arr_iters = np.asarray(iters, dtype=int)
    return MomentTrace(
        iters=arr_iters,
        m2=np.asarray(m2s),
        se=np.asarray(ses),
        n_chains=n,
        dm2_next=np.full(len(iters), np.nan),
        dm2_next_se=np.full(len(iters), np.nan),
        times=arr_iters * dt,
        final_positions=x,
    )


def write_trace_csv(trace: MomentTrace, path: str) -> None:
    """Write ``iter,m2,se,n_chains`` rows; formatting is deterministic."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["iter", "m2", "se", "n_chains"])
        for i, m2, se in zip(trace.iters, trace.m2, trace.se):
            writer.writerow([int(i), f"{m2:.12g}", f"{se:.12g}", trace.n_chains])
