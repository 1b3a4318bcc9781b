"""Exact simulation of the stochastic ingredients of the likelihood ratio.

The continuous part is never discretized: its terminal contribution is a
single normal draw with the closed-form mean and variance, so the only
approximation anywhere in the sampling layer is the small-jump truncation
for infinite-activity measures.  Jumps are simulated as marked Poisson
processes: a Poisson count, uniform arrival times on (0, T], and i.i.d.
sizes.  Sizes come from the family's own sampler when one is exact
(compound Poisson densities, with rejection for a truncated window) and
otherwise from inverse-CDF sampling on a log-spaced tabulation of the
restricted measure, with a per-cell power-law closed form for both the
cell masses and their inversion.

Randomness is organized in named streams: ``RngStream(root_seed, k)``
yields the k-th of 2**64 independent Philox substreams of a root seed, so
replications can be fanned out across workers while staying bit-stable.
By convention the jump draws and the Gaussian draws of one replication
live on distinct stream indices, which makes the two terminal factors
independent by construction.
"""

from __future__ import annotations

import csv
import dataclasses
import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergentIntegral, DivergentMass, HypothesisFailed
from .measures import (
    CompoundPoissonMeasure,
    JumpDensity,
    LevyMeasure,
    ZeroMeasure,
    gamma_nu,
)
from .processes import ProcessSpec, ProblemSpec
from .quadrature import integrate_segments

__all__ = [
    "DEFAULT_EPSILON",
    "RngStream",
    "JumpRecord",
    "JumpBatch",
    "sample_jump_size",
    "sample_compound_poisson",
    "sample_truncated_jumps",
    "sample_jump_batch",
    "sample_C_T",
    "sample_C_T_batch",
    "small_jump_variance",
    "sample_terminal_values",
    "dump_paths_csv",
]

# Default small-jump truncation threshold for infinite-activity measures.
DEFAULT_EPSILON = 1e-4

# Inner magnitude floor replacing a support edge at 0 when a finite-activity
# density is tabulated down to the origin.  Mass below it is O(floor^p) for
# some p > 0 and statistically invisible.
_EXACT_FLOOR = 1e-12

# Log-spaced knots per side for the inverse-CDF tabulation.
_TABLE_POINTS = 2048

# Tail mass (relative to the truncated intensity) considered negligible when
# hunting for the outer tabulation cutoff on an unbounded support.
_TAIL_FRACTION = 1e-13

_TWO64 = 1 << 64


def _check_uint64(value, name: str) -> int:
    v = int(value)
    if v != value or not 0 <= v < _TWO64:
        raise ValueError(f"{name} must be a 64-bit unsigned integer")
    return v


@dataclass(eq=False)
class RngStream:
    """One of 2**64 reproducible substreams attached to a root seed.

    The generated sequence is fully determined by the pair
    ``(root_seed, stream_index)``: the pair is packed into the 128-bit
    Philox key, so distinct indices give statistically independent
    streams and a fresh instance replays its stream from the start.
    """

    root_seed: int
    stream_index: int = 0

    def __post_init__(self):
        self.root_seed = _check_uint64(self.root_seed, "root_seed")
        self.stream_index = _check_uint64(self.stream_index, "stream_index")

    @functools.cached_property
    def generator(self) -> np.random.Generator:
        key = (self.stream_index << 64) | self.root_seed
        return np.random.Generator(np.random.Philox(key=key))


def _frozen_array(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class JumpRecord:
    """Jumps of one path: arrival times in (0, T] and matching sizes.

    ``truncation_epsilon`` is 0 for exact records (finite activity) and
    the truncation threshold otherwise; every stored size exceeds it in
    magnitude.  ``compensator_shift`` is the per-unit-time drift
    adjustment -integral of y over {epsilon < |y| <= 1}, so the
    compensated terminal jump contribution is
    ``sizes.sum() + horizon * compensator_shift``, matching the
    characteristic-function convention of the process layer.
    """

    times: np.ndarray
    sizes: np.ndarray
    truncation_epsilon: float
    compensator_shift: float

    def __post_init__(self):
        times = _frozen_array(self.times, "times")
        sizes = _frozen_array(self.sizes, "sizes")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "sizes", sizes)
        if times.shape != sizes.shape:
            raise ValueError("times and sizes must have equal length")
        if times.size and (np.any(times <= 0.0) or np.any(np.diff(times) < 0.0)):
            raise ValueError("times must be positive and sorted")
        eps = float(self.truncation_epsilon)
        if not (math.isfinite(eps) and eps >= 0.0):
            raise ValueError("truncation_epsilon must be finite and >= 0")
        if sizes.size and not np.all(np.abs(sizes) > eps):
            raise ValueError("every jump size must exceed the truncation threshold")
        if not math.isfinite(float(self.compensator_shift)):
            raise ValueError("compensator_shift must be finite")

    @property
    def count(self) -> int:
        return int(self.times.size)


@dataclass(frozen=True)
class JumpBatch:
    """Sizes of many paths at once, flattened, with per-path counts.

    The flat layout keeps the batch samplers fully vectorized; arrival
    times are omitted because every terminal-value and likelihood-ratio
    functional depends on the sizes only.
    """

    counts: np.ndarray
    sizes: np.ndarray
    truncation_epsilon: float
    compensator_shift: float

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64)
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "sizes", _frozen_array(self.sizes, "sizes"))
        if int(counts.sum()) != self.sizes.size:
            raise ValueError("counts must sum to the number of sizes")

    @property
    def n_paths(self) -> int:
        return int(self.counts.size)

    def path_ids(self) -> np.ndarray:
        return np.repeat(np.arange(self.n_paths), self.counts)

    def path_sums(self, values: np.ndarray | None = None) -> np.ndarray:
        """Per-path sums of ``values`` (default: the sizes themselves)."""
        weights = self.sizes if values is None else np.asarray(values, dtype=float)
        if weights.size == 0:
            return np.zeros(self.n_paths)
        return np.bincount(self.path_ids(), weights=weights, minlength=self.n_paths)


# ---------------------------------------------------------------------------
# Compensators and small-jump moments
# ---------------------------------------------------------------------------


def _annulus_edges(nu: LevyMeasure, lo_mag: float, hi_mag: float) -> list[list[float]]:
    """Sorted edge lists covering support ∩ {lo_mag < |y| < hi_mag}, per sign."""
    out = []
    for window in ((-hi_mag, -lo_mag), (lo_mag, hi_mag)):
        pts = set()
        for a, b in nu.support_segments():
            lo, hi = max(a, window[0]), min(b, window[1])
            if lo < hi:
                pts.update((lo, hi))
        if pts:
            lo, hi = min(pts), max(pts)
            pts.update(b for b in nu.breakpoints() if lo < b < hi)
        out.append(sorted(pts))
    return out


@functools.lru_cache(maxsize=256)
def _compensator_shift(nu: LevyMeasure, epsilon: float) -> float:
    """-integral of y over {epsilon < |y| <= 1} against nu."""
    if isinstance(nu, ZeroMeasure):
        return 0.0
    if epsilon == 0.0:
        return -gamma_nu(nu)
    if epsilon >= 1.0:
        return 0.0
    total = 0.0
    for edges in _annulus_edges(nu, epsilon, 1.0):
        res = integrate_segments(lambda y: y * nu.density(y), edges)
        if res.diverged:
            raise DivergentIntegral("truncated compensator diverged")
        total += res.value
    return -total


@functools.lru_cache(maxsize=256)
def small_jump_variance(nu: LevyMeasure, epsilon: float) -> float:
    """Per-unit-time variance of the discarded jumps: integral of y^2 over
    {0 < |y| <= epsilon}.  Finite for every valid Levy measure."""
    if epsilon < 0.0:
        raise ValueError("epsilon must be >= 0")
    if epsilon == 0.0 or isinstance(nu, ZeroMeasure):
        return 0.0
    total = 0.0
    for edges in _annulus_edges(nu, 0.0, epsilon):
        res = integrate_segments(
            lambda y: y * y * nu.density(y), edges, singular_at_zero=True
        )
        if res.diverged:
            raise DivergentIntegral("small-jump second moment diverged")
        total += res.value
    return max(total, 0.0)


# ---------------------------------------------------------------------------
# Inverse-CDF tabulation of a truncated measure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _SizeTable:
    """Per-cell power-law tabulation of a truncated measure, both sides merged.

    Within cell ``[lo, hi]`` the density is modeled as the power law fitted
    through its endpoint values, for which the cell mass and the inverse of
    the intra-cell cumulative are closed forms.
    """

    lo: np.ndarray
    hi: np.ndarray
    sign: np.ndarray
    va: np.ndarray
    slope1: np.ndarray  # fitted exponent + 1
    cum0: np.ndarray  # leading 0 followed by cumulative cell masses
    total: float


def _cell_arrays(nu, grid: np.ndarray, sgn: float):
    lo, hi = grid[:-1], grid[1:]
    va = np.maximum(nu.density(sgn * lo), 1e-300)
    vb = np.maximum(nu.density(sgn * hi), 1e-300)
    log_width = np.log(hi / lo)
    slope1 = 1.0 + np.log(vb / va) / log_width
    t = slope1 * log_width
    # mass = va*lo*log_width * expm1(t)/t, with the t -> 0 limit handled.
    small = np.abs(t) < 1e-8
    ratio = np.where(small, 1.0 + 0.5 * t, np.expm1(t) / np.where(small, 1.0, t))
    mass = va * lo * log_width * ratio
    return lo, hi, va, slope1, np.maximum(mass, 0.0)


def _outer_cutoff(nu: LevyMeasure, inner: float) -> float:
    reference = nu.mass_above(inner)
    r = max(1.0, 8.0 * inner)
    for _ in range(80):
        tail = nu.mass_above(r)
        if tail <= _TAIL_FRACTION * reference:
            break
        r *= 2.0
    return r


@functools.lru_cache(maxsize=64)
def _size_table(nu: LevyMeasure, epsilon: float) -> _SizeTable:
    parts = []
    total = 0.0
    cutoff = None
    for sgn in (-1.0, 1.0):
        edges = []
        for a, b in nu.support_segments():
            lo, hi = (a, b) if sgn > 0 else (-b, -a)
            if hi > epsilon:
                edges.append((max(lo, epsilon), hi))
        if not edges:
            continue
        m_lo = max(min(e[0] for e in edges), epsilon)
        m_hi = max(e[1] for e in edges)
        if m_lo <= 0.0:
            m_lo = max(epsilon, _EXACT_FLOOR)
        if not math.isfinite(m_hi):
            if cutoff is None:
                cutoff = _outer_cutoff(nu, max(epsilon, _EXACT_FLOOR))
            m_hi = cutoff
        if not m_lo < m_hi:
            continue
        grid = np.geomspace(m_lo, m_hi, _TABLE_POINTS)
        inner_bps = [
            abs(b)
            for b in nu.breakpoints()
            if b * sgn > 0 and m_lo < abs(b) < m_hi
        ]
        if inner_bps:
            grid = np.unique(np.concatenate([grid, np.asarray(inner_bps)]))
        lo, hi, va, slope1, mass = _cell_arrays(nu, grid, sgn)
        parts.append((lo, hi, np.full(lo.shape, sgn), va, slope1, mass))
        total += float(mass.sum())
    if not parts:
        empty = np.empty(0)
        return _SizeTable(empty, empty, empty, empty, empty, np.zeros(1), 0.0)
    lo, hi, sign, va, slope1, mass = (np.concatenate(a) for a in zip(*parts))
    cum0 = np.concatenate([[0.0], np.cumsum(mass)])
    return _SizeTable(lo, hi, sign, va, slope1, cum0, float(cum0[-1]))


def _draw_from_table(table: _SizeTable, n: int, gen: np.random.Generator) -> np.ndarray:
    if table.total <= 0.0:
        raise DivergentMass("truncated measure carries no mass to sample")
    u = gen.random(n) * table.total
    idx = np.clip(np.searchsorted(table.cum0, u, side="right") - 1, 0, table.lo.size - 1)
    target = u - table.cum0[idx]
    lo, va, s1 = table.lo[idx], table.va[idx], table.slope1[idx]
    base = va * lo
    straight = np.abs(s1) < 1e-12
    arg = np.clip(target * np.where(straight, 1.0, s1) / base, -1.0 + 1e-16, None)
    log_x = np.where(
        straight,
        target / base,
        np.log1p(arg) / np.where(straight, 1.0, s1),
    )
    mag = lo * np.exp(np.maximum(log_x, 0.0))
    mag = np.minimum(np.maximum(mag, lo * (1.0 + 4e-16)), table.hi[idx])
    return table.sign[idx] * mag


def _rejection_sizes(
    density: JumpDensity, epsilon: float, n: int, gen: np.random.Generator
) -> np.ndarray:
    out = np.empty(n)
    filled = 0
    acceptance = 0.5
    for _ in range(10_000):
        if filled >= n:
            break
        need = n - filled
        block = min(int(need / max(acceptance, 1e-6)) + 16, 10_000_000)
        draw = density.sample(gen, block)
        keep = draw[np.abs(draw) > epsilon]
        take = min(keep.size, need)
        out[filled : filled + take] = keep[:take]
        filled += take
        acceptance = max(keep.size / block, 1e-6)
    else:
        raise DivergentMass(
            f"rejection sampling above epsilon = {epsilon!r} makes no progress"
        )
    return out


def _draw_sizes(
    nu: LevyMeasure, epsilon: float, n: int, gen: np.random.Generator
) -> np.ndarray:
    if n == 0:
        return np.empty(0)
    if isinstance(nu, CompoundPoissonMeasure):
        return _rejection_sizes(nu.jump_density, epsilon, n, gen)
    return _draw_from_table(_size_table(nu, epsilon), n, gen)


# ---------------------------------------------------------------------------
# Public samplers
# ---------------------------------------------------------------------------


def sample_jump_size(density: JumpDensity, rng: RngStream) -> float:
    """One draw from a jump-size density, advancing the stream."""
    return float(density.sample(rng.generator, 1)[0])


def _arrival_times(horizon: float, n: int, gen: np.random.Generator) -> np.ndarray:
    # 1 - U maps [0, 1) draws onto (0, T] as the record contract requires.
    return np.sort(horizon * (1.0 - gen.random(n)))


def sample_compound_poisson(
    nu: LevyMeasure, horizon: float, rng: RngStream
) -> JumpRecord:
    """Exact jump record of one path of a finite-activity measure.

    The count is Poisson(total_mass * horizon), arrival times are uniform
    on (0, T] and sorted, and sizes are i.i.d. from the normalized jump
    density; truncation_epsilon is 0.
    """
    if not nu.is_finite_activity():
        raise DivergentMass("exact simulation needs a finite-activity measure")
    if horizon < 0.0:
        raise ValueError("horizon must be >= 0")
    gen = rng.generator
    lam = nu.total_mass()
    n = int(gen.poisson(lam * horizon)) if lam * horizon > 0.0 else 0
    times = _arrival_times(horizon, n, gen)
    sizes = _draw_sizes(nu, 0.0, n, gen)
    keep = sizes != 0.0
    if not np.all(keep):
        times, sizes = times[keep], sizes[keep]
    return JumpRecord(times, sizes, 0.0, _compensator_shift(nu, 0.0))


def sample_truncated_jumps(
    nu: LevyMeasure, epsilon: float, horizon: float, rng: RngStream
) -> JumpRecord:
    """Jump record of one path restricted to sizes with |y| > epsilon.

    The count is Poisson(mass_above(epsilon) * horizon) and the stored
    compensator shift is -integral of y over {epsilon < |y| <= 1}, the
    drift adjustment that replaces the small-jump compensator.
    """
    if epsilon < 0.0:
        raise ValueError("epsilon must be >= 0")
    if epsilon == 0.0:
        if not nu.is_finite_activity():
            raise DivergentMass(
                "epsilon = 0 needs a finite-activity measure; pass epsilon > 0"
            )
        return sample_compound_poisson(nu, horizon, rng)
    if horizon < 0.0:
        raise ValueError("horizon must be >= 0")
    gen = rng.generator
    lam = nu.mass_above(epsilon)
    n = int(gen.poisson(lam * horizon)) if lam * horizon > 0.0 else 0
    times = _arrival_times(horizon, n, gen)
    sizes = _draw_sizes(nu, epsilon, n, gen)
    return JumpRecord(times, sizes, epsilon, _compensator_shift(nu, epsilon))


def sample_jump_batch(
    nu: LevyMeasure,
    horizon: float,
    n_paths: int,
    rng: RngStream,
    epsilon: float = 0.0,
) -> JumpBatch:
    """Vectorized batch of jump sizes for many paths, no arrival times.

    Draw layout differs from the per-record samplers (all counts first,
    then one flat block of sizes), so a batch and a loop of records on
    the same stream do not replay each other; each is deterministic on
    its own.
    """
    if n_paths <= 0:
        raise ValueError("n_paths must be positive")
    if epsilon < 0.0:
        raise ValueError("epsilon must be >= 0")
    if epsilon == 0.0 and not nu.is_finite_activity():
        raise DivergentMass(
            "epsilon = 0 needs a finite-activity measure; pass epsilon > 0"
        )
    gen = rng.generator
    lam = nu.mass_above(epsilon)
    if lam * horizon > 0.0:
        counts = gen.poisson(lam * horizon, n_paths)
    else:
        counts = np.zeros(n_paths, dtype=np.int64)
    sizes = _draw_sizes(nu, epsilon, int(counts.sum()), gen)
    if epsilon == 0.0 and sizes.size and np.any(sizes == 0.0):
        keep = sizes != 0.0
        counts = counts - np.bincount(
            np.repeat(np.arange(n_paths), counts)[~keep], minlength=n_paths
        )
        sizes = sizes[keep]
    return JumpBatch(counts, sizes, epsilon, _compensator_shift(nu, epsilon))


def sample_C_T_batch(spec: ProblemSpec, rng: RngStream, n: int) -> np.ndarray:
    """n independent draws of the continuous log-likelihood part C_T.

    C_T is exactly N(-xi^2/2, xi^2); no path discretization is involved.
    """
    if spec.sigma_mismatch():
        raise HypothesisFailed("sigma mismatch")
    if spec.vol_class() == "degenerate":
        raise HypothesisFailed("sigma^2 vanishes on part of [0, T]")
    xi_sq = spec.xi_sq()
    if not math.isfinite(xi_sq):
        raise HypothesisFailed("xi^2 infinite")
    return -0.5 * xi_sq + math.sqrt(xi_sq) * rng.generator.standard_normal(n)


def sample_C_T(spec: ProblemSpec, rng: RngStream) -> float:
    """One draw of C_T; consecutive calls walk the stream forward."""
    return float(sample_C_T_batch(spec, rng, 1)[0])


def sample_terminal_values(
    process: ProcessSpec,
    horizon: float,
    n_paths: int,
    *,
    rng_jumps: RngStream,
    rng_gauss: RngStream | None = None,
    epsilon: float | None = None,
    gaussian_correction: bool = False,
) -> np.ndarray:
    """Terminal values X_T of one process: drift integral + Gaussian part
    + truncated jump sum + horizon * compensator shift.

    epsilon defaults to 0 for finite-activity measures (exact) and to
    DEFAULT_EPSILON otherwise.  With ``gaussian_correction`` the discarded
    small jumps are re-injected as an independent centered normal with
    their exact variance; the flag is off by default so the estimator
    stays a pure truncation proxy.
    """
    if epsilon is None:
        epsilon = 0.0 if process.levy.is_finite_activity() else DEFAULT_EPSILON
    batch = sample_jump_batch(process.levy, horizon, n_paths, rng_jumps, epsilon)
    out = (
        batch.path_sums()
        + horizon * batch.compensator_shift
        + process.drift.integral(0.0, horizon)
    )
    variance = process.vol_sq.integral(0.0, horizon)
    if gaussian_correction and epsilon > 0.0:
        variance += horizon * small_jump_variance(process.levy, epsilon)
    if variance > 0.0:
        if rng_gauss is None:
            raise ValueError("rng_gauss is required when a Gaussian part is present")
        out = out + math.sqrt(variance) * rng_gauss.generator.standard_normal(n_paths)
    return out


def dump_paths_csv(records, destination) -> None:
    """Write jump records as CSV rows (path_id, jump_time, jump_size).

    The header row is always written; path_id is the 0-based index of the
    record in the sequence.  destination is a path or an open text file.
    """

    def _write(handle):
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["path_id", "jump_time", "jump_size"])
        for path_id, record in enumerate(records):
            for t, y in zip(record.times, record.sizes):
                writer.writerow([path_id, repr(float(t)), repr(float(y))])

    if hasattr(destination, "write"):
        _write(destination)
    else:
        with open(destination, "w", newline="") as handle:
            _write(handle)
