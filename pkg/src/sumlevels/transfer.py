"""Discretized Farey-map operators, long density runs, and asymptotic series.

Densities live on a node grid over [0,1] with piecewise-linear interpolation.
The Lebesgue-density operator (d-basis) is iterated for measure computations;
the dual operator (h-basis) only for the monotonicity and shape checks, where
values stay bounded.

Two node layouts are supported.  The uniform layout is the accuracy reference
at small iteration counts.  Long runs use the graded layout, geometric from
2**-40 to 1: the interesting dynamics happen ever closer to the indifferent
fixed point at 0 (at scale ~1/n after n steps), which a uniform grid stops
resolving near n = M.  Both layouts place a node exactly at 1/2.

Recorded measures are normalized by the simultaneously recorded total mass.
The true operator preserves mass exactly, but its discretization has a top
eigenvalue slightly off 1, which compounds over 10^6 steps; since the operator
is linear, dividing each recorded value by the current mass is equivalent to
renormalizing the density at every step.

Grid evaluations of both operators only need the two branch preimages of each
node, so a node-indexed gather with fixed weights makes one application a
handful of vector operations; the long runs use a compiled kernel that also
records the sub-interval integral and the total mass at every step.

Checkpoint container (versioned, little-endian):

    magic    4 bytes  b"SLCK"
    version  u32      currently 2
    M        u64      grid size (M+1 nodes)
    n        u64      number of operator applications already performed
    basis    u8       0 = d-basis, 1 = h-basis
    layout   u8       0 = uniform, 1 = graded
    pad      6 bytes  zero
    values   (M+1) * f64

A measure series recorded alongside a run is stored next to the checkpoint as
`<checkpoint>.series.npy` (float64, entry k is the level-(k+1) measure).
"""

from __future__ import annotations

import math
import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numba import njit, prange

from .errors import CheckpointError, DomainError
from .sumlevel import MeasureValue

DEFAULT_GRID = 1 << 16
DEFAULT_CHECKPOINT_EVERY = 10_000

#: Smallest positive node of the graded layout is 2**-GRADED_MIN_EXP.
GRADED_MIN_EXP = 40

#: Slack distinguishing rounding noise from genuine violations in grid comparisons.
MONOTONE_TOLERANCE = 1e-10

_CKPT_MAGIC = b"SLCK"
_CKPT_VERSION = 2
_CKPT_HEADER = struct.Struct("<4sIQQBB6x")

LAYOUTS = ("uniform", "graded")

_node_cache: dict[tuple[str, int], tuple[np.ndarray, int]] = {}


def grid_nodes(M: int, layout: str = "uniform") -> tuple[np.ndarray, int]:
    """Node abscissae for a layout and the index of the node at exactly 1/2."""
    if layout not in LAYOUTS:
        raise DomainError(f"unknown layout {layout!r}")
    if M < 2 or M % 2:
        raise DomainError("grid size M must be even and >= 2")
    key = (layout, M)
    if key not in _node_cache:
        if layout == "uniform":
            nodes = np.linspace(0.0, 1.0, M + 1)
            half = M // 2
        else:
            geo = np.logspace(-GRADED_MIN_EXP, 0, M, base=2.0)
            j = int(np.searchsorted(geo, 0.5))
            if abs(geo[j - 1] - 0.5) < abs(geo[j] - 0.5):
                j -= 1
            geo[j] = 0.5  # snap the nearest node so [1/2, 1] has exact endpoints
            nodes = np.concatenate(([0.0], geo))
            half = j + 1
        _node_cache[key] = (nodes, half)
    return _node_cache[key]


@dataclass
class DensityGrid:
    """Node values of a density on a grid, read as a linear interpolant."""

    values: np.ndarray
    basis: str  # "d": density w.r.t. Lebesgue; "h": density w.r.t. the invariant measure
    layout: str = "uniform"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1 or self.values.size < 3:
            raise DomainError("density grids need at least 3 nodes")
        if (self.values.size - 1) % 2:
            raise DomainError("grid size M must be even so that x = 1/2 is a node")
        if self.basis not in ("d", "h"):
            raise DomainError(f"unknown basis tag {self.basis!r}")
        if self.layout not in LAYOUTS:
            raise DomainError(f"unknown layout {self.layout!r}")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise DomainError("density values must be finite and non-negative")

    @property
    def M(self) -> int:
        return self.values.size - 1

    @property
    def nodes(self) -> np.ndarray:
        return grid_nodes(self.M, self.layout)[0]

    def __call__(self, x: np.ndarray | float) -> np.ndarray | float:
        return np.interp(x, self.nodes, self.values)


def uniform_grid(M: int = DEFAULT_GRID, basis: str = "d") -> DensityGrid:
    return DensityGrid(np.ones(M + 1), basis)


def identity_grid(M: int = DEFAULT_GRID) -> DensityGrid:
    """phi(x) = x, the Lebesgue density of the invariant measure's reciprocal weight."""
    return DensityGrid(np.linspace(0.0, 1.0, M + 1), "h")


def pf_apply(grid: DensityGrid) -> DensityGrid:
    """One step of the Lebesgue-density (Perron-Frobenius) operator.

    (Lf)(x) = [f(x/(1+x)) + f(1/(1+x))] / (1+x)^2.
    """
    if grid.basis != "d":
        raise DomainError("pf_apply acts on d-basis grids")
    x = grid.nodes
    new = (grid(x / (1.0 + x)) + grid(1.0 / (1.0 + x))) / (1.0 + x) ** 2
    return DensityGrid(new, "d", grid.layout)


def dual_apply(grid: DensityGrid) -> DensityGrid:
    """One step of the dual operator: (Tg)(x) = [g(u0(x)) + x*g(u1(x))] / (1+x)."""
    if grid.basis != "h":
        raise DomainError("dual_apply acts on h-basis grids")
    x = grid.nodes
    new = (grid(x / (1.0 + x)) + x * grid(1.0 / (1.0 + x))) / (1.0 + x)
    return DensityGrid(new, "h", grid.layout)


def grid_integral(grid: DensityGrid, lo: float = 0.0, hi: float = 1.0) -> float:
    """Trapezoid integral of the interpolant between two grid nodes (exact for it)."""
    nodes = grid.nodes
    i, j = int(np.searchsorted(nodes, lo)), int(np.searchsorted(nodes, hi))
    if not (0 <= i < j <= grid.M) or nodes[i] != lo or nodes[j] != hi:
        raise DomainError("integration bounds must be grid nodes")
    return float(np.trapezoid(grid.values[i:j + 1], nodes[i:j + 1]))


def _simpson_weights(M: int, lo_node: int) -> np.ndarray:
    """Composite-Simpson weights for the uniform node range [lo_node/M, 1]."""
    if (M - lo_node) % 2:
        raise DomainError("Simpson range needs an even number of cells")
    w = np.zeros(M + 1)
    w[lo_node:M + 1:2] = 2.0
    w[lo_node + 1:M:2] = 4.0
    w[lo_node] = w[M] = 1.0
    return w / (3.0 * M)


def _trapezoid_weights(nodes: np.ndarray, lo_node: int) -> np.ndarray:
    w = np.zeros(nodes.size)
    d = np.diff(nodes[lo_node:])
    w[lo_node:lo_node + d.size] += d / 2.0
    w[lo_node + 1:] += d / 2.0
    return w


def _quadrature_weights(M: int, layout: str) -> tuple[np.ndarray, np.ndarray]:
    """(weights over [1/2,1], weights over [0,1]) for the layout."""
    nodes, half = grid_nodes(M, layout)
    if layout == "uniform":
        if M % 4:
            raise DomainError("uniform grid size must be a multiple of 4 for quadrature")
        return _simpson_weights(M, half), _simpson_weights(M, 0)
    return _trapezoid_weights(nodes, half), _trapezoid_weights(nodes, 0)


@njit(parallel=True, cache=True)
def _iterate_kernel(f, g, i0, a0, b0, i1, a1, b1, w_half, w_mass,
                    iters, half_series, mass_series, offset):  # pragma: no cover
    n = f.shape[0]
    for k in range(iters):
        for j in prange(n):
            g[j] = f[i0[j]] * a0[j] + f[i0[j] + 1] * b0[j] + f[i1[j]] * a1[j] + f[i1[j] + 1] * b1[j]
        for j in range(n):
            f[j] = g[j]
        s = 0.0
        for j in range(n):  # serial reductions: identical for any thread count
            s += f[j] * w_half[j]
        half_series[offset + k] = s
        s = 0.0
        for j in range(n):
            s += f[j] * w_mass[j]
        mass_series[offset + k] = s
    return f


def _gather_tables(M: int, layout: str):
    nodes, _ = grid_nodes(M, layout)
    pref = 1.0 / (1.0 + nodes) ** 2
    tables = []
    for u in (nodes / (1.0 + nodes), 1.0 / (1.0 + nodes)):
        idx = np.clip(np.searchsorted(nodes, u, side="right") - 1, 0, M - 1)
        w = (u - nodes[idx]) / (nodes[idx + 1] - nodes[idx])
        tables += [idx.astype(np.int64), (1.0 - w) * pref, w * pref]
    return tuple(tables)


def _run_series(values: np.ndarray, M: int, layout: str, iters: int,
                half_series: np.ndarray, mass_series: np.ndarray,
                offset: int) -> np.ndarray:
    i0, a0, b0, i1, a1, b1 = _gather_tables(M, layout)
    w_half, w_mass = _quadrature_weights(M, layout)
    g = np.empty_like(values)
    return _iterate_kernel(values, g, i0, a0, b0, i1, a1, b1, w_half, w_mass,
                           iters, half_series, mass_series, offset)


def lambda_operator(n: int, M: int = DEFAULT_GRID, layout: str = "uniform") -> MeasureValue:
    """Measure of the level-n sum-level set by density iteration.

    Iterates the Lebesgue-density operator n-1 times from the flat density and
    integrates the result over [1/2, 1], normalized by the total mass of the
    iterate.
    """
    series = lambda_operator_series(n, M, layout=layout)
    return MeasureValue(approx=float(series[n - 1]), method="operator")


def lambda_operator_series(n_max: int, M: int = DEFAULT_GRID,
                           layout: str = "uniform",
                           checkpoint_path: str | os.PathLike | None = None,
                           checkpoint_every: int = DEFAULT_CHECKPOINT_EVERY) -> np.ndarray:
    """Measures of levels 1..n_max in one density run; entry k-1 is level k.

    Long runs (n_max beyond ~M) should use the graded layout; see the module
    docstring.  With a checkpoint path the density state and the series
    recorded so far are persisted every `checkpoint_every` steps and the run
    resumes from whatever is already on disk.
    """
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    if layout not in LAYOUTS:
        raise DomainError(f"unknown layout {layout!r}")
    done = 0
    values = np.ones(M + 1)
    series = np.empty(n_max)
    series[0] = 0.5  # flat density: mass 1, integral 1/2 over [1/2, 1]
    if checkpoint_path is not None:
        ckpt = Path(checkpoint_path)
        if ckpt.exists():
            state = load_checkpoint(ckpt)
            if state.M != M:
                raise CheckpointError(f"checkpoint grid M={state.M} does not match requested M={M}")
            if state.basis != "d":
                raise CheckpointError("checkpoint holds an h-basis state, expected d-basis")
            if state.layout != layout:
                raise CheckpointError(f"checkpoint layout {state.layout!r} does not match "
                                      f"requested {layout!r}")
            saved = np.load(str(ckpt) + ".series.npy")
            if saved.size != state.n + 1:
                raise CheckpointError("checkpoint series length does not match its state")
            done = min(state.n, n_max - 1)
            values = state.values.copy()
            series[:min(saved.size, n_max)] = saved[:n_max]
            if state.n >= n_max - 1:
                return series
    half = np.empty(n_max)
    mass = np.empty(n_max)
    remaining = n_max - 1 - done
    while remaining > 0:
        chunk = min(remaining, checkpoint_every)
        values = _run_series(values, M, layout, chunk, half, mass, offset=done + 1)
        series[done + 1:done + 1 + chunk] = (half[done + 1:done + 1 + chunk]
                                             / mass[done + 1:done + 1 + chunk])
        done += chunk
        remaining -= chunk
        if checkpoint_path is not None:
            save_checkpoint(checkpoint_path, DensityGrid(values, "d", layout), n=done)
            np.save(str(checkpoint_path) + ".series.npy", series[:done + 1])
    return series


@dataclass(frozen=True)
class CheckpointState:
    M: int
    n: int
    basis: str
    layout: str
    values: np.ndarray


def save_checkpoint(path: str | os.PathLike, grid: DensityGrid, n: int) -> None:
    header = _CKPT_HEADER.pack(_CKPT_MAGIC, _CKPT_VERSION, grid.M, n,
                               0 if grid.basis == "d" else 1,
                               LAYOUTS.index(grid.layout))
    tmp = Path(str(path) + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(header)
        fh.write(grid.values.astype("<f8").tobytes())
    os.replace(tmp, path)


def load_checkpoint(path: str | os.PathLike) -> CheckpointState:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if len(raw) < _CKPT_HEADER.size:
        raise CheckpointError(f"checkpoint {path} is truncated")
    magic, version, M, n, basis, layout = _CKPT_HEADER.unpack_from(raw)
    if magic != _CKPT_MAGIC:
        raise CheckpointError(f"{path} is not a sumlevels checkpoint")
    if version != _CKPT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    if basis > 1 or layout > 1:
        raise CheckpointError(f"checkpoint {path} carries unknown basis or layout tags")
    values = np.frombuffer(raw, dtype="<f8", offset=_CKPT_HEADER.size)
    if values.size != M + 1:
        raise CheckpointError(f"checkpoint {path} holds {values.size} values, expected {M + 1}")
    return CheckpointState(M=int(M), n=int(n), basis="d" if basis == 0 else "h",
                           layout=LAYOUTS[layout], values=values.astype(np.float64))


# ---------------------------------------------------------------------------
# Asymptotics

@dataclass(frozen=True)
class AsymptoticSeries:
    entries: tuple[tuple[int, float], ...]
    law_tag: str  # "lambda_Cn" | "cesaro" | "wandering" | "return_seq" | "ratio_to_limit"


def wandering_rate(n: int) -> float:
    """Invariant measure of the first n pullbacks of the base interval: log(n+1)."""
    if n < 0:
        raise DomainError(f"wandering rate needs n >= 0, got {n}")
    return math.log(n + 1)


def return_sequence(n: int) -> float:
    """Normalizing sequence n / log(n+1) for Cesaro sums of dual iterates."""
    if n < 1:
        raise DomainError(f"return sequence needs n >= 1, got {n}")
    return n / math.log(n + 1)


def cesaro_series(lambdas: np.ndarray, sample_ns: list[int]) -> AsymptoticSeries:
    """Partial sums of level measures at sampled indices."""
    sums = np.cumsum(lambdas)
    entries = []
    for n in sample_ns:
        if not (1 <= n <= lambdas.size):
            raise DomainError(f"sample index {n} outside the provided series")
        entries.append((n, float(sums[n - 1])))
    return AsymptoticSeries(tuple(entries), "cesaro")


def cesaro_ratio(lambdas: np.ndarray, sample_ns: list[int]) -> AsymptoticSeries:
    """Ratio of the partial sums to n / log2(n) at sampled indices."""
    sums = cesaro_series(lambdas, sample_ns)
    entries = tuple((n, v / (n / math.log2(n))) for n, v in sums.entries)
    return AsymptoticSeries(entries, "ratio_to_limit")


# ---------------------------------------------------------------------------
# Shape checks for the dual iterates

@dataclass(frozen=True)
class MonotoneReport:
    passed: bool
    n_checked: int
    M: int
    first_violation: tuple[int, int, str] | None  # (iteration, node, kind)


def monotone_class_check(n_max: int, M: int = 1 << 14,
                         tol: float = MONOTONE_TOLERANCE) -> MonotoneReport:
    """Iterate the dual operator from g(x) = x and verify shape invariants.

    At every step the iterate must strictly decrease at each node of [1/2, 1],
    stay non-decreasing across [0, 1], and keep non-positive second differences
    (concavity), all up to the rounding slack `tol`.
    """
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    grid = identity_grid(M)
    half = M // 2
    for it in range(1, n_max + 1):
        nxt = dual_apply(grid)
        decrease = grid.values[half:] - nxt.values[half:]
        bad = np.flatnonzero(decrease <= -tol)
        if bad.size:
            return MonotoneReport(False, it, M, (it, half + int(bad[0]), "not-decreasing"))
        diffs = np.diff(nxt.values)
        bad = np.flatnonzero(diffs < -tol)
        if bad.size:
            return MonotoneReport(False, it, M, (it, int(bad[0]), "not-monotone"))
        second = np.diff(diffs)
        bad = np.flatnonzero(second > tol)
        if bad.size:
            return MonotoneReport(False, it, M, (it, 1 + int(bad[0]), "not-concave"))
        grid = nxt
    return MonotoneReport(True, n_max, M, None)
