"""
Topology of super-level sets estimated from samples.

* :func:`estimate_level_homology` computes the image of the homology of the
  sample filtered at ``L + eps`` in that of the sample filtered at
  ``L - eps``.
* :func:`recover_manifold_homology` scans levels downward for the first
  stable top-degree class and reports the homology one level below it.
* :func:`estimate_ph` builds the persistence diagram of the estimate over a
  grid of levels spaced ``2 eps`` apart.
* :func:`grid_ph_oracle` is the reference diagram of a known function on a
  regular grid.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Literal, Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .complexes import DEFAULT_BUDGET, build_rips, vertex_level_index
from .errors import CapacityExceeded, NoStableLevel
from .homology import betti, image_rank
from .kernels import KernelSpec, LabeledSample, Mode, _as_sample, sample_values
from .linalg import RATIONALS, Field
from .persistence import PersistenceDiagram, rips_persistence

ASSUMPTIONS = (
    "levels within 2*epsilon of L are not critical values (unchecked)",
    "the target function is tame (unchecked)",
    "the levels L - epsilon and L + epsilon are epsilon-regular (unchecked)",
)
MANIFOLD_ASSUMPTIONS = (
    "the manifold is closed, connected and orientable (unchecked)",
    "the noise density gap exceeds 8*epsilon (unchecked)",
)
EXACT_POINT_LIMIT = 40


@dataclass
class LevelEstimate:
    level: float
    epsilon: float
    r: float
    betti_image: list[int]
    betti_upper: list[int]
    betti_lower: list[int]
    n_upper: int
    n_lower: int
    empty_level: bool = False
    method: str = "persistence"
    assumptions: tuple = ASSUMPTIONS
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "epsilon": self.epsilon,
            "r": self.r,
            "betti_image": list(self.betti_image),
            "betti_upper": list(self.betti_upper),
            "betti_lower": list(self.betti_lower),
            "n_upper": self.n_upper,
            "n_lower": self.n_lower,
            "empty_level": self.empty_level,
            "method": self.method,
            "assumptions": list(self.assumptions),
            "warnings": list(self.warnings),
        }


@dataclass
class ManifoldRecovery:
    i_star: int
    level_used: float
    betti: list[int]
    trace: list[tuple[int, float, int]]
    l_max: float
    epsilon: float
    r: float
    assumptions: tuple = ASSUMPTIONS + MANIFOLD_ASSUMPTIONS

    def to_dict(self) -> dict:
        return {
            "i_star": self.i_star,
            "level_used": self.level_used,
            "betti": list(self.betti),
            "trace": [{"i": i, "level": lv, "beta_m": b} for i, lv, b in self.trace],
            "l_max": self.l_max,
            "epsilon": self.epsilon,
            "r": self.r,
            "assumptions": list(self.assumptions),
        }


def _rank_counts(diagrams: Sequence[PersistenceDiagram], born_at_least: float, alive_at: float) -> list[int]:
    return [dg.alive(born_at_least, alive_at) for dg in diagrams]


def estimate_level_homology(
    data,
    L: float,
    epsilon: float,
    r: float,
    k_max: int = 2,
    mode: Mode = "density",
    kernel: Optional[KernelSpec] = None,
    method: Literal["auto", "exact", "persistence"] = "auto",
    values: Optional[ArrayLike] = None,
    field: Field = RATIONALS,
    budget: int = DEFAULT_BUDGET,
    threads: int = 1,
) -> LevelEstimate:
    """Ranks of ``H_k(upper) -> H_k(lower)`` for ``k < k_max``.

    Parameters
    ----------
    data : LabeledSample or (n, d) array
    L, epsilon : float
        The two filtered samples keep points whose estimate is at least
        ``L + epsilon`` and ``L - epsilon`` respectively.
    r : float
        Rips radius (also the kernel bandwidth).
    k_max : int
        Top simplex dimension; ranks are reported for degrees below it.
    method : {"auto", "exact", "persistence"}
        ``exact`` uses harmonic representatives over the rationals.
        ``persistence`` reads the ranks off a two-level Z/2 persistence
        computation, which never stores top-dimensional simplexes. ``auto``
        picks ``exact`` for small samples.
    values : array, optional
        Precomputed estimates at the sample points.
    field : Field
        Field for the Betti numbers of the two complexes in the exact path.

    Notes
    -----
    An empty upper sample is not an error: every rank is zero and
    ``empty_level`` is set.
    """
    data = _as_sample(data)
    if not r > 0:
        raise ValueError("radius r must be positive")
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    notes = []
    if not 0 < epsilon < L / 2:
        msg = f"epsilon={epsilon} outside the recommended range (0, L/2) for L={L}"
        warnings.warn(msg, stacklevel=2)
        notes.append(msg)
    kernel = kernel or KernelSpec(dimension=data.d)
    if values is None:
        values = sample_values(data, r, kernel, mode, threads=threads)
    values = np.asarray(values, dtype=float)
    with np.errstate(invalid="ignore"):
        upper = np.flatnonzero(values >= L + epsilon)
        lower_only = np.flatnonzero((values >= L - epsilon) & ~(values >= L + epsilon))
    n_up, n_low = upper.size, upper.size + lower_only.size
    zeros = [0] * k_max
    if n_up == 0:
        b_low = zeros
        if n_low:
            pts = data.points[lower_only]
            dg = rips_persistence(pts, np.zeros(n_low, np.int64), [L - epsilon], r, k_max, budget)
            b_low = [len(d.essential()) for d in dg][:k_max]
        return LevelEstimate(L, epsilon, r, zeros, zeros, b_low, 0, n_low, True, method, warnings=notes)
    if method == "auto":
        method = "exact" if n_low <= EXACT_POINT_LIMIT else "persistence"
    pts = data.points[np.concatenate([upper, lower_only])]
    if method == "exact":
        c2 = build_rips(pts, r, k_max, budget)
        c1 = build_rips(pts[:n_up], r, k_max, budget)
        c2 = c2.with_prefix(c1)
        # ranks in degree k need (k+1)-simplexes, which exist up to k_max
        ks = range(k_max)
        img = [image_rank(c1, c2, k) for k in ks]
        b_up = [betti(c1, k, field) for k in ks]
        b_low = [betti(c2, k, field) for k in ks]
    elif method == "persistence":
        if epsilon == 0:
            dg = rips_persistence(pts, np.zeros(n_low, np.int64), [L], r, k_max, budget)
            b_up = b_low = img = [len(d.essential()) for d in dg][:k_max]
        else:
            lvl = np.r_[np.zeros(n_up, np.int64), np.ones(n_low - n_up, np.int64)]
            dg = rips_persistence(pts, lvl, [L + epsilon, L - epsilon], r, k_max, budget)[:k_max]
            b_up = [int(np.sum(d.births == L + epsilon)) for d in dg]
            b_low = [len(d.essential()) for d in dg]
            img = [int(np.sum((d.births == L + epsilon) & ~np.isfinite(d.deaths))) for d in dg]
    else:
        raise ValueError(f"unknown method {method!r}")
    return LevelEstimate(L, epsilon, r, list(img), list(b_up), list(b_low), n_up, n_low, False, method, warnings=notes)


def _l_max(values: NDArray, epsilon: float) -> float:
    top = float(np.nanmax(values))
    return math.ceil(top / (2.0 * epsilon)) * 2.0 * epsilon


def default_epsilon(values: ArrayLike) -> float:
    """``(max - min) / 50`` of the finite estimates."""
    v = np.asarray(values, dtype=float)
    v = v[np.isfinite(v)]
    spread = float(v.max() - v.min()) if v.size else 0.0
    return spread / 50.0 if spread > 0 else 1.0


def _staircase(values: NDArray, top: float, step: float) -> NDArray:
    """Levels ``top, top - step, ...`` down to the first one at or below every value."""
    finite = values[np.isfinite(values)]
    low = float(finite.min()) if finite.size else top
    count = max(int(math.ceil((top - low) / step - 1e-9)), 0) + 1
    levels = top - step * np.arange(count + 1)
    # guard against rounding: stop at the first level below the minimum
    cut = np.flatnonzero(levels <= low)
    return levels[: cut[0] + 1] if cut.size else levels


def recover_manifold_homology(
    data,
    epsilon: float,
    m: int,
    r: float,
    k_max: Optional[int] = None,
    kernel: Optional[KernelSpec] = None,
    values: Optional[ArrayLike] = None,
    budget: int = DEFAULT_BUDGET,
    threads: int = 1,
) -> ManifoldRecovery:
    """Homology of a noisy manifold of dimension ``m`` from a density estimate.

    Levels ``L_i = L_max - 2 i eps`` are scanned for ``i >= 1`` until the
    image rank in degree ``m`` first equals one; the reported ranks are
    those of the following level ``i* = i + 1``. ``L_max`` is the largest
    estimate rounded up to a multiple of ``2 eps``.

    Raises
    ------
    NoStableLevel
        When no level reaches a rank of one. The exception carries the trace.
    """
    data = _as_sample(data)
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if not r > 0:
        raise ValueError("radius r must be positive")
    k_max = m + 1 if k_max is None else k_max
    if k_max < m + 1:
        raise ValueError(f"k_max must be at least m + 1 = {m + 1}")
    kernel = kernel or KernelSpec(dimension=data.d)
    if values is None:
        values = sample_values(data, r, kernel, "density", threads=threads)
    values = np.asarray(values, dtype=float)
    l_max = _l_max(values, epsilon)
    # grid of half steps: L_i + eps is index 2i, L_i - eps is index 2i + 2
    grid = _staircase(values, l_max + epsilon, epsilon)
    if grid.size % 2 == 0:
        grid = np.r_[grid, grid[-1] - epsilon]
    n_levels = (grid.size - 1) // 2 - 1
    diagrams = rips_persistence(data.points, vertex_level_index(values, grid), grid, r, k_max, budget)[: m + 1]

    def ranks(i, degrees):
        return [diagrams[k].alive(grid[2 * i], grid[2 * i + 2]) if 2 * i + 2 < grid.size else 0 for k in degrees]

    trace = []
    for i in range(1, n_levels + 1):
        b = ranks(i, [m])[0]
        trace.append((i, float(l_max - 2 * i * epsilon), b))
        if b == 1:
            i_star = i + 1
            if 2 * i_star + 2 >= grid.size:
                grid = np.r_[grid, grid[-1] - epsilon, grid[-1] - 2 * epsilon]
            return ManifoldRecovery(
                i_star,
                float(l_max - 2 * i_star * epsilon),
                ranks(i_star, range(m + 1)),
                trace,
                l_max,
                epsilon,
                r,
            )
    raise NoStableLevel(f"no level among {n_levels} has a rank-one image in degree {m}", trace)


def estimate_ph(
    data,
    epsilon: Optional[float],
    r: float,
    k_max: Optional[int] = None,
    mode: Mode = "density",
    kernel: Optional[KernelSpec] = None,
    values: Optional[ArrayLike] = None,
    budget: int = DEFAULT_BUDGET,
    threads: int = 1,
) -> list[PersistenceDiagram]:
    """Persistence diagrams of the estimate over levels spaced ``2 eps`` apart.

    Parameters
    ----------
    epsilon : float or None
        ``None`` uses :func:`default_epsilon` of the estimates.
    k_max : int, optional
        Top simplex dimension (default: ambient dimension). Diagrams are
        returned for degrees ``0..k_max-1``.
    """
    data = _as_sample(data)
    if not r > 0:
        raise ValueError("radius r must be positive")
    kernel = kernel or KernelSpec(dimension=data.d)
    k_max = data.d if k_max is None else k_max
    if values is None:
        values = sample_values(data, r, kernel, mode, threads=threads)
    values = np.asarray(values, dtype=float)
    if epsilon is None:
        epsilon = default_epsilon(values)
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if not np.any(np.isfinite(values)):
        return [PersistenceDiagram(k) for k in range(max(k_max, 1))]
    levels = _staircase(values, _l_max(values, epsilon), 2.0 * epsilon)
    return filtered_diagrams(data.points, values, levels, r, k_max, budget)


def filtered_diagrams(points, values, levels, r, k_max, budget=DEFAULT_BUDGET) -> list[PersistenceDiagram]:
    """Diagrams of degrees ``0..max(k_max-1, 0)`` for vertex values cut at ``levels``."""
    diagrams = rips_persistence(points, vertex_level_index(values, levels), levels, r, max(k_max, 1), budget)
    return diagrams[: max(k_max, 1)]


def grid_points(bbox: Sequence[tuple[float, float]], spacing: float) -> NDArray:
    """Regular grid over ``bbox`` (one ``(lo, hi)`` pair per axis), C order."""
    if not spacing > 0:
        raise ValueError("spacing must be positive")
    axes = [lo + spacing * np.arange(int(math.floor((hi - lo) / spacing + 1e-9)) + 1) for lo, hi in bbox]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([g.ravel() for g in mesh])


def grid_ph_oracle(
    f: Callable[[NDArray], NDArray],
    bbox: Sequence[tuple[float, float]],
    spacing: float,
    epsilon: Optional[float] = None,
    k_max: Optional[int] = None,
    budget: int = DEFAULT_BUDGET,
) -> list[PersistenceDiagram]:
    """Reference diagrams of ``f`` sampled on a regular grid.

    Grid neighbours, including diagonal ones in the plane, are joined by
    edges. With ``epsilon=None`` every distinct function value is a level;
    otherwise levels are spaced ``2 eps`` apart as in :func:`estimate_ph`.
    """
    pts = grid_points(bbox, spacing)
    if pts.shape[0] > budget:
        raise CapacityExceeded(budget, f"grid of {pts.shape[0]} points exceeds the budget")
    values = np.asarray(f(pts), dtype=float).reshape(-1)
    k_max = pts.shape[1] if k_max is None else k_max
    if epsilon is None:
        levels = np.unique(values)[::-1]
    else:
        levels = _staircase(values, _l_max(values, epsilon), 2.0 * epsilon)
    r = spacing * 1.01 / math.sqrt(2.0)
    return filtered_diagrams(pts, values, levels, r, k_max, budget)
