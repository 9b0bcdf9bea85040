"""
Simplicial complexes built on point clouds.

Simplexes are stored per dimension as integer arrays of shape
``(n_k, k + 1)`` whose rows are strictly ascending vertex tuples. The row
order is meaningful: a sub-complex passed to
:func:`levelhom.homology.image_rank` must occupy a prefix of every
dimension.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial import cKDTree

from .errors import CapacityExceeded, UnsupportedDimension

DEFAULT_BUDGET = 10_000_000


@dataclass
class SimplicialComplex:
    simplices: list[NDArray[np.int64]]
    vertex_count: int
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def k_max(self) -> int:
        return len(self.simplices) - 1

    def n(self, k: int) -> int:
        if k < 0 or k > self.k_max:
            return 0
        return self.simplices[k].shape[0]

    def __len__(self):
        return sum(s.shape[0] for s in self.simplices)

    def tuples(self, k: int) -> list[tuple[int, ...]]:
        if k < 0 or k > self.k_max:
            return []
        return [tuple(int(v) for v in row) for row in self.simplices[k]]

    def index(self, k: int) -> dict[tuple[int, ...], int]:
        """Map from simplex tuple to its row in dimension ``k``."""
        if k not in self._index:
            self._index[k] = {s: i for i, s in enumerate(self.tuples(k))}
        return self._index[k]

    def is_closed(self) -> bool:
        for k in range(1, self.k_max + 1):
            faces = self.index(k - 1)
            for s in self.tuples(k):
                for j in range(k + 1):
                    if s[:j] + s[j + 1 :] not in faces:
                        return False
        return True

    def simplex_set(self) -> set[tuple[int, ...]]:
        return {s for k in range(self.k_max + 1) for s in self.tuples(k)}

    @classmethod
    def from_simplices(cls, simplices: Iterable[Sequence[int]], k_max: Optional[int] = None, close: bool = True):
        """Build from maximal (or all) simplexes, adding faces when ``close``.

        Rows are sorted lexicographically within each dimension.
        """
        found: set[tuple[int, ...]] = set()
        for s in simplices:
            s = tuple(sorted(int(v) for v in s))
            if len(set(s)) != len(s):
                raise ValueError(f"repeated vertex in simplex {s}")
            if close:
                for m in range(1, len(s) + 1):
                    found.update(combinations(s, m))
            else:
                found.add(s)
        top = max((len(s) - 1 for s in found), default=0)
        k_max = top if k_max is None else k_max
        per_dim = [sorted(s for s in found if len(s) == k + 1) for k in range(k_max + 1)]
        verts = max((s[-1] for s in found), default=-1) + 1
        return cls([_as_array(rows, k) for k, rows in enumerate(per_dim)], verts)

    def with_prefix(self, sub: "SimplicialComplex") -> "SimplicialComplex":
        """Reorder so that the simplexes of ``sub`` come first in every dimension.

        ``sub`` must use the same vertex labels; the order inside ``sub`` is kept.
        """
        out = []
        for k in range(self.k_max + 1):
            first = sub.tuples(k)
            seen = set(first)
            rest = [s for s in self.tuples(k) if s not in seen]
            if len(first) + len(rest) != self.n(k):
                raise ValueError("sub is not contained in this complex")
            out.append(_as_array(first + rest, k))
        return SimplicialComplex(out, self.vertex_count)


def _as_array(rows, k: int) -> NDArray[np.int64]:
    if len(rows) == 0:
        return np.zeros((0, k + 1), dtype=np.int64)
    return np.asarray(rows, dtype=np.int64).reshape(-1, k + 1)


@dataclass
class FilteredComplex:
    """A complex whose simplexes carry a level index (0 = highest level)."""

    complex: SimplicialComplex
    filtration_index: list[NDArray[np.int64]]
    level_values: NDArray[np.floating]
    vertex_ids: Optional[NDArray[np.int64]] = None

    def __post_init__(self):
        lv = np.asarray(self.level_values, dtype=float)
        if lv.size > 1 and not np.all(np.diff(lv) < 0):
            raise ValueError("level_values must be strictly decreasing")
        self.level_values = lv
        if not self.is_monotone():
            raise ValueError("filtration index of a face exceeds that of a simplex")

    @property
    def k_max(self) -> int:
        return self.complex.k_max

    def is_monotone(self) -> bool:
        c = self.complex
        for k in range(1, c.k_max + 1):
            index = c.index(k - 1)
            fi_face = self.filtration_index[k - 1]
            for row, s in enumerate(c.tuples(k)):
                for j in range(k + 1):
                    if fi_face[index[s[:j] + s[j + 1 :]]] > self.filtration_index[k][row]:
                        return False
        return True


def rips_edges(points: NDArray, r: float) -> NDArray[np.int64]:
    """Sorted ``(i, j)`` pairs, ``i < j``, with ``|x_i - x_j| <= 2r``."""
    if not r > 0:
        raise ValueError("radius r must be positive")
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if pts.shape[0] < 2:
        return np.zeros((0, 2), dtype=np.int64)
    pairs = cKDTree(pts).query_pairs(2.0 * r, output_type="ndarray").astype(np.int64)
    if pairs.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    pairs.sort(axis=1)
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    return pairs[order]


def _expand(vertex_count: int, edges: NDArray, k_max: int, budget: int, accept=None):
    """Clique expansion via upper-neighbour intersection.

    ``accept(simplex_tuple)`` may veto candidate simplexes of dimension >= 2.
    """
    simplices = [np.arange(vertex_count, dtype=np.int64).reshape(-1, 1)]
    total = vertex_count
    if k_max >= 1:
        simplices.append(np.asarray(edges, dtype=np.int64).reshape(-1, 2))
        total += simplices[1].shape[0]
    if total > budget:
        raise CapacityExceeded(budget)
    upper = [set() for _ in range(vertex_count)]
    if k_max >= 1:
        for i, j in simplices[1].tolist():
            upper[i].add(j)
    for k in range(2, k_max + 1):
        rows = []
        for s in simplices[k - 1]:
            s = tuple(int(v) for v in s)
            common = upper[s[0]].intersection(*(upper[v] for v in s[1:]))
            for w in sorted(common):
                cand = s + (w,)
                if accept is None or accept(cand):
                    rows.append(cand)
            if total + len(rows) > budget:
                raise CapacityExceeded(budget)
        total += len(rows)
        simplices.append(_as_array(rows, k))
    return SimplicialComplex(simplices, vertex_count)


def build_rips(points: ArrayLike, r: float, k_max: int, budget: int = DEFAULT_BUDGET) -> SimplicialComplex:
    """Rips complex: a simplex for every vertex set with pairwise distances <= 2r."""
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    edges = rips_edges(pts, r)
    return _expand(pts.shape[0], edges, k_max, budget)


# -- minimum enclosing ball -------------------------------------------------


def _circumball(boundary: list[NDArray]) -> tuple[NDArray, float]:
    p0 = boundary[0]
    if len(boundary) == 1:
        return p0.copy(), 0.0
    a = np.array([p - p0 for p in boundary[1:]])
    gram = a @ a.T
    rhs = 0.5 * np.einsum("ij,ij->i", a, a)
    try:
        lam = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        lam = np.linalg.lstsq(gram, rhs, rcond=None)[0]
    center = p0 + lam @ a
    return center, float(np.linalg.norm(center - p0))


def _welzl(pts: list[NDArray], boundary: list[NDArray], d: int):
    if not pts or len(boundary) == d + 1:
        if not boundary:
            return None, -1.0
        return _circumball(boundary)
    p, rest = pts[-1], pts[:-1]
    center, radius = _welzl(rest, boundary, d)
    if center is not None and np.linalg.norm(p - center) <= radius * (1 + 1e-12) + 1e-15:
        return center, radius
    return _welzl(rest, boundary + [p], d)


def miniball(points: ArrayLike) -> tuple[NDArray, float]:
    """Centre and radius of the smallest ball enclosing ``points`` (Welzl)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    center, radius = _welzl(list(pts), [], pts.shape[1])
    return center, radius


def build_cech(points: ArrayLike, r: float, k_max: int, budget: int = DEFAULT_BUDGET) -> SimplicialComplex:
    """Čech complex: a simplex whenever the r-balls share a point.

    The r-balls around a vertex set intersect exactly when the minimum
    enclosing ball of the set has radius at most r.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if pts.shape[1] > 3:
        raise UnsupportedDimension(f"Čech construction supports d <= 3, got d={pts.shape[1]}")

    def accept(simplex):
        return miniball(pts[list(simplex)])[1] <= r

    return _expand(pts.shape[0], rips_edges(pts, r), k_max, budget, accept=accept)


# -- vertex filtered Rips ---------------------------------------------------


def vertex_level_index(values: ArrayLike, levels: ArrayLike) -> NDArray[np.int64]:
    """``min{i : value >= levels[i]}`` per vertex, ``-1`` when no level is reached.

    NaN values (undefined estimates) map to ``-1``.
    """
    values = np.asarray(values, dtype=float)
    levels = np.asarray(levels, dtype=float)
    if levels.size > 1 and not np.all(np.diff(levels) < 0):
        raise ValueError("levels must be strictly decreasing")
    # levels[::-1] is increasing; count of levels <= v among reversed gives position
    rev = levels[::-1]
    with np.errstate(invalid="ignore"):
        pos = np.searchsorted(rev, values, side="right")
    idx = levels.size - pos
    idx = np.where(pos == 0, -1, idx)
    idx = np.where(np.isnan(values), -1, idx)
    return idx.astype(np.int64)


def build_filtered_rips(
    points: ArrayLike,
    vertex_values: Sequence[Optional[float]],
    levels: ArrayLike,
    r: float,
    k_max: int,
    budget: int = DEFAULT_BUDGET,
) -> FilteredComplex:
    """Rips complex on the vertices reaching some level, indexed by level.

    A simplex enters at the largest level index among its vertices.
    Vertices are relabelled ``0..m-1``; ``vertex_ids`` maps back.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    vals = np.array([np.nan if v is None else v for v in vertex_values], dtype=float)
    vidx = vertex_level_index(vals, levels)
    keep = np.flatnonzero(vidx >= 0)
    sub = build_rips(pts[keep], r, k_max, budget) if keep.size else SimplicialComplex(
        [np.zeros((0, k + 1), dtype=np.int64) for k in range(k_max + 1)], 0
    )
    lv = vidx[keep]
    findex = [lv[s].max(axis=1) if s.shape[0] else np.zeros(0, dtype=np.int64) for s in sub.simplices]
    return FilteredComplex(sub, findex, np.asarray(levels, dtype=float), vertex_ids=keep)
