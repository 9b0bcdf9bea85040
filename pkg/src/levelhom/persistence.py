"""
Persistent homology of super-level filtrations.

Two routes compute the same diagrams:

* :func:`reduce` runs the standard column reduction over Z/2 on an
  explicit :class:`~levelhom.complexes.FilteredComplex`.
* :func:`rips_persistence` never stores the top-dimensional simplexes. It
  enumerates cofaces on the fly and reduces coboundaries (persistent
  cohomology with clearing), which keeps dense Rips complexes tractable.

Diagrams live in level coordinates. A class born at level ``b`` and
killed at the lower level ``d`` is the pair ``(b, d)`` with ``b > d``;
classes that survive the whole filtration have ``d = -inf``. Pairs with
``b == d`` are dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import sparse
from scipy.sparse.csgraph import maximum_bipartite_matching

from . import _engine
from .complexes import DEFAULT_BUDGET, FilteredComplex, rips_edges
from .errors import CapacityExceeded, ParseError

NEG_INF = -math.inf


@dataclass
class PersistenceDiagram:
    degree: int
    pairs: NDArray[np.floating] = field(default_factory=lambda: np.zeros((0, 2)))

    def __post_init__(self):
        arr = np.asarray(self.pairs, dtype=float).reshape(-1, 2)
        if arr.size:
            finite = np.isfinite(arr[:, 1])
            if np.any(arr[finite, 0] <= arr[finite, 1]):
                raise ValueError("finite pairs must satisfy birth > death")
            if np.any(~finite & (arr[:, 1] != NEG_INF)):
                raise ValueError("only -inf is allowed as a non-finite death")
            # canonical order: births descending, then deaths descending
            arr = arr[np.lexsort((-arr[:, 1], -arr[:, 0]))]
        self.pairs = arr

    def __len__(self):
        return self.pairs.shape[0]

    @property
    def births(self):
        return self.pairs[:, 0]

    @property
    def deaths(self):
        return self.pairs[:, 1]

    def finite(self) -> NDArray:
        return self.pairs[np.isfinite(self.pairs[:, 1])]

    def essential(self) -> NDArray:
        return self.pairs[~np.isfinite(self.pairs[:, 1])]

    def persistence(self, floor: Optional[float] = None) -> NDArray:
        """Bar lengths; essential bars are measured down to ``floor`` if given."""
        deaths = self.deaths
        if floor is not None:
            deaths = np.where(np.isfinite(deaths), deaths, floor)
        return self.births - deaths

    def alive(self, birth_at_least: float, alive_at: float) -> int:
        """Number of classes born at or above one level and still alive at a lower one."""
        return int(np.sum((self.births >= birth_at_least) & (self.deaths < alive_at)))

    def __eq__(self, other):
        return (
            isinstance(other, PersistenceDiagram)
            and self.degree == other.degree
            and self.pairs.shape == other.pairs.shape
            and bool(np.all(self.pairs == other.pairs))
        )


def _diagrams_from(bars: dict[int, list], degrees) -> list[PersistenceDiagram]:
    return [PersistenceDiagram(k, bars.get(k, [])) for k in degrees]


# -- explicit reduction ------------------------------------------------------


def reduce(fc: FilteredComplex) -> list[PersistenceDiagram]:
    """Persistence diagrams of degrees ``0..k_max`` by Z/2 column reduction.

    Simplexes are ordered by ``(filtration_index, dimension, tuple)``; the
    reduction runs from the top dimension down so that creator columns can
    be cleared (twist).
    """
    c = fc.complex
    levels = fc.level_values
    entries = []
    for k in range(c.k_max + 1):
        for row, s in enumerate(c.tuples(k)):
            entries.append((int(fc.filtration_index[k][row]), k, s))
    entries.sort()
    pos = {(e[2]): i for i, e in enumerate(entries)}
    by_dim: dict[int, list[int]] = {}
    for i, (_, k, _) in enumerate(entries):
        by_dim.setdefault(k, []).append(i)

    pivot_of: dict[int, int] = {}  # low -> column position
    reduced: dict[int, set] = {}
    cleared: set[int] = set()
    paired: set[int] = set()
    bars: dict[int, list] = {}
    for k in range(c.k_max, 0, -1):
        for j in by_dim.get(k, []):
            if j in cleared:
                continue
            s = entries[j][2]
            col = {pos[s[:t] + s[t + 1 :]] for t in range(k + 1)}
            while col:
                low = max(col)
                other = pivot_of.get(low)
                if other is None:
                    break
                col ^= reduced[other]
            if not col:
                continue
            low = max(col)
            pivot_of[low] = j
            reduced[j] = col
            cleared.add(low)
            paired.update((low, j))
            b, d = levels[entries[low][0]], levels[entries[j][0]]
            if b != d:
                bars.setdefault(k - 1, []).append((b, d))
    for i, (idx, k, _) in enumerate(entries):
        if i not in paired:
            bars.setdefault(k, []).append((levels[idx], NEG_INF))
    return _diagrams_from(bars, range(c.k_max + 1))


# -- implicit Rips engine ----------------------------------------------------


class RipsFiltration:
    """Vertex-levelled Rips filtration with implicit coface enumeration.

    Parameters
    ----------
    points : (m, d) array
    vertex_level : (m,) int array
        Level index at which each vertex enters (0 = highest level).
    r : float
        Ball radius; edges join points at distance <= 2r.
    max_dim : int
        Highest simplex dimension. Homology is reported for degrees
        ``0..max_dim-1``.
    budget : int
        Cap on the number of simplexes that are stored explicitly.

    Within a level, simplexes are refined by diameter and then by vertex
    tuple. The refinement changes only zero-length pairs, which are dropped,
    but it lets most coboundary columns pair without any additions.
    """

    def __init__(self, points, vertex_level, r, max_dim, budget=DEFAULT_BUDGET):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        self.points = pts
        self.m = m = pts.shape[0]
        self.lvl = np.asarray(vertex_level, dtype=np.int64)
        if self.lvl.shape != (m,):
            raise ValueError("vertex_level must have one entry per point")
        if max_dim < 0:
            raise ValueError("max_dim must be >= 0")
        self.max_dim = max_dim
        self.budget = budget
        if m > budget:
            raise CapacityExceeded(budget)
        if max_dim >= 1 and float(m) ** (max_dim + 1) >= 2.0**62:
            raise CapacityExceeded(budget, "too many vertices for integer simplex codes")
        e = rips_edges(pts, r) if max_dim >= 1 and m > 1 else np.zeros((0, 2), dtype=np.int64)
        if m + e.shape[0] > budget:
            raise CapacityExceeded(budget)
        self.edges = e
        diff = pts[e[:, 1]] - pts[e[:, 0]]
        len2 = np.einsum("ij,ij->i", diff, diff)
        # equal lengths share a rank, so diameter ties stay ties
        _, self.erank = np.unique(len2, return_inverse=True)
        self.erank = self.erank.astype(np.int64).reshape(-1)
        self.nranks = int(self.erank.max()) + 1 if e.shape[0] else 1
        self.edge_code = e[:, 0] * m + e[:, 1]
        edge_lvl = np.maximum(self.lvl[e[:, 0]], self.lvl[e[:, 1]])
        self.edge_lvl = edge_lvl
        self.edge_ld = edge_lvl * self.nranks + self.erank
        eid = np.arange(e.shape[0], dtype=np.int64)
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        ids = np.concatenate([eid, eid])
        order = np.lexsort((dst, src))
        self.nbr = dst[order].astype(np.int64)
        self.nbr_eid = ids[order].astype(np.int64)
        self.nbr_ptr = np.searchsorted(src[order], np.arange(m + 1)).astype(np.int64)
        deg = np.diff(self.nbr_ptr)
        self.maxdeg = int(deg.max()) if m else 0

    def _kernel_args(self):
        return self.nranks, self.lvl, self.erank, self.nbr_ptr, self.nbr, self.nbr_eid, self.m

    def _simplices(self, verts, ld):
        """Simplexes one dimension above ``verts``, budget-checked."""
        counts = _engine.count_expansions(verts, self.nbr_ptr, self.nbr, self.nbr_eid)
        if int(counts.sum()) > self.budget:
            raise CapacityExceeded(self.budget)
        return _engine.fill_expansions(verts, ld, counts, *self._kernel_args())

    def diagrams(self, level_values: ArrayLike) -> list[PersistenceDiagram]:
        levels = np.asarray(level_values, dtype=float)
        bars: dict[int, list] = {}
        top = max(self.max_dim - 1, 0)
        if self.m == 0:
            return _diagrams_from(bars, range(top + 1))
        if self.max_dim == 0:
            bars[0] = [(levels[v], NEG_INF) for v in self.lvl]
            return _diagrams_from(bars, [0])
        order = np.lexsort((self.edge_code, self.edge_ld))
        merged, born, died, roots = _engine.union_find_pairs(self.edges, order, self.lvl, self.edge_lvl, self.m)
        keep = born != died
        bars[0] = list(zip(levels[born[keep]], levels[died[keep]]))
        bars[0] += [(levels[v], NEG_INF) for v in self.lvl[roots]]
        verts, ld, code = self.edges, self.edge_ld, self.edge_code
        cleared = code[merged]
        for k in range(1, self.max_dim):
            live = ~np.isin(code, cleared)
            idx = np.flatnonzero(live)
            idx = idx[np.lexsort((code[idx], ld[idx]))[::-1]]
            piv_ld, piv_code = _engine.reduce_coboundaries(
                np.ascontiguousarray(verts[idx]), ld[idx], *self._kernel_args(), self.maxdeg
            )
            birth = ld[idx] // self.nranks
            ess = piv_ld < 0
            death = piv_ld[~ess] // self.nranks
            b = birth[~ess]
            keep = b != death
            bars[k] = list(zip(levels[b[keep]], levels[death[keep]]))
            bars[k] += [(levels[v], NEG_INF) for v in birth[ess]]
            cleared = piv_code[~ess]
            if k + 1 < self.max_dim:
                verts, ld, code = self._simplices(np.ascontiguousarray(verts), ld)
        return _diagrams_from(bars, range(top + 1))


def rips_persistence(
    points: ArrayLike,
    vertex_level: ArrayLike,
    level_values: ArrayLike,
    r: float,
    max_dim: int,
    budget: int = DEFAULT_BUDGET,
) -> list[PersistenceDiagram]:
    """Diagrams of degrees ``0..max_dim-1`` for a vertex-levelled Rips filtration.

    Vertices with a negative level index are dropped.
    """
    vl = np.asarray(vertex_level, dtype=np.int64)
    keep = vl >= 0
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    return RipsFiltration(pts[keep], vl[keep], r, max_dim, budget).diagrams(level_values)


# -- bottleneck distance -----------------------------------------------------


def _linf(a: NDArray, b: NDArray) -> NDArray:
    """Pairwise sup-norm distances between rows of ``a`` and ``b``."""
    return np.maximum(np.abs(a[:, None, 0] - b[None, :, 0]), np.abs(a[:, None, 1] - b[None, :, 1]))


def _half_pers(a: NDArray) -> NDArray:
    return (a[:, 0] - a[:, 1]) / 2.0


def _perfect_matching(a: NDArray, b: NDArray, cross: NDArray, ha: NDArray, hb: NDArray, delta: float) -> bool:
    n, m = a.shape[0], b.shape[0]
    size = n + m
    # rows: a_0..a_{n-1}, diagonal copies of b; cols: b_0..b_{m-1}, diagonal copies of a
    rows, cols = [], []
    ii, jj = np.nonzero(cross <= delta)
    rows.append(ii)
    cols.append(jj)
    ok_a = np.flatnonzero(ha <= delta)
    rows.append(ok_a)
    cols.append(m + ok_a)
    ok_b = np.flatnonzero(hb <= delta)
    rows.append(n + ok_b)
    cols.append(ok_b)
    dd_r, dd_c = np.meshgrid(np.arange(n, size), np.arange(m, size), indexing="ij")
    rows.append(dd_r.ravel())
    cols.append(dd_c.ravel())
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    graph = sparse.csr_matrix((np.ones(r.shape[0], dtype=np.int8), (r, c)), shape=(size, size))
    match = maximum_bipartite_matching(graph, perm_type="column")
    return bool(np.all(match >= 0))


def _finite_bottleneck(a: NDArray, b: NDArray) -> float:
    if a.shape[0] == 0 and b.shape[0] == 0:
        return 0.0
    ha, hb = _half_pers(a), _half_pers(b)
    if a.shape[0] == 0:
        return float(hb.max())
    if b.shape[0] == 0:
        return float(ha.max())
    cross = _linf(a, b)
    cand = np.unique(np.concatenate([cross.ravel(), ha, hb]))
    lo, hi = 0, cand.shape[0] - 1  # the largest candidate is always feasible
    while lo < hi:
        mid = (lo + hi) // 2
        if _perfect_matching(a, b, cross, ha, hb, cand[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(cand[lo])


def bottleneck(d1: PersistenceDiagram, d2: PersistenceDiagram) -> float:
    """Bottleneck distance between two diagrams of the same degree.

    Finite points may be matched to each other or to the diagonal. Essential
    classes are matched only among themselves, by sorted birth; unequal
    counts give ``inf``.
    """
    if d1.degree != d2.degree:
        raise ValueError(f"degree mismatch: {d1.degree} vs {d2.degree}")
    e1, e2 = np.sort(d1.essential()[:, 0]), np.sort(d2.essential()[:, 0])
    if e1.shape != e2.shape:
        return math.inf
    ess = float(np.max(np.abs(e1 - e2))) if e1.size else 0.0
    return max(ess, _finite_bottleneck(d1.finite(), d2.finite()))


# -- TSV ---------------------------------------------------------------------


def _fmt_level(x: float) -> str:
    return repr(float(x))


def emit_tsv(diagrams: Sequence[PersistenceDiagram]) -> str:
    """``degree<TAB>birth<TAB>death`` per pair, essentials with ``-inf``."""
    lines = []
    for dg in sorted(diagrams, key=lambda d: d.degree):
        for b, d in dg.pairs:
            lines.append(f"{dg.degree}\t{_fmt_level(b)}\t{_fmt_level(d)}")
    return "".join(line + "\n" for line in lines)


def parse_tsv(text: str) -> dict[int, PersistenceDiagram]:
    """Inverse of :func:`emit_tsv`; blank lines and ``#`` comments are skipped.

    Raises
    ------
    ParseError
        With the 1-based line number of the first malformed line.
    """
    pairs: dict[int, list] = {}
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ParseError(f"expected 3 tab-separated fields, got {len(fields)}", no)
        try:
            k = int(fields[0])
            b = float(fields[1])
            d = float(fields[2])
        except ValueError as exc:
            raise ParseError(str(exc), no) from None
        if k < 0:
            raise ParseError("negative degree", no)
        if not math.isfinite(b):
            raise ParseError("birth must be finite", no)
        if math.isnan(d) or d == math.inf:
            raise ParseError("death must be finite or -inf", no)
        if math.isfinite(d) and not b > d:
            raise ParseError("birth must exceed death", no)
        pairs.setdefault(k, []).append((b, d))
    return {k: PersistenceDiagram(k, v) for k, v in sorted(pairs.items())}
