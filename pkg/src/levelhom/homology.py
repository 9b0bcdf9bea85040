"""
Boundary operators, combinatorial Laplacians, Betti numbers, and the rank
of the map induced in homology by a sub-complex inclusion.
"""

from __future__ import annotations

from .complexes import SimplicialComplex
from .errors import NotASubcomplex
from .linalg import RATIONALS, Field, FieldMatrix, kernel_basis, rank


def boundary_matrix(c: SimplicialComplex, k: int, field: Field = RATIONALS) -> FieldMatrix:
    """``n_{k-1} x n_k`` matrix of the k-th boundary operator.

    Dropping vertex ``j`` of an ascending tuple contributes sign ``(-1)**j``.
    """
    if k <= 0:
        return FieldMatrix.zeros(0, c.n(0), field)
    rows, cols = c.n(k - 1), c.n(k)
    if cols == 0:
        return FieldMatrix.zeros(rows, 0, field)
    faces = c.index(k - 1)
    ent = {}
    for col, s in enumerate(c.tuples(k)):
        for j in range(k + 1):
            ent[(faces[s[:j] + s[j + 1 :]], col)] = -1 if j % 2 else 1
    return FieldMatrix(rows, cols, ent, field)


def laplacian(c: SimplicialComplex, k: int, field: Field = RATIONALS) -> FieldMatrix:
    up = boundary_matrix(c, k + 1, field)
    down = boundary_matrix(c, k, field)
    return up @ up.T() + down.T() @ down


def betti(c: SimplicialComplex, k: int, field: Field = RATIONALS) -> int:
    """``n_k - rank(d_k) - rank(d_{k+1})``; the top boundary counts as zero."""
    if k < 0 or k > c.k_max:
        raise ValueError(f"degree {k} outside 0..{c.k_max}")
    return c.n(k) - rank(boundary_matrix(c, k, field)) - rank(boundary_matrix(c, k + 1, field))


def betti_laplacian(c: SimplicialComplex, k: int) -> int:
    """Betti number as ``dim ker L_k`` over the rationals."""
    lap = laplacian(c, k)
    return lap.cols - rank(lap)


def harmonic_basis(c: SimplicialComplex, k: int) -> list[list[int]]:
    """Integer basis of ``ker L_k``; one representative cycle per class."""
    return kernel_basis(laplacian(c, k))


def check_prefix(c1: SimplicialComplex, c2: SimplicialComplex):
    if c1.k_max > c2.k_max:
        raise NotASubcomplex("sub-complex has higher dimension than the ambient complex")
    for k in range(c1.k_max + 1):
        n1 = c1.n(k)
        if n1 > c2.n(k) or (n1 and not (c2.simplices[k][:n1] == c1.simplices[k]).all()):
            raise NotASubcomplex(f"dimension {k} simplexes of c1 are not a prefix of c2")


def image_rank(c1: SimplicialComplex, c2: SimplicialComplex, k: int) -> int:
    """Rank of ``H_k(c1) -> H_k(c2)`` induced by inclusion.

    Harmonic representatives of ``H_k(c1)`` are zero-padded into the chain
    space of ``c2`` and appended to ``d_{k+1}(c2)``; the rank increase counts
    the classes that stay non-trivial.
    """
    check_prefix(c1, c2)
    if k < 0 or k > c1.k_max:
        raise ValueError(f"degree {k} outside 0..{c1.k_max}")
    basis = harmonic_basis(c1, k)
    if not basis:
        return 0
    d2 = boundary_matrix(c2, k + 1)
    pad = c2.n(k) - c1.n(k)
    extra = FieldMatrix.from_columns(c2.n(k), [v + [0] * pad for v in basis])
    return rank(d2.hstack(extra)) - rank(d2)
