import numpy as np
import pytest

from conftest import FIXTURES
from levelhom import (
    NotASubcomplex,
    SimplicialComplex,
    betti,
    betti_laplacian,
    boundary_matrix,
    build_rips,
    harmonic_basis,
    image_rank,
    laplacian,
    prime_field,
    rank,
)


def nested_rips(rng, sizes, radii):
    """Rips complexes on growing prefixes of one point set, each a prefix of the next."""
    pts = rng.uniform(size=(sizes[-1], 2))
    out = []
    for n, r in zip(sizes, radii):
        c = build_rips(pts[:n], r, 2)
        out.append(c.with_prefix(out[-1]) if out else c)
    return out


class TestBoundary:
    """Signed boundary operators."""

    def test_edge(self):
        d = boundary_matrix(SimplicialComplex.from_simplices([(0, 1)]), 1)
        assert d.to_dense() == [[-1], [1]]

    def test_triangle(self):
        c = SimplicialComplex.from_simplices([(0, 1, 2)])
        # rows are edges 01, 02, 12
        col = [row[0] for row in boundary_matrix(c, 2).to_dense()]
        assert dict(zip(c.tuples(1), col)) == {(1, 2): 1, (0, 2): -1, (0, 1): 1}

    def test_degree_zero_is_empty(self):
        assert boundary_matrix(SimplicialComplex.from_simplices([(0, 1)]), 0).shape == (0, 2)

    def test_boundary_squared(self, named_complex):
        _, c, _ = named_complex
        for k in range(1, c.k_max):
            assert not (boundary_matrix(c, k) @ boundary_matrix(c, k + 1)).entries

    def test_boundary_squared_rips(self, rng):
        c = build_rips(rng.uniform(size=(25, 2)), 0.2, 3)
        for k in range(1, 3):
            assert not (boundary_matrix(c, k) @ boundary_matrix(c, k + 1)).entries


class TestLaplacian:
    """Combinatorial Laplacians."""

    def test_single_vertex(self):
        assert laplacian(SimplicialComplex.from_simplices([(0,)]), 0).to_dense() == [[0]]

    def test_graph_laplacian(self):
        assert laplacian(SimplicialComplex.from_simplices([(0, 1)]), 0).to_dense() == [[1, -1], [-1, 1]]

    def test_hollow_triangle(self):
        lap = laplacian(FIXTURES["hollow_triangle"][0], 1)
        assert lap.is_symmetric()
        assert lap.cols - rank(lap) == 1

    def test_harmonic_cycle(self):
        c = FIXTURES["hollow_triangle"][0]
        (v,) = harmonic_basis(c, 1)
        # edges 01, 02, 12: the oriented cycle 0->1->2->0 is (1, -1, 1) up to sign
        assert v in ([1, -1, 1], [-1, 1, -1])


class TestBetti:
    """Betti numbers by rank-nullity and by Laplacian kernels."""

    def test_fixture_values(self, named_complex):
        _, c, expected = named_complex
        assert tuple(betti(c, k) for k in range(c.k_max + 1)) == expected

    def test_laplacian_agrees(self, named_complex):
        _, c, _ = named_complex
        for k in range(c.k_max + 1):
            assert betti_laplacian(c, k) == betti(c, k)

    def test_prime_field_agrees(self, named_complex):
        _, c, _ = named_complex
        for k in range(c.k_max + 1):
            assert betti(c, k, prime_field()) == betti(c, k)

    def test_euler_characteristic(self, rng):
        c = build_rips(rng.uniform(size=(30, 2)), 0.2, 3)
        chi = sum((-1) ** k * c.n(k) for k in range(4))
        # degree 3 betti treats the missing 4-simplexes as zero boundary
        assert chi == sum((-1) ** k * betti(c, k) for k in range(4))

    def test_out_of_range_degree(self):
        with pytest.raises(ValueError):
            betti(FIXTURES["edge"][0], 3)


class TestImageRank:
    """Rank of the map induced by inclusion."""

    def test_identity_inclusion(self, named_complex):
        _, c, _ = named_complex
        for k in range(c.k_max + 1):
            assert image_rank(c, c, k) == betti(c, k)

    def test_square_gets_filled(self):
        hollow = SimplicialComplex.from_simplices([(0, 1), (1, 2), (2, 3), (0, 3)], k_max=2)
        filled = SimplicialComplex.from_simplices([(0, 1, 2), (0, 2, 3)]).with_prefix(hollow)
        assert image_rank(hollow, filled, 1) == 0
        assert image_rank(hollow, filled, 0) == 1

    def test_two_vertices_joined(self):
        pair = SimplicialComplex.from_simplices([(0,), (1,)], k_max=1)
        edge = SimplicialComplex.from_simplices([(0, 1)])
        assert image_rank(pair, edge, 0) == 1

    def test_not_a_prefix(self):
        a = SimplicialComplex.from_simplices([(1, 2)])
        b = SimplicialComplex.from_simplices([(0, 1), (1, 2)])
        with pytest.raises(NotASubcomplex):
            image_rank(a, b, 0)

    def test_bounded_by_betti(self, rng):
        for _ in range(10):
            c1, c2 = nested_rips(rng, [10, 15], [0.15, 0.2])
            for k in range(2):
                img = image_rank(c1, c2, k)
                assert 0 <= img <= min(betti(c1, k), betti(c2, k))

    def test_functoriality(self, rng):
        for _ in range(10):
            c1, c2, c3 = nested_rips(rng, [8, 11, 15], [0.12, 0.16, 0.2])
            for k in range(2):
                assert image_rank(c1, c3, k) <= min(image_rank(c1, c2, k), image_rank(c2, c3, k))
