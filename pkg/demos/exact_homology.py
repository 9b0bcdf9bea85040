"""
Exact homology of small complexes
=================================

Betti numbers from boundary ranks, harmonic representatives from the
combinatorial Laplacian, and the rank of the map induced by an inclusion.
"""

import math

import numpy as np

from levelhom import SimplicialComplex, betti, build_cech, build_rips, harmonic_basis, image_rank

# A hollow square has one component and one loop.
hollow = SimplicialComplex.from_simplices([(0, 1), (1, 2), (2, 3), (0, 3)], k_max=2)
print("hollow square betti:", [betti(hollow, k) for k in range(3)])

# The kernel of the degree-one Laplacian gives an integer cycle representative.
print("harmonic cycle over edges", hollow.tuples(1), "->", harmonic_basis(hollow, 1))

# Filling the square kills the loop: the inclusion maps H1 to zero but keeps H0.
filled = SimplicialComplex.from_simplices([(0, 1, 2), (0, 2, 3)]).with_prefix(hollow)
print("image ranks hollow -> filled:", [image_rank(hollow, filled, k) for k in range(2)])

# Three points at pairwise distance 1 with r = 1/2: Rips fills the triangle,
# the Cech complex does not because the three balls share no point.
tri = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3) / 2]])
rips, cech = build_rips(tri, 0.5, 2), build_cech(tri, 0.5, 2)
print("Rips betti:", [betti(rips, k) for k in range(2)], " Cech betti:", [betti(cech, k) for k in range(2)])
