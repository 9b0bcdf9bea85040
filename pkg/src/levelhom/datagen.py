"""
Seeded synthetic data for the experiments.

Every generator draws its variates in chunks of :data:`CHUNK` points. Chunk
``c`` of family ``f`` with seed ``s`` uses its own Philox stream keyed on
``(s, f, c)``, so the output for a given ``(family, n, seed, params)`` does
not depend on how the chunks are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.typing import NDArray
from scipy import stats

from .kernels import LabeledSample

CHUNK = 4096

FAMILIES = (
    "annulus_classification",
    "mixture_regression",
    "three_rings",
    "hierarchical_density",
    "noisy_circle",
    "noisy_torus",
)


def _streams(family: str, n: int, seed: int):
    """Yield ``(start, stop, Generator)`` for each chunk."""
    fid = FAMILIES.index(family)
    for c, lo in enumerate(range(0, n, CHUNK)):
        ss = np.random.SeedSequence(seed, spawn_key=(fid, c))
        yield lo, min(lo + CHUNK, n), np.random.Generator(np.random.Philox(ss))


def _check(n: int, sigma: float = 0.0):
    if n < 1:
        raise ValueError("n must be >= 1")
    if not sigma >= 0:
        raise ValueError("sigma must be >= 0")


# -- annulus classification --------------------------------------------------

ANNULUS_C = 0.5


def annulus_probability(x: NDArray) -> NDArray:
    """``C (1 + sin(4 pi |x|^2)) exp(-100 (|x| - 1/4)^2)`` with ``C = 1/2``."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    rho = np.linalg.norm(x, axis=1)
    return ANNULUS_C * (1.0 + np.sin(4.0 * math.pi * rho**2)) * np.exp(-100.0 * (rho - 0.25) ** 2)


def gen_annulus_classification(n: int, seed: int) -> LabeledSample:
    """Uniform points on ``[-1/2, 1/2]^2`` with Bernoulli labels."""
    _check(n)
    x = np.empty((n, 2))
    y = np.empty(n)
    for lo, hi, g in _streams("annulus_classification", n, seed):
        pts = g.uniform(-0.5, 0.5, size=(hi - lo, 2))
        u = g.random(hi - lo)
        x[lo:hi] = pts
        y[lo:hi] = (u < annulus_probability(pts)).astype(float)
    return LabeledSample(x, y, y_max=1.0)


# -- mixture regression ------------------------------------------------------

# (centre_x, centre_y, amplitude, width)
MIXTURE_TERMS = np.array(
    [
        (-0.55, 0.55, 1.0, 0.12),
        (0.55, 0.55, 0.9, 0.12),
        (0.0, 0.0, 1.1, 0.14),
        (-0.55, -0.55, 0.8, 0.12),
        (0.55, -0.55, 1.0, 0.12),
        (0.0, 0.6, -0.7, 0.11),
        (-0.6, 0.0, -0.6, 0.11),
        (0.6, 0.0, -0.8, 0.11),
    ]
)


def mixture_function(x: NDArray) -> NDArray:
    """Five positive and three negative Gaussian bumps on ``[-1, 1]^2``."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    out = np.zeros(x.shape[0])
    for cx, cy, a, w in MIXTURE_TERMS:
        out += a * np.exp(-((x[:, 0] - cx) ** 2 + (x[:, 1] - cy) ** 2) / (2.0 * w * w))
    return out


MIXTURE_FMAX = 1.2  # bound on |f| over the square


def gen_mixture_regression(n: int, sigma: float = 0.2, seed: int = 0) -> LabeledSample:
    """``Y = f(X) + xi`` with ``xi`` normal(0, sigma) truncated at 5 sigma."""
    _check(n, sigma)
    x = np.empty((n, 2))
    noise = np.zeros(n)
    for lo, hi, g in _streams("mixture_regression", n, seed):
        x[lo:hi] = g.uniform(-1.0, 1.0, size=(hi - lo, 2))
        if sigma > 0:
            u = g.random(hi - lo)
            noise[lo:hi] = sigma * stats.truncnorm.ppf(u, -5.0, 5.0)
    f = mixture_function(x)
    y = f + np.clip(noise, -5.0 * sigma, 5.0 * sigma)
    return LabeledSample(x, y, y_max=MIXTURE_FMAX + 5.0 * sigma)


# -- rings -------------------------------------------------------------------

RING_RADII = (1.0, 2.0, 3.0)


def gen_three_rings(n: int, sigma: float = 0.2, seed: int = 0) -> NDArray:
    """Points on circles of radius 1, 2, 3 (ring chosen uniformly) plus Gaussian noise."""
    _check(n, sigma)
    x = np.empty((n, 2))
    radii = np.asarray(RING_RADII)
    for lo, hi, g in _streams("three_rings", n, seed):
        m = hi - lo
        ring = g.integers(0, 3, size=m)
        theta = g.uniform(0.0, 2.0 * math.pi, size=m)
        z = g.standard_normal((m, 2))
        x[lo:hi] = radii[ring, None] * np.column_stack([np.cos(theta), np.sin(theta)]) + sigma * z
    return x


# -- hierarchical density ----------------------------------------------------


@dataclass(frozen=True)
class HierarchicalParams:
    """Scales of the two-component hierarchical mixture.

    The right component is four Gaussians around ``(0.25, 0)``; the left is a
    crater made of ``crater_count`` Gaussians spaced on a circle around
    ``(-0.25, 0)``, with amplitudes jittered by ``jitter``.
    """

    cluster_sigma: float = 0.02
    cluster_offset: float = 0.02 * math.sqrt(2.0)
    crater_radius: float = 0.05
    crater_sigma: float = 0.012
    crater_count: int = 100
    jitter: float = 0.15
    jitter_seed: int = 20140101


def hierarchical_components(params: HierarchicalParams = HierarchicalParams()):
    """Mixture weights, centres and scales (deterministic)."""
    a = params.cluster_offset
    centres = [(0.25 + sx * a, sy * a) for sx, sy in ((1, 1), (-1, 1), (-1, -1), (1, -1))]
    weights = [0.125] * 4
    sigmas = [params.cluster_sigma] * 4
    k = params.crater_count
    phi = 2.0 * math.pi * np.arange(k) / k
    amp = 1.0 + params.jitter * np.random.default_rng(params.jitter_seed).uniform(-1.0, 1.0, k)
    amp = 0.5 * amp / amp.sum()
    centres += [(-0.25 + params.crater_radius * math.cos(p), params.crater_radius * math.sin(p)) for p in phi]
    weights += amp.tolist()
    sigmas += [params.crater_sigma] * k
    return np.asarray(weights), np.asarray(centres), np.asarray(sigmas)


def hierarchical_pdf(x: NDArray, params: HierarchicalParams = HierarchicalParams()) -> NDArray:
    w, c, s = hierarchical_components(params)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    d2 = ((x[:, None, :] - c[None, :, :]) ** 2).sum(axis=2)
    return (w / (2 * math.pi * s**2) * np.exp(-d2 / (2 * s**2))).sum(axis=1)


def gen_hierarchical_density(n: int, seed: int, params: HierarchicalParams = HierarchicalParams()) -> NDArray:
    _check(n)
    w, c, s = hierarchical_components(params)
    x = np.empty((n, 2))
    cum = np.cumsum(w)
    cum[-1] = 1.0
    for lo, hi, g in _streams("hierarchical_density", n, seed):
        m = hi - lo
        comp = np.searchsorted(cum, g.random(m), side="right")
        x[lo:hi] = c[comp] + s[comp, None] * g.standard_normal((m, 2))
    return x


# -- noisy manifolds ---------------------------------------------------------

TORUS_R = 2.0
TORUS_RHO = 1.0


def gen_noisy_manifold(kind: str, n: int, sigma: float, seed: int, scale: float = 1.0) -> NDArray:
    """Points on a circle or torus plus isotropic Gaussian noise.

    For the torus the toroidal angle is uniform and the poloidal angle is
    wrapped normal with standard deviation ``scale`` (radians).
    """
    _check(n, sigma)
    if kind == "circle":
        family, dim = "noisy_circle", 2
    elif kind == "torus":
        family, dim = "noisy_torus", 3
    else:
        raise ValueError(f"unknown manifold {kind!r}; expected 'circle' or 'torus'")
    x = np.empty((n, dim))
    for lo, hi, g in _streams(family, n, seed):
        m = hi - lo
        theta = g.uniform(0.0, 2.0 * math.pi, size=m)
        if kind == "circle":
            y = np.column_stack([np.cos(theta), np.sin(theta)])
        else:
            phi = np.mod(scale * g.standard_normal(m), 2.0 * math.pi)
            ring = TORUS_R + TORUS_RHO * np.cos(phi)
            y = np.column_stack([ring * np.cos(theta), ring * np.sin(theta), TORUS_RHO * np.sin(phi)])
        x[lo:hi] = y + sigma * g.standard_normal((m, dim))
    return x


# -- specs -------------------------------------------------------------------


@dataclass(frozen=True)
class GenSpec:
    family: str
    n: int
    seed: int = 0
    sigma: Optional[float] = None
    scale: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        _check(self.n, 0.0 if self.sigma is None else self.sigma)


DEFAULT_SIGMA = {"mixture_regression": 0.2, "three_rings": 0.2, "noisy_circle": 0.1, "noisy_torus": 0.1}


def generate(spec: GenSpec) -> LabeledSample:
    """Run the generator named by ``spec``; point clouds come back without responses."""
    sigma = DEFAULT_SIGMA.get(spec.family) if spec.sigma is None else spec.sigma
    f = spec.family
    if f == "annulus_classification":
        return gen_annulus_classification(spec.n, spec.seed)
    if f == "mixture_regression":
        return gen_mixture_regression(spec.n, sigma, spec.seed)
    if f == "three_rings":
        pts = gen_three_rings(spec.n, sigma, spec.seed)
    elif f == "hierarchical_density":
        pts = gen_hierarchical_density(spec.n, spec.seed)
    else:
        pts = gen_noisy_manifold(f.split("_")[1], spec.n, sigma, spec.seed, spec.scale)
    return LabeledSample(pts)
