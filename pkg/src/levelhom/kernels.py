"""
Compactly supported kernels, kernel estimators and bandwidth rules.

A kernel here is radial, supported in the open unit ball, equal to one at
the origin and bounded by one. Its integral ``c_k`` must lie in (0, 1).
The density estimate at ``x`` is

    f(x) = sum_i K((x - X_i) / r) / (n * c_k * r**d)

and the regression estimate is the Nadaraya-Watson weighted mean of the
responses with the same weights.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate, special
from scipy.spatial import cKDTree

from .errors import MissingBound, MissingResponses, OutOfRange

Mode = Literal["density", "regression"]
SHAPES = ("truncated_gaussian", "bump")
DEFAULT_WIDTH = 0.3


def _radial_profile(shape: str, width: float):
    if shape == "truncated_gaussian":
        two_s2 = 2.0 * width * width

        def profile(rho):
            rho = np.asarray(rho, dtype=float)
            out = np.exp(-(rho * rho) / two_s2)
            return np.where(rho < 1.0, out, 0.0)

    elif shape == "bump":

        def profile(rho):
            rho = np.asarray(rho, dtype=float)
            inside = rho < 1.0
            safe = np.where(inside, 1.0 - rho * rho, 1.0)
            return np.where(inside, np.exp(1.0 - 1.0 / safe), 0.0)

    else:
        raise ValueError(f"unknown kernel shape {shape!r}; expected one of {SHAPES}")
    return profile


def compute_ck(shape: str, dimension: int, width: float = DEFAULT_WIDTH) -> float:
    """Integral of the kernel over the unit ball.

    Uses radial quadrature, ``|S^{d-1}| * int_0^1 K(rho) rho^(d-1) drho``,
    with relative tolerance 1e-8.

    Raises
    ------
    OutOfRange
        If the integral is not in (0, 1).
    """
    if dimension < 1:
        raise ValueError("dimension must be a positive integer")
    if shape == "truncated_gaussian" and not width > 0:
        raise ValueError("truncated_gaussian width must be positive")
    profile = _radial_profile(shape, width)
    sphere_area = 2.0 * math.pi ** (dimension / 2.0) / math.gamma(dimension / 2.0)
    value, _ = integrate.quad(
        lambda rho: float(profile(rho)) * rho ** (dimension - 1),
        0.0,
        1.0,
        epsabs=0.0,
        epsrel=1e-10,
        limit=200,
    )
    ck = sphere_area * value
    if not 0.0 < ck < 1.0:
        raise OutOfRange(
            f"kernel {shape} (width={width}) in dimension {dimension} integrates to "
            f"{ck:.6g}, outside (0, 1)"
        )
    return ck


def truncated_gaussian_ck(dimension: int, width: float) -> float:
    """Closed form ``(2 pi s^2)^(d/2) * P(chi2_d <= 1/s^2)``."""
    return (2.0 * math.pi * width * width) ** (dimension / 2.0) * special.gammainc(
        dimension / 2.0, 1.0 / (2.0 * width * width)
    )


@dataclass(frozen=True)
class KernelSpec:
    """A radial kernel satisfying the support/normalisation conditions.

    Construction fails with :class:`OutOfRange` when the kernel's integral
    is not in (0, 1).
    """

    shape: str = "truncated_gaussian"
    dimension: int = 2
    width: float = DEFAULT_WIDTH
    c_k: float = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "c_k", compute_ck(self.shape, self.dimension, self.width))

    def profile(self, rho: ArrayLike) -> NDArray[np.floating]:
        return _radial_profile(self.shape, self.width)(rho)

    def eval(self, x: ArrayLike, r: float = 1.0) -> NDArray[np.floating] | float:
        """``K(x / r)`` for a point or a stack of points (last axis = coordinates)."""
        if not r > 0:
            raise ValueError("bandwidth r must be positive")
        x = np.asarray(x, dtype=float)
        scalar = x.ndim <= 1
        pts = np.atleast_2d(x) if x.ndim else x.reshape(1, 1)
        values = self.profile(np.linalg.norm(pts, axis=-1) / r)
        return float(values[0]) if scalar else values


def eval_kernel(k: KernelSpec, x: ArrayLike, r: float = 1.0):
    return k.eval(x, r)


@dataclass
class LabeledSample:
    """Sample points with optional bounded responses."""

    points: NDArray[np.floating]
    responses: Optional[NDArray[np.floating]] = None
    y_max: Optional[float] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError("points must be an n x d array with n >= 1, d >= 1")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points contain non-finite coordinates")
        self.points = pts
        if self.responses is not None:
            y = np.asarray(self.responses, dtype=float).reshape(-1)
            if y.shape[0] != pts.shape[0]:
                raise ValueError("responses must have one entry per point")
            if not np.all(np.isfinite(y)):
                raise ValueError("responses contain non-finite values")
            if self.y_max is None:
                self.y_max = float(np.max(np.abs(y)))
            elif np.any(np.abs(y) > self.y_max):
                raise ValueError("some |Y_i| exceed y_max")
            self.responses = y

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class ModelBounds:
    """Model bounds used only by the theory-driven bandwidth rule."""

    p_max: Optional[float] = None
    p_min: Optional[float] = None
    y_max: Optional[float] = None


def _as_sample(data) -> LabeledSample:
    return data if isinstance(data, LabeledSample) else LabeledSample(np.asarray(data))


def _weight_sums(
    points: NDArray, queries: NDArray, r: float, k: KernelSpec, responses=None, threads: int = 1
):
    """Per-query kernel weight sums (and response-weighted sums)."""
    tree = cKDTree(points)

    def chunk(lo, hi):
        qtree = cKDTree(queries[lo:hi])
        pairs = qtree.sparse_distance_matrix(tree, r, output_type="ndarray")
        w = k.profile(pairs["v"] / r)
        rows = pairs["i"]
        wsum = np.bincount(rows, weights=w, minlength=hi - lo)
        ysum = None
        if responses is not None:
            ysum = np.bincount(rows, weights=w * responses[pairs["j"]], minlength=hi - lo)
        return wsum, ysum

    m = queries.shape[0]
    step = 2048
    bounds = [(lo, min(lo + step, m)) for lo in range(0, m, step)]
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda b: chunk(*b), bounds))
    else:
        parts = [chunk(*b) for b in bounds]
    wsum = np.concatenate([p[0] for p in parts]) if parts else np.zeros(0)
    ysum = np.concatenate([p[1] for p in parts]) if responses is not None and parts else None
    return wsum, ysum


def kde(data, queries: ArrayLike, r: float, k: KernelSpec, threads: int = 1) -> NDArray:
    """Density estimate at each row of ``queries``."""
    if not r > 0:
        raise ValueError("bandwidth r must be positive")
    data = _as_sample(data)
    q = np.atleast_2d(np.asarray(queries, dtype=float))
    wsum, _ = _weight_sums(data.points, q, r, k, threads=threads)
    return wsum / (data.n * k.c_k * r**data.d)


def kde_at(data, x: ArrayLike, r: float, k: KernelSpec) -> float:
    return float(kde(data, np.asarray(x, dtype=float).reshape(1, -1), r, k)[0])


def nadaraya_watson(data: LabeledSample, queries: ArrayLike, r: float, k: KernelSpec, threads: int = 1):
    """Regression estimate at each query; NaN where no sample lies within ``r``."""
    if data.responses is None:
        raise MissingResponses("regression estimate needs responses")
    if not r > 0:
        raise ValueError("bandwidth r must be positive")
    q = np.atleast_2d(np.asarray(queries, dtype=float))
    wsum, ysum = _weight_sums(data.points, q, r, k, data.responses, threads=threads)
    out = np.full(q.shape[0], np.nan)
    ok = wsum > 0
    out[ok] = ysum[ok] / wsum[ok]
    return out


def nw_at(data: LabeledSample, x: ArrayLike, r: float, k: KernelSpec) -> Optional[float]:
    value = nadaraya_watson(data, np.asarray(x, dtype=float).reshape(1, -1), r, k)[0]
    return None if np.isnan(value) else float(value)


def sample_values(data, r: float, k: KernelSpec, mode: Mode = "density", threads: int = 1) -> NDArray:
    """Estimator evaluated at every sample point (NaN where undefined)."""
    data = _as_sample(data)
    if mode == "density":
        return kde(data, data.points, r, k, threads=threads)
    if mode == "regression":
        return nadaraya_watson(data, data.points, r, k, threads=threads)
    raise ValueError(f"unknown mode {mode!r}")


def filter_points(data, L: float, r: float, k: KernelSpec, mode: Mode = "density", values=None) -> NDArray[np.intp]:
    """Indices of sample points whose estimate is at least ``L``.

    Points with an undefined regression estimate are never included.
    ``values`` may carry precomputed :func:`sample_values`.
    """
    if values is None:
        values = sample_values(data, r, k, mode)
    with np.errstate(invalid="ignore"):
        keep = np.asarray(values) >= L
    return np.flatnonzero(keep)


def theory_constant(
    mode: Mode,
    epsilon: float,
    c_k: float,
    p_max: Optional[float] = None,
    p_min: Optional[float] = None,
    y_max: Optional[float] = None,
) -> float:
    """Exponent constant of the high-probability bound for the level filter."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if p_max is None:
        raise MissingBound("p_max is required")
    if mode == "density":
        return epsilon**2 * c_k / (3.0 * p_max + epsilon)
    if mode == "regression":
        if p_min is None or y_max is None:
            raise MissingBound("regression needs p_min and y_max")
        num = epsilon**2 * p_min**2 * c_k
        den = 3.0 * (y_max**2 + epsilon**2) * p_max + 2.0 * epsilon * p_min * (y_max + epsilon)
        return num / den
    raise ValueError(f"unknown mode {mode!r}")


def recommended_bandwidth(
    n: int,
    d: int,
    epsilon: Optional[float] = None,
    mode: Mode = "density",
    bounds: Optional[ModelBounds] = None,
    kernel: Optional[KernelSpec] = None,
    safety: float = 1.01,
) -> float:
    """Bandwidth from ``n r^d = D log n``.

    With ``bounds`` the constant is ``D = safety / C*(epsilon/2)``. Without
    bounds the rule falls back to ``n r^d = (log n)^2``.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    logn = math.log(n)
    if bounds is None:
        return (logn * logn / n) ** (1.0 / d)
    if epsilon is None:
        raise ValueError("epsilon is required with explicit bounds")
    kernel = kernel or KernelSpec(dimension=d)
    c = theory_constant(mode, epsilon / 2.0, kernel.c_k, bounds.p_max, bounds.p_min, bounds.y_max)
    return (safety / c * logn / n) ** (1.0 / d)
