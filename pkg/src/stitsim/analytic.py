"""Closed-form laws of typical maximal polytopes of isotropic STIT tessellations.

Typical k-dimensional maximal polytopes are mixtures of rescaled typical
k-faces of Poisson hyperplane tessellations: the mixing time ``s`` has
density ``d s^(d-1) / t^d`` on ``(0, t)``.  In the isotropic case the typical
Poisson edge at intensity ``s`` is exponential with rate ``gamma1(d) * s``,
which yields the I-segment length density ``p_d`` below.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EPS_GAMMA = 1e-15
MAX_ITER = 500


class UnsupportedError(ValueError):
    pass


def _check_dim(d):
    if d not in (2, 3):
        raise ValueError(f"dimension must be 2 or 3, got {d!r}")


# ---------------------------------------------------------------------------
# incomplete gamma

def _gamma_series(a, x):
    # gamma(a, x) = x^a e^-x sum_n x^n / (a (a+1) ... (a+n))
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * EPS_GAMMA:
            break
    return total * math.exp(-x + a * math.log(x))


def _upper_gamma_cf(a, x):
    # modified Lentz evaluation of the continued fraction for Gamma(a, x)
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    dd = 1.0 / b
    h = dd
    for i in range(1, MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        dd = an * dd + b
        if abs(dd) < tiny:
            dd = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        dd = 1.0 / dd
        delta = dd * c
        h *= delta
        if abs(delta - 1.0) < EPS_GAMMA:
            break
    return math.exp(-x + a * math.log(x)) * h


def lower_incomplete_gamma(a: float, x: float) -> float:
    """Unnormalized lower incomplete gamma ``int_0^x u^(a-1) e^-u du``.

    Uses the power series below ``x = a + 1`` and the continued fraction for
    the upper function above it.
    """
    if a <= 0.0:
        raise ValueError("a must be positive")
    if x < 0.0:
        raise ValueError("x must be non-negative")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return _gamma_series(a, x)
    return math.gamma(a) - _upper_gamma_cf(a, x)


def upper_incomplete_gamma(a: float, x: float) -> float:
    if a <= 0.0:
        raise ValueError("a must be positive")
    if x < 0.0:
        raise ValueError("x must be non-negative")
    if x < a + 1.0:
        return math.gamma(a) - _gamma_series(a, x) if x > 0.0 else math.gamma(a)
    return _upper_gamma_cf(a, x)


# ---------------------------------------------------------------------------
# constants

def gamma1(d: int) -> float:
    """``Gamma(d/2) / (Gamma(1/2) Gamma((d+1)/2))``; 2/pi in the plane, 1/2 in space."""
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise ValueError("d must be a positive integer")
    return math.exp(math.lgamma(d / 2) - math.lgamma(0.5) - math.lgamma((d + 1) / 2))


def unit_ball_volume(j: int) -> float:
    return math.pi ** (j / 2) / math.gamma(j / 2 + 1)


def intensity_coefficient(d: int, k: int) -> float:
    """Ratio of the k-maximal-polytope intensity of STIT to the k-face intensity of PHT.

    Equals ``(d - k) / d * 2^(d-k-1)``.
    """
    _check_dim(d)
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= d - 1:
        raise ValueError(f"k must lie in [1, {d - 1}]")
    return (d - k) / d * 2.0 ** (d - k - 1)


def incidence_coefficient(d: int, k: int) -> int:
    """Number of facets containing an interior k-face of a Poisson hyperplane tessellation."""
    _check_dim(d)
    if not 1 <= k <= d - 1:
        raise ValueError(f"k must lie in [1, {d - 1}]")
    return (d - k) * 2 ** (d - k - 1)


# ---------------------------------------------------------------------------
# I-segment length law

def _check_tx(t, x):
    if not t > 0.0:
        raise ValueError("t must be positive")
    if not x > 0.0:
        raise ValueError("segment length must be positive")


def isegment_density(d: int, t: float, x: float) -> float:
    """Density ``p_d(x)`` of the typical I-segment length, isotropic case.

    ``p_d(x) = d / ((g t)^d x^(d+1)) * gamma(d+1, g t x)`` with ``g = gamma1(d)``
    and the unnormalized lower incomplete gamma function.
    """
    _check_dim(d)
    _check_tx(t, x)
    gt = gamma1(d) * t
    return d / (gt ** d * x ** (d + 1)) * lower_incomplete_gamma(d + 1.0, gt * x)


def isegment_cdf(d: int, t: float, x: float) -> float:
    """``P(L <= x) = 1 - d * gamma(d, y) / y^d`` with ``y = gamma1(d) t x``."""
    _check_dim(d)
    if not t > 0.0:
        raise ValueError("t must be positive")
    if x <= 0.0:
        return 0.0
    y = gamma1(d) * t * x
    if y < 1e-3:
        # d gamma(d,y)/y^d = e^-y (1 + tail), tail = sum_{n>=1} y^n / ((d+1) ... (d+n))
        tail = 0.0
        term = 1.0
        for n in range(1, 30):
            term *= y / (d + n)
            tail += term
        return -math.expm1(-y) - math.exp(-y) * tail
    return 1.0 - d * lower_incomplete_gamma(float(d), y) / y ** d


def isegment_cdf_array(d: int, t: float, x) -> np.ndarray:
    """Vectorized :func:`isegment_cdf`.

    For integer ``d``, ``d gamma(d, y) / y^d = d! (1 - e^-y sum_{n<d} y^n/n!) / y^d``;
    below ``y = 1/2`` that difference cancels, so the series form is used there.
    """
    _check_dim(d)
    if not t > 0.0:
        raise ValueError("t must be positive")
    x = np.asarray(x, dtype=float)
    y = gamma1(d) * t * np.where(x > 0.0, x, 0.0)
    out = np.zeros_like(y)
    small = (y > 0.0) & (y < 0.5)
    ys = y[small]
    tail = np.zeros_like(ys)
    term = np.ones_like(ys)
    for n in range(1, 30):
        term = term * ys / (d + n)
        tail += term
    out[small] = -np.expm1(-ys) - np.exp(-ys) * tail
    big = y >= 0.5
    yb = y[big]
    partial = np.zeros_like(yb)
    term = np.ones_like(yb)
    for n in range(d):
        partial += term
        term = term * yb / (n + 1)
    out[big] = 1.0 - math.factorial(d) * -np.expm1(np.log(partial) - yb) / yb ** d
    return out


def isegment_moment(d: int, t: float, m: int) -> float:
    """``E[L^m]``; finite only for ``m <= d - 1`` (infinite otherwise)."""
    _check_dim(d)
    if m < 0:
        raise ValueError("moment order must be non-negative")
    if m >= d:
        return math.inf
    return math.factorial(m) / gamma1(d) ** m * d / ((d - m) * t ** m)


def isegment_mean(d: int, t: float) -> float:
    """``d / ((d - 1) gamma1 t)``: pi/t in the plane, 3/t in space."""
    return isegment_moment(d, t, 1)


def isegment_variance(d: int, t: float) -> float:
    m1 = isegment_moment(d, t, 1)
    return isegment_moment(d, t, 2) - m1 * m1


def tail_constant(d: int, t: float) -> float:
    """Limit of ``x^(d+1) p_d(x)`` as ``x`` grows: ``d * d! / (gamma1 t)^d``."""
    _check_dim(d)
    return d * math.factorial(d) / (gamma1(d) * t) ** d


def edge_density(d: int, s: float, x: float) -> float:
    """Exponential density of the typical Poisson edge at intensity ``s``."""
    rate = gamma1(d) * s
    return rate * math.exp(-rate * x) if x >= 0.0 else 0.0


# ---------------------------------------------------------------------------
# birth times

def birth_time_density(d: int, t: float, s: float) -> float:
    """``d s^(d-1) / t^d`` on ``(0, t)``, zero elsewhere."""
    _check_dim(d)
    if not t > 0.0:
        raise ValueError("t must be positive")
    if not 0.0 < s < t:
        return 0.0
    return d * s ** (d - 1) / t ** d


def birth_time_cdf(d: int, t: float, s):
    s = np.clip(np.asarray(s, dtype=float) / t, 0.0, 1.0)
    return s ** d


def birth_time_mean(d: int, t: float) -> float:
    return d / (d + 1.0) * t


# ---------------------------------------------------------------------------
# mean intrinsic volumes

def mean_intrinsic_volume_isotropic(j: int, k: int, d: int, t: float,
                                    directional=None) -> float:
    """Mean j-th intrinsic volume of the typical k-dimensional maximal polytope.

    Isotropic case only:
    ``d / ((d-j) kappa_j) * C(k, j) * (2 Gamma(1/2) Gamma((d+1)/2) / Gamma(d/2))^j / t^j``.
    """
    _check_dim(d)
    if directional is not None and not getattr(directional, "is_isotropic", False):
        raise UnsupportedError("mean intrinsic volumes are only available for isotropic R")
    if not 0 <= j <= k <= d - 1:
        raise ValueError("need 0 <= j <= k <= d - 1")
    if not t > 0.0:
        raise ValueError("t must be positive")
    c = 2.0 * math.gamma(0.5) * math.gamma((d + 1) / 2) / math.gamma(d / 2)
    return d / ((d - j) * unit_ball_volume(j)) * math.comb(k, j) * c ** j / t ** j


# ---------------------------------------------------------------------------
# mixture sampler

@dataclass(frozen=True)
class MixtureLaw:
    """Mixing law of the rescaling time: density ``d s^(d-1) / t^d`` on ``(0, t)``."""

    t: float
    d: int
    k: int

    def density(self, s: float) -> float:
        return birth_time_density(self.d, self.t, s)

    def sample_time(self, rng) -> float:
        # inverse transform of (s/t)^d
        return self.t * rng.random() ** (1.0 / self.d)


def sample_typical_mixture(k: int, d: int, t: float, measure, rng, margin: float = 20.0,
                           max_tries: int = 10_000):
    """Draw ``(face, s)`` from the birth-time-marked typical maximal polytope law.

    ``s`` has density ``d s^(d-1)/t^d``.  Because the hyperplane process at
    intensity ``s`` is the one at intensity 1 shrunk by ``1/s``, the face is
    drawn at intensity 1 and rescaled.

    Faces are indexed by their reference point (lowest vertex along a fixed
    generic direction); every vertex is the reference point of exactly
    ``C(d, k)`` k-faces.  A vertex of the Poisson arrangement placed at the
    origin is produced by adding ``d`` hyperplanes through the origin, with
    i.i.d. normals from the directional law accepted with probability
    ``|det(u_1, ..., u_d)|``, to an independent Poisson process in the cube
    ``[-margin, margin]^d``.  One of the ``C(d, k)`` faces whose lowest vertex
    is the origin is returned uniformly.  This is the typical k-face; faces
    longer than ``margin`` are clipped, which is negligible at the default.

    Returns
    -------
    face : Face
        Vertices scaled by ``1/s``, reference point at the origin.
    s : float
    """
    from .geometry import Hyperplane, box
    from .pht import Face, PhtTessellation, draw_hyperplanes, extract_faces
    from .stats import _REF_DIR

    _check_dim(d)
    if not 1 <= k <= d - 1:
        raise ValueError(f"k must lie in [1, {d - 1}]")
    if measure.dim != d:
        raise ValueError("measure dimension does not match d")
    s = MixtureLaw(t, d, k).sample_time(rng)
    window = box((-margin,) * d, (margin,) * d)
    u_ref = _REF_DIR[d]
    tol = 1e-9 * margin
    for _ in range(max_tries):
        U = np.array([measure.directional.sample(rng) for _ in range(d)])
        if rng.random() >= abs(np.linalg.det(U)):
            continue
        pinned = [Hyperplane.from_unit(tuple(map(float, u)), 0.0) for u in U]
        Y = PhtTessellation(window, 1.0, measure,
                            pinned + draw_hyperplanes(window, measure, 1.0, rng), [window])
        lowest = []
        for f in extract_faces(Y, k, only=range(d)):
            p = min(f.vertices, key=lambda v: sum(a * b for a, b in zip(v, u_ref)))
            if max(abs(x) for x in p) < tol:
                lowest.append(f)
        if len(lowest) != math.comb(d, k):
            continue
        f = lowest[int(rng.integers(len(lowest)))]
        verts = tuple(tuple(x / s for x in v) for v in f.vertices)
        return Face(verts, f.carriers, f.boundary), s
    raise RuntimeError("could not place a vertex at the origin")
