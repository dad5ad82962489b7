"""Translation-invariant hyperplane measures ``t * (Lebesgue x R)``.

A hyperplane is parameterized by a direction ``u`` drawn from the
directional distribution ``R`` and a signed offset ``r``; the offset carries
Lebesgue measure on the whole real line.  With this normalization ``t`` is
the surface intensity of the induced Poisson hyperplane process and the mass
of the hyperplanes hitting a convex body ``K`` is ``t * E_R[width_u(K)]``,
independent of where ``K`` sits relative to the origin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import ConvexPolytope, Hyperplane, diameter, mean_width, unit_vector

MAX_PROPOSALS = 10**6


class ConfigurationError(ValueError):
    pass


class SamplingError(RuntimeError):
    pass


@dataclass(frozen=True)
class DirectionalDistribution:
    """Isotropic law on the unit circle/sphere, or a finite weighted set of directions."""

    dim: int
    kind: str = "isotropic"
    atoms: tuple = ()

    @property
    def is_isotropic(self) -> bool:
        return self.kind == "isotropic"

    def sample(self, rng) -> tuple:
        if self.kind == "isotropic":
            if self.dim == 2:
                a = 2.0 * math.pi * rng.random()
                return (math.cos(a), math.sin(a))
            z = 2.0 * rng.random() - 1.0
            a = 2.0 * math.pi * rng.random()
            s = math.sqrt(max(0.0, 1.0 - z * z))
            return (s * math.cos(a), s * math.sin(a), z)
        x = rng.random()
        acc = 0.0
        for u, w in self.atoms:
            acc += w
            if x < acc:
                return u
        return self.atoms[-1][0]

    def mean_width(self, c) -> float:
        """``E_R[width_u(c)]``."""
        if self.kind == "isotropic":
            return mean_width(c)
        total = 0.0
        for u, w in self.atoms:
            vals = [sum(a * b for a, b in zip(v, u)) for v in c.vertices]
            total += w * (max(vals) - min(vals))
        return total

    def to_json(self) -> dict:
        if self.kind == "isotropic":
            return {"kind": "isotropic", "dim": self.dim}
        return {"kind": "discrete", "atoms": [{"u": list(u), "w": w} for u, w in self.atoms]}


def make_directional(spec, dim: int | None = None) -> DirectionalDistribution:
    """Build a validated directional distribution from its JSON-style description.

    ``{"kind": "isotropic"}`` needs ``dim`` (argument or ``"dim"`` key);
    ``{"kind": "discrete", "atoms": [{"u": [...], "w": ...}, ...]}`` infers it.
    Weights are normalized; the atom directions must span the whole space.
    """
    if isinstance(spec, DirectionalDistribution):
        return spec
    kind = spec.get("kind")
    if kind == "isotropic":
        d = spec.get("dim", dim)
        if d not in (2, 3):
            raise ConfigurationError("isotropic directional distribution needs dim 2 or 3")
        return DirectionalDistribution(int(d), "isotropic")
    if kind != "discrete":
        raise ConfigurationError(f"unknown directional kind {kind!r}")
    raw = spec.get("atoms") or []
    if not raw:
        raise ConfigurationError("discrete directional distribution needs atoms")
    try:
        dirs = [unit_vector(a["u"]) for a in raw]
        weights = [float(a["w"]) for a in raw]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"malformed atom: {exc}") from exc
    d = len(dirs[0])
    if any(len(u) != d for u in dirs) or (dim is not None and d != dim):
        raise ConfigurationError("atom directions have inconsistent dimension")
    if any(not (w > 0.0) or not math.isfinite(w) for w in weights):
        raise ConfigurationError("atom weights must be positive")
    if np.linalg.matrix_rank(np.asarray(dirs), tol=1e-9) < d:
        raise ConfigurationError(
            "atom directions do not span R^%d: the support of the directional "
            "distribution must span the whole space (span(supp(R)) = R^d)" % d)
    total = math.fsum(weights)
    atoms = tuple((u, w / total) for u, w in zip(dirs, weights))
    return DirectionalDistribution(d, "discrete", atoms)


def isotropic(dim: int) -> DirectionalDistribution:
    return DirectionalDistribution(dim, "isotropic")


def axis_parallel(dim: int) -> DirectionalDistribution:
    """Equal-weight coordinate directions (the Manhattan model)."""
    atoms = []
    for i in range(dim):
        e = [0.0] * dim
        e[i] = 1.0
        atoms.append({"u": e, "w": 1.0})
    return make_directional({"kind": "discrete", "atoms": atoms})


@dataclass(frozen=True)
class HyperplaneMeasure:
    directional: DirectionalDistribution
    time_scale: float = 1.0

    def __post_init__(self):
        if not (self.time_scale > 0.0) or not math.isfinite(self.time_scale):
            raise ConfigurationError("time scale must be positive and finite")

    @property
    def dim(self) -> int:
        return self.directional.dim

    def scaled(self, factor: float) -> "HyperplaneMeasure":
        return HyperplaneMeasure(self.directional, self.time_scale * factor)


def hitting_mass(measure: HyperplaneMeasure, c: ConvexPolytope) -> float:
    """Mass of the hyperplanes hitting ``c``.

    Isotropic case: ``t * mean_width(c)``, i.e. ``t * perimeter / pi`` for a
    polygon.  Discrete case: ``t * sum_i w_i * width_{u_i}(c)``.
    """
    return measure.time_scale * measure.directional.mean_width(c)


def clipped_interval_length(c, u) -> float:
    """Length of ``[hmin, hmax] ∩ (0, inf)`` for the support interval of ``c`` along ``u``."""
    vals = [sum(a * b for a, b in zip(v, u)) for v in c.vertices]
    lo, hi = min(vals), max(vals)
    return max(0.0, hi - max(lo, 0.0))


def sample_hitting_counted(measure: HyperplaneMeasure, c: ConvexPolytope, rng,
                           envelope: float | None = None):
    """Draw from the normalized hitting law; also return the number of proposals.

    Rejection scheme: ``u ~ R`` is accepted with probability
    ``width_u(c) / diam(c)``, then the offset is uniform on the support
    interval.
    """
    if envelope is None:
        envelope = diameter(c.vertices)
    if not envelope > 0.0:
        raise SamplingError("cannot sample hyperplanes hitting a degenerate polytope")
    verts = c.vertices
    directional = measure.directional
    for n in range(1, MAX_PROPOSALS + 1):
        u = directional.sample(rng)
        if len(u) == 2:
            ux, uy = u
            vals = [ux * x + uy * y for x, y in verts]
        else:
            ux, uy, uz = u
            vals = [ux * x + uy * y + uz * z for x, y, z in verts]
        lo = min(vals)
        w = max(vals) - lo
        if rng.random() * envelope < w:
            return Hyperplane.from_unit(u, lo + w * rng.random()), n
    raise SamplingError(
        f"no hitting hyperplane accepted after {MAX_PROPOSALS} proposals; "
        "the directional distribution may not span the space")


def sample_hitting(measure: HyperplaneMeasure, c: ConvexPolytope, rng) -> Hyperplane:
    return sample_hitting_counted(measure, c, rng)[0]
