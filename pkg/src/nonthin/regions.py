"""Constructive subsets of C^1 and C^2 and their truncated point clouds.

A region is a small tree of constructors (disk, ball, segment, slab, ...).
Every constructor knows its exact nearest-point map, which gives exact
membership and distance; :func:`sample` turns ``E ∩ {|z| <= R}`` into a
deterministic, boundary-biased cloud of points.

Points are always complex arrays of shape ``(N, m)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MEMBER_TOL = 1e-9
GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


class RegionError(ValueError):
    """Invalid region construction."""


class EmptyRegionError(RegionError):
    """The truncation ``E ∩ {|z| <= R}`` is empty."""


def as_points(z, m=None) -> np.ndarray:
    """Coerce a point or list of points to a complex ``(N, m)`` array."""
    arr = np.asarray(z, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1) if m is None or arr.size == m else arr.reshape(-1, 1)
    if m is not None and arr.shape[1] != m:
        raise RegionError(f"expected points in C^{m}, got shape {arr.shape}")
    return arr


def _norms(points):
    return np.sqrt(np.sum(np.abs(points) ** 2, axis=1))


def _unit(v):
    v = np.asarray(v, dtype=complex).reshape(-1)
    n = np.linalg.norm(v)
    if n == 0:
        raise RegionError("direction / linear form must be nonzero")
    return v / n


@dataclass(frozen=True)
class Density:
    """Target point counts: on the boundary and strictly inside."""

    boundary: int = 256
    interior: int = 64

    def __post_init__(self):
        if self.boundary < 4 or self.interior < 0:
            raise RegionError("density needs >= 4 boundary points and >= 0 interior points")
        if self.boundary > 200_000 or self.interior > 200_000:
            raise RegionError("density exceeds the configured maximum of 200000 points")


def default_density(region: "Region", R: float) -> Density:
    """Default counts, growing linearly with ``R`` beyond ``R = 4`` (capped)."""
    scale = min(4.0, max(1.0, R / 4.0))
    if region.dim == 1:
        nb = int(128 * scale)
    else:
        nb = int(2048 * scale)
    return Density(nb, nb // 4)


# ---------------------------------------------------------------- primitives

def _circle(center, r, k, offset=0.0):
    return center + r * np.exp(2j * np.pi * (np.arange(k) + offset) / k)


def _sunflower(center, r, k):
    i = np.arange(k)
    return center + r * np.sqrt((i + 0.5) / k) * np.exp(1j * GOLDEN_ANGLE * i)


def _lobatto(a, b, k):
    """Chebyshev-Lobatto nodes on ``[a, b]`` in increasing order."""
    if k <= 1 or a == b:
        return np.array([0.5 * (a + b)])
    x = -np.cos(np.pi * np.arange(k) / (k - 1))
    return 0.5 * (a + b) + 0.5 * (b - a) * x


def _even_along(curve, k):
    """``k`` points spread evenly by arc length along a dense polyline (L, 2)."""
    seg = np.linalg.norm(np.diff(curve, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    if s[-1] == 0.0:
        return curve[:1]
    targets = np.linspace(0.0, s[-1], k)
    return np.column_stack([np.interp(targets, s, curve[:, 0]), np.interp(targets, s, curve[:, 1])])


def _torus_cloud(moduli, angles, frame):
    """Points ``frame @ (r1 e^{i a}, r2 e^{i b})`` over a grid of angles per modulus pair."""
    out = []
    base = 2 * np.pi * np.arange(angles) / angles
    for level, (r1, r2) in enumerate(moduli):
        shift = np.pi * (level % 2) / angles
        if r1 <= 0.0 and r2 <= 0.0:
            out.append(np.zeros((1, 2), dtype=complex))
        elif r1 <= 0.0:
            out.append(np.column_stack([np.zeros(angles), r2 * np.exp(1j * (base + shift))]))
        elif r2 <= 0.0:
            out.append(np.column_stack([r1 * np.exp(1j * base), np.zeros(angles)]))
        else:
            a, b = np.meshgrid(base, base + shift, indexing="ij")
            out.append(np.column_stack([(r1 * np.exp(1j * a)).ravel(), (r2 * np.exp(1j * b)).ravel()]))
    pts = np.vstack(out).astype(complex)
    return pts @ frame.T


def _angles_for(count):
    return int(np.clip(round((2 * count) ** (1 / 3)), 12, 32))


def _dedupe(points, flags=None):
    key = np.round(points * 1e10)
    _, idx = np.unique(np.column_stack([key.real, key.imag]), axis=0, return_index=True)
    idx = np.sort(idx)
    return (points[idx], flags[idx]) if flags is not None else points[idx]


def _thin(points, k):
    """Deterministic stride subsample down to at most ``k`` points."""
    if len(points) <= k:
        return points
    idx = np.unique(np.floor(np.linspace(0, len(points), k, endpoint=False)).astype(int))
    return points[idx]


@dataclass
class _Reinhardt:
    """A set ``{frame @ (r1 e^{ia}, r2 e^{ib}) : (r1, r2) in Ω}`` with Ω star-shaped.

    Ω is described in polar form over ``phi in [lo, hi]`` (angle in the
    modulus quadrant) by its radial function; ``walls`` are the sector edges
    that belong to the topological boundary.
    """

    frame: np.ndarray
    lo: float
    hi: float
    radial: object
    walls: tuple = ()

    def _curve(self, phis):
        r = np.array([self.radial(p) for p in phis])
        return np.column_stack([r * np.cos(phis), r * np.sin(phis)])

    def cloud(self, density: Density):
        A = _angles_for(density.boundary)
        n_levels = max(3, int(round(density.boundary / A**2)))
        parts = []
        for w in self.walls:
            rw = self.radial(w)
            t = np.linspace(0.0, rw, 64)
            parts.append(np.column_stack([t * np.cos(w), t * np.sin(w)]))
        parts.append(self._curve(np.linspace(self.lo, self.hi, 512)))
        dense = np.vstack(parts)
        moduli = _even_along(dense, n_levels)
        boundary = _torus_cloud(moduli, A, self.frame)
        boundary = _thin(boundary, density.boundary)
        n_int = int(round(density.interior / A**2))
        if density.interior == 0:
            interior = np.zeros((0, 2), dtype=complex)
        else:
            n_int = max(1, n_int)
            k_phi = max(1, int(math.ceil(math.sqrt(n_int))))
            k_s = max(1, int(math.ceil(n_int / k_phi)))
            phis = self.lo + (self.hi - self.lo) * (np.arange(k_phi) + 0.5) / k_phi
            curve = self._curve(phis)
            fracs = (np.arange(k_s) + 0.5) / (k_s + 0.5)
            inner = np.vstack([f * curve for f in fracs])[:n_int]
            interior = _thin(_torus_cloud(inner, A, self.frame), density.interior)
        return boundary, interior


# ------------------------------------------------------------------ regions

class Region:
    """Base class; subclasses are the constructors of the region language."""

    dim: int = 1
    bounded: bool = False

    def nearest(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def distance(self, z) -> np.ndarray:
        p = as_points(z, self.dim)
        return _norms(p - self.nearest(p))

    def contains(self, z) -> np.ndarray:
        p = as_points(z, self.dim)
        return self.distance(p) <= MEMBER_TOL * np.maximum(1.0, _norms(p))

    def circumradius(self) -> float:
        """Radius of a centred ball containing the set (``inf`` if unbounded)."""
        return math.inf

    def _cloud(self, R: float, density: Density):
        """Return ``(boundary_points, interior_points)`` of the truncation."""
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


def _c(x):
    x = complex(x)
    return [x.real, x.imag] if x.imag else x.real


def _cvec(v):
    return [_c(x) for x in np.asarray(v).reshape(-1)]


@dataclass(frozen=True, eq=False)
class Disk(Region):
    center: complex = 0j
    radius: float = 1.0
    dim = 1
    bounded = True

    def __post_init__(self):
        if not self.radius > 0:
            raise RegionError("disk radius must be positive")

    def nearest(self, p):
        w = p[:, 0] - self.center
        a = np.abs(w)
        out = np.where(a <= self.radius, p[:, 0], self.center + self.radius * w / np.where(a == 0, 1, a))
        return out.reshape(-1, 1)

    def circumradius(self):
        return abs(self.center) + self.radius

    def _cloud(self, R, density):
        boundary = _circle(self.center, self.radius, density.boundary)
        interior = _sunflower(self.center, self.radius, density.interior)
        if abs(self.center) + self.radius > R:
            arc = _circle(0, R, density.boundary)
            arc = arc[np.abs(arc - self.center) <= self.radius]
            boundary = np.concatenate([boundary[np.abs(boundary) <= R], arc])
            boundary = _thin(boundary, density.boundary)
            interior = interior[np.abs(interior) < R]
        return boundary.reshape(-1, 1), interior.reshape(-1, 1)

    def to_json(self):
        return {"type": "disk", "center": _c(self.center), "radius": self.radius}


@dataclass(frozen=True, eq=False)
class Ball(Region):
    """Euclidean ball of the given radius; ``radius = inf`` is the whole space."""

    radius: float = 1.0
    dimension: int = 2

    def __post_init__(self):
        if not self.radius > 0:
            raise RegionError("ball radius must be positive")
        if self.dimension not in (1, 2):
            raise RegionError("only C^1 and C^2 are supported")

    @property
    def dim(self):
        return self.dimension

    @property
    def bounded(self):
        return math.isfinite(self.radius)

    def nearest(self, p):
        n = _norms(p)
        scale = np.where(n <= self.radius, 1.0, self.radius / np.where(n == 0, 1, n))
        return p * scale[:, None]

    def circumradius(self):
        return self.radius

    def _cloud(self, R, density):
        rho = min(self.radius, R)
        if self.dim == 1:
            return (_circle(0, rho, density.boundary).reshape(-1, 1),
                    _sunflower(0, rho, density.interior).reshape(-1, 1))
        return _Reinhardt(np.eye(2), 0.0, math.pi / 2, lambda phi: rho).cloud(density)

    def to_json(self):
        r = self.radius if math.isfinite(self.radius) else "inf"
        return {"type": "ball", "radius": r, "dim": self.dimension}


@dataclass(frozen=True, eq=False)
class Polydisk(Region):
    r1: float = 1.0
    r2: float = 1.0
    dim = 2
    bounded = True

    def __post_init__(self):
        if not (self.r1 > 0 and self.r2 > 0):
            raise RegionError("polydisk radii must be positive")

    def nearest(self, p):
        out = p.copy()
        for k, r in enumerate((self.r1, self.r2)):
            a = np.abs(p[:, k])
            out[:, k] = np.where(a <= r, p[:, k], r * p[:, k] / np.where(a == 0, 1, a))
        return out

    def circumradius(self):
        return math.hypot(self.r1, self.r2)

    def _cloud(self, R, density):
        def radial(phi):
            c, s = math.cos(phi), math.sin(phi)
            return min(R, self.r1 / c if c > 1e-15 else math.inf, self.r2 / s if s > 1e-15 else math.inf)
        return _Reinhardt(np.eye(2), 0.0, math.pi / 2, radial).cloud(density)

    def to_json(self):
        return {"type": "polydisk", "radii": [self.r1, self.r2]}


@dataclass(frozen=True, eq=False)
class Segment(Region):
    """Real interval ``[a, b]`` in C."""

    a: float = -1.0
    b: float = 1.0
    dim = 1
    bounded = True

    def __post_init__(self):
        if not self.a < self.b:
            raise RegionError("segment needs a < b")

    def nearest(self, p):
        return np.clip(p[:, 0].real, self.a, self.b).astype(complex).reshape(-1, 1)

    def circumradius(self):
        return max(abs(self.a), abs(self.b))

    def _cloud(self, R, density):
        lo, hi = max(self.a, -R), min(self.b, R)
        if lo > hi:
            raise EmptyRegionError(f"segment [{self.a}, {self.b}] misses the ball of radius {R}")
        return _lobatto(lo, hi, density.boundary).astype(complex).reshape(-1, 1), np.zeros((0, 1), complex)

    def to_json(self):
        return {"type": "segment", "a": self.a, "b": self.b}


@dataclass(frozen=True, eq=False)
class Halfline(Region):
    """Real ray ``{origin + t * direction : t >= 0}``."""

    origin: tuple = (0j,)
    direction: tuple = (1 + 0j,)

    def __post_init__(self):
        o = np.asarray(self.origin, dtype=complex).reshape(-1)
        d = np.asarray(self.direction, dtype=complex).reshape(-1)
        if o.size != d.size or o.size not in (1, 2):
            raise RegionError("halfline origin and direction must both lie in C^1 or C^2")
        _unit(d)
        object.__setattr__(self, "origin", tuple(o))
        object.__setattr__(self, "direction", tuple(d))

    @property
    def dim(self):
        return len(self.origin)

    def _o_u(self):
        return np.asarray(self.origin), _unit(self.direction)

    def nearest(self, p):
        o, u = self._o_u()
        t = np.maximum(0.0, np.real((p - o) @ u.conj()))
        return o + t[:, None] * u

    def _cloud(self, R, density):
        o, u = self._o_u()
        proj = float(np.real(np.vdot(u, o)))
        disc = proj**2 - float(np.linalg.norm(o)) ** 2 + R**2
        if disc < 0:
            raise EmptyRegionError("halfline misses the truncation ball")
        t_hi = -proj + math.sqrt(disc)
        t_lo = max(0.0, -proj - math.sqrt(disc))
        if t_hi < t_lo:
            raise EmptyRegionError("halfline misses the truncation ball")
        t = _lobatto(t_lo, t_hi, density.boundary)
        return o + t[:, None] * u, np.zeros((0, self.dim), complex)

    def to_json(self):
        return {"type": "halfline", "origin": _cvec(self.origin), "direction": _cvec(self.direction)}


def _orthonormal_frame(form):
    """Unitary columns ``(u, v)`` with ``u ∝ conj(form)`` and ``form . v = 0``."""
    l = np.asarray(form, dtype=complex).reshape(-1)
    u = l.conj() / np.linalg.norm(l)
    v = np.array([-l[1], l[0]]) / np.linalg.norm(l)
    return np.column_stack([u, v])


@dataclass(frozen=True, eq=False)
class Slab(Region):
    """``{z : form(z) real and in [lo, hi]}``, ``form(z) = sum form_i z_i``."""

    form: tuple = (1 + 0j,)
    interval: tuple = (-1.0, 1.0)

    def __post_init__(self):
        l = np.asarray(self.form, dtype=complex).reshape(-1)
        if l.size not in (1, 2):
            raise RegionError("slab form must act on C^1 or C^2")
        _unit(l)
        lo, hi = map(float, self.interval)
        if not lo <= hi:
            raise RegionError("slab interval needs lo <= hi")
        object.__setattr__(self, "form", tuple(l))
        object.__setattr__(self, "interval", (lo, hi))

    @property
    def dim(self):
        return len(self.form)

    @property
    def bounded(self):
        return self.dim == 1

    def _l(self):
        return np.asarray(self.form)

    def nearest(self, p):
        l = self._l()
        tau = p @ l
        target = np.clip(tau.real, *self.interval)
        return p + ((target - tau)[:, None] * l.conj()) / np.vdot(l, l).real

    def circumradius(self):
        if self.dim == 2:
            return math.inf
        return max(abs(x) for x in self.interval) / float(np.linalg.norm(self._l()))

    def _cloud(self, R, density):
        l = self._l()
        nl = float(np.linalg.norm(l))
        lo, hi = max(self.interval[0], -R * nl), min(self.interval[1], R * nl)
        if lo > hi:
            raise EmptyRegionError("slab misses the truncation ball")
        if self.dim == 1:
            t = _lobatto(lo, hi, density.boundary)
            return (t / l[0]).reshape(-1, 1), np.zeros((0, 1), complex)
        frame = _orthonormal_frame(l)
        A = _angles_for(density.boundary)
        n_t = max(3, density.boundary // A)
        t = _lobatto(lo, hi, n_t)
        rho = np.sqrt(np.maximum(R**2 - (t / nl) ** 2, 0.0))
        ang = np.exp(2j * np.pi * np.arange(A) / A)
        u_part = (t / nl)[:, None]
        b = np.column_stack([np.repeat(u_part, A, axis=0).ravel(), (rho[:, None] * ang).ravel()])
        boundary = _thin(b @ frame.T, density.boundary)
        n_inner = density.interior // max(1, len(t) * A)
        inner = []
        for k in range(n_inner if density.interior else 0):
            f = (k + 1) / (n_inner + 1)
            inner.append(np.column_stack([np.repeat(u_part, A, axis=0).ravel(),
                                          (f * rho[:, None] * ang).ravel()]))
        interior = (np.vstack(inner) @ frame.T) if inner else np.zeros((0, 2), complex)
        return boundary, interior

    def to_json(self):
        return {"type": "slab", "form": _cvec(self.form), "interval": list(self.interval)}


@dataclass(frozen=True, eq=False)
class Cone(Region):
    """``{z : |form(z)| >= aperture * |form| * |z|}``; the whole plane when m = 1."""

    form: tuple = (1 + 0j, 0j)
    aperture: float = 0.5

    def __post_init__(self):
        l = np.asarray(self.form, dtype=complex).reshape(-1)
        if l.size not in (1, 2):
            raise RegionError("cone form must act on C^1 or C^2")
        _unit(l)
        if not 0 < self.aperture <= 1:
            raise RegionError("cone aperture must lie in (0, 1]")
        object.__setattr__(self, "form", tuple(l))

    @property
    def dim(self):
        return len(self.form)

    def _psi(self):
        return math.acos(self.aperture)

    def nearest(self, p):
        if self.dim == 1:
            return p.copy()
        frame = _orthonormal_frame(self.form)
        zeta = p @ frame.conj()
        x, y = np.abs(zeta[:, 0]), np.abs(zeta[:, 1])
        psi = self._psi()
        inside = y <= x * math.tan(psi) + 0.0
        proj = np.maximum(0.0, x * math.cos(psi) + y * math.sin(psi))
        nx = np.where(inside, x, proj * math.cos(psi))
        ny = np.where(inside, y, proj * math.sin(psi))
        ph0 = np.exp(1j * np.angle(zeta[:, 0]))
        ph1 = np.exp(1j * np.angle(zeta[:, 1]))
        return np.column_stack([nx * ph0, ny * ph1]) @ frame.T

    def _cloud(self, R, density):
        if self.dim == 1:
            return Ball(R, 1)._cloud(R, density)
        psi = self._psi()
        return _Reinhardt(_orthonormal_frame(self.form), 0.0, psi, lambda phi: R, walls=(psi,)).cloud(density)

    def to_json(self):
        return {"type": "cone", "form": _cvec(self.form), "aperture": self.aperture}


@dataclass(frozen=True, eq=False)
class Example1(Region):
    """``{|z2| <= 1} ∪ {z1 = 0}`` in C^2."""

    dim = 2

    def nearest(self, p):
        a = np.abs(p[:, 1])
        clip2 = np.where(a <= 1, p[:, 1], p[:, 1] / np.where(a == 0, 1, a))
        strip = np.column_stack([p[:, 0], clip2])
        line = np.column_stack([np.zeros(len(p)), p[:, 1]])
        d_strip = np.maximum(0.0, a - 1.0)
        d_line = np.abs(p[:, 0])
        return np.where((d_strip <= d_line)[:, None], strip, line)

    def _cloud(self, R, density):
        strip_b = int(density.boundary * 0.75)
        dens = Density(max(4, strip_b), int(density.interior * 0.75))

        def radial(phi):
            s = math.sin(phi)
            return min(R, 1.0 / s) if s > 1e-15 else R

        b1, i1 = _Reinhardt(np.eye(2), 0.0, math.pi / 2, radial).cloud(dens)
        k = max(4, density.boundary - len(b1))
        b2 = np.column_stack([np.zeros(k), _circle(0, R, k)])
        ki = max(0, density.interior - len(i1))
        i2 = np.column_stack([np.zeros(ki), _sunflower(0, R, ki)])
        return np.vstack([b1, b2]), np.vstack([i1, i2])

    def to_json(self):
        return {"type": "example1"}


@dataclass(frozen=True, eq=False)
class Product(Region):
    first: Region = None
    second: Region = None
    dim = 2

    def __post_init__(self):
        if self.first.dim + self.second.dim > 2:
            raise RegionError("product dimension exceeds 2")

    @property
    def bounded(self):
        return self.first.bounded and self.second.bounded

    def nearest(self, p):
        return np.column_stack([self.first.nearest(p[:, :1]), self.second.nearest(p[:, 1:])])

    def circumradius(self):
        return math.hypot(self.first.circumradius(), self.second.circumradius())

    def _cloud(self, R, density):
        # E_R is the union over rho of E_rho x F_sqrt(R^2 - rho^2)
        n_ladder = 8
        per = max(4, int(math.sqrt(density.boundary / n_ladder)))
        fd = Density(per, per // 4)
        pts, flags = [], []
        for phi in np.linspace(0.0, math.pi / 2, n_ladder):
            r1, r2 = R * math.cos(phi), R * math.sin(phi)
            try:
                s1 = sample(self.first, max(r1, 1e-300), fd)
                s2 = sample(self.second, max(r2, 1e-300), fd)
            except EmptyRegionError:
                continue
            a, b = np.meshgrid(np.arange(len(s1.points)), np.arange(len(s2.points)), indexing="ij")
            a, b = a.ravel(), b.ravel()
            pts.append(np.column_stack([s1.points[a, 0], s2.points[b, 0]]))
            flags.append(s1.boundary_mask[a] | s2.boundary_mask[b])
        if not pts:
            raise EmptyRegionError("product truncation is empty")
        pts, flags = _dedupe(np.vstack(pts), np.concatenate(flags))
        boundary = _thin(pts[flags], density.boundary)
        interior = _thin(pts[~flags], min(density.interior, len(boundary) // 4 + 1))
        return boundary, interior

    def to_json(self):
        return {"type": "product", "factors": [self.first.to_json(), self.second.to_json()]}


@dataclass(frozen=True, eq=False)
class Union(Region):
    parts: tuple = ()

    def __post_init__(self):
        if not self.parts:
            raise RegionError("union needs at least one part")
        if len({p.dim for p in self.parts}) != 1:
            raise RegionError("union parts must share a dimension")
        object.__setattr__(self, "parts", tuple(self.parts))

    @property
    def dim(self):
        return self.parts[0].dim

    @property
    def bounded(self):
        return all(p.bounded for p in self.parts)

    def nearest(self, p):
        cands = [part.nearest(p) for part in self.parts]
        d = np.array([_norms(p - c) for c in cands])
        best = np.argmin(d, axis=0)
        return np.stack(cands)[best, np.arange(len(p))]

    def circumradius(self):
        return max(p.circumradius() for p in self.parts)

    def _cloud(self, R, density):
        share = Density(max(4, density.boundary // len(self.parts)), density.interior // len(self.parts))
        bs, its = [], []
        for part in self.parts:
            try:
                b, i = part._cloud(R, share)
            except EmptyRegionError:
                continue
            bs.append(b)
            its.append(i)
        if not bs:
            raise EmptyRegionError("every part of the union misses the truncation ball")
        return np.vstack(bs), np.vstack(its)

    def to_json(self):
        return {"type": "union", "parts": [p.to_json() for p in self.parts]}


@dataclass(frozen=True, eq=False)
class Fatten(Region):
    """Closed ``epsilon``-neighbourhood ``{z : dist(z, base) <= epsilon}``."""

    base: Region = None
    epsilon: float = 0.1

    def __post_init__(self):
        if not self.epsilon > 0:
            raise RegionError("fattening radius must be positive")

    @property
    def dim(self):
        return self.base.dim

    @property
    def bounded(self):
        return self.base.bounded

    def nearest(self, p):
        nb = self.base.nearest(p)
        d = _norms(p - nb)
        far = d > self.epsilon
        out = p.copy()
        out[far] = nb[far] + self.epsilon * (p[far] - nb[far]) / d[far, None]
        return out

    def circumradius(self):
        return self.base.circumradius() + self.epsilon

    def _directions(self):
        if self.dim == 1:
            return np.exp(2j * np.pi * np.arange(16) / 16).reshape(-1, 1)
        ang = np.exp(2j * np.pi * np.arange(8) / 8)
        dirs = [np.column_stack([ang, np.zeros(8)]), np.column_stack([np.zeros(8), ang])]
        for a in ang[::2]:
            dirs.append(np.column_stack([ang, a * np.ones(8)]) / math.sqrt(2))
        return np.vstack(dirs)

    def _cloud(self, R, density):
        base = sample(self.base, R + self.epsilon, Density(max(4, density.boundary // 4), 0))
        p = base.points
        cands = (p[:, None, :] + self.epsilon * self._directions()[None, :, :]).reshape(-1, self.dim)
        nb = self.base.nearest(cands)
        d = _norms(cands - nb)
        keep = d > 1e-12
        cands, nb, d = cands[keep], nb[keep], d[keep]
        pushed = nb + self.epsilon * (cands - nb) / d[:, None]
        on_edge = self.base.distance(pushed) >= self.epsilon * (1 - 1e-9)
        inside = _norms(pushed) <= R
        boundary = _thin(_dedupe(pushed[on_edge & inside]), density.boundary)
        interior = p[_norms(p) <= R]
        interior = _thin(interior, min(density.interior, max(1, len(boundary) // 4)))
        return boundary, interior

    def to_json(self):
        return {"type": "fatten", "base": self.base.to_json(), "epsilon": self.epsilon}


@dataclass(frozen=True, eq=False)
class RemoveSlice(Region):
    """``base`` minus the hyperplane ``{form(z) = 0}``.

    Sampling drops points on the slice; no finer removal semantics exist.
    """

    base: Region = None
    form: tuple = (1 + 0j, 0j)

    def __post_init__(self):
        l = np.asarray(self.form, dtype=complex).reshape(-1)
        if l.size != self.base.dim:
            raise RegionError("slice form dimension must match the base region")
        _unit(l)
        object.__setattr__(self, "form", tuple(l))

    @property
    def dim(self):
        return self.base.dim

    @property
    def bounded(self):
        return self.base.bounded

    def nearest(self, p):
        return self.base.nearest(p)

    def _off_slice(self, p):
        return np.abs(p @ np.asarray(self.form)) > MEMBER_TOL * np.maximum(1.0, _norms(p))

    def contains(self, z):
        p = as_points(z, self.dim)
        return self.base.contains(p) & self._off_slice(p)

    def circumradius(self):
        return self.base.circumradius()

    def _cloud(self, R, density):
        b, i = self.base._cloud(R, density)
        return b[self._off_slice(b)], i[self._off_slice(i)]

    def is_example1_minus_axis(self):
        l = np.asarray(self.form)
        return isinstance(self.base, Example1) and abs(l[1]) < 1e-15

    def to_json(self):
        return {"type": "remove_slice", "base": self.base.to_json(), "form": _cvec(self.form)}


# -------------------------------------------------------------- operations

@dataclass
class SampledRegion:
    """Deterministic point cloud of ``spec ∩ {|z| <= R}``."""

    spec: Region
    R: float
    points: np.ndarray
    boundary_mask: np.ndarray
    density: Density = field(default_factory=Density)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def boundary_count(self) -> int:
        return int(self.boundary_mask.sum())

    @property
    def interior_count(self) -> int:
        return len(self.points) - self.boundary_count

    def __len__(self):
        return len(self.points)

    def scaled(self, s: float) -> "SampledRegion":
        """The cloud of ``s * E`` at radius ``s * R`` (spec kept for provenance)."""
        return SampledRegion(self.spec, s * self.R, s * self.points, self.boundary_mask.copy(), self.density)

    def subset(self, mask) -> "SampledRegion":
        mask = np.asarray(mask, dtype=bool)
        return SampledRegion(self.spec, self.R, self.points[mask], self.boundary_mask[mask], self.density)


def sample(spec: Region, R: float, density: Density | None = None) -> SampledRegion:
    """Discretize the truncation ``spec ∩ {|z| <= R}``.

    Raises :class:`EmptyRegionError` when the truncation has no sample points.
    """
    if not R > 0:
        raise RegionError("truncation radius must be positive")
    density = density or default_density(spec, R)
    boundary, interior = spec._cloud(R, density)
    boundary = boundary.reshape(-1, spec.dim)
    interior = interior.reshape(-1, spec.dim)
    slack = 1.0 + 1e-12
    boundary = boundary[_norms(boundary) <= R * slack]
    interior = interior[_norms(interior) <= R * slack]
    if len(boundary) == 0 and len(interior) == 0:
        raise EmptyRegionError(f"{type(spec).__name__} has no points within radius {R}")
    points = np.vstack([boundary, interior])
    mask = np.concatenate([np.ones(len(boundary), bool), np.zeros(len(interior), bool)])
    return SampledRegion(spec, float(R), points, mask, density)


def fatten(spec: Region, epsilon: float) -> Region:
    return Fatten(spec, float(epsilon))


def product(first: Region, second: Region) -> Region:
    return Product(first, second)


@dataclass(frozen=True)
class TruncationSchedule:
    radii: tuple

    def __post_init__(self):
        r = tuple(float(x) for x in self.radii)
        if not r or any(x <= 0 for x in r):
            raise RegionError("schedule radii must be positive")
        if any(b <= a for a, b in zip(r, r[1:])):
            raise RegionError("schedule radii must be strictly increasing")
        object.__setattr__(self, "radii", r)

    def __iter__(self):
        return iter(self.radii)

    def __len__(self):
        return len(self.radii)


def truncate_schedule(spec: Region, schedule, density: Density | None = None) -> list[SampledRegion]:
    if not isinstance(schedule, TruncationSchedule):
        schedule = TruncationSchedule(tuple(schedule))
    return [sample(spec, R, density) for R in schedule]


# ----------------------------------------------------------- closed forms

def segment_green(z, a: float, b: float):
    """Green function of the real segment ``[a, b]`` with pole at infinity."""
    w = (2 * np.asarray(z, dtype=complex) - (a + b)) / (b - a)
    root = np.sqrt(w - 1) * np.sqrt(w + 1)
    return np.log(np.maximum(np.abs(w + root), np.abs(w - root)))


def closed_form_green(spec: Region, z) -> float | None:
    """Exact untruncated Green value, or ``None`` where no formula is known."""
    p = as_points(z, spec.dim)[0]
    norm = float(np.linalg.norm(p))
    if isinstance(spec, Disk):
        return max(0.0, math.log(abs(p[0] - spec.center) / spec.radius)) if p[0] != spec.center else 0.0
    if isinstance(spec, Ball):
        if not math.isfinite(spec.radius) or norm == 0:
            return 0.0
        return max(0.0, math.log(norm / spec.radius))
    if isinstance(spec, Polydisk):
        vals = [math.log(abs(p[k]) / r) if p[k] != 0 else -math.inf for k, r in enumerate((spec.r1, spec.r2))]
        return max(0.0, *vals)
    if isinstance(spec, Segment):
        return float(segment_green(p[0], spec.a, spec.b))
    if isinstance(spec, Halfline):
        return 0.0
    if isinstance(spec, RemoveSlice) and spec.is_example1_minus_axis():
        return max(0.0, math.log(norm)) if norm > 0 else 0.0
    return None


# -------------------------------------------------------------------- JSON

def _parse_complex(x):
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise RegionError(f"complex number must be [re, im], got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, str):
        return complex(x.replace(" ", "").replace("i", "j"))
    return complex(x)


def parse_vector(v):
    """``3``, ``[1, 2]``, ``[[1, 0], 2]`` or ``"1+2j"`` entries to a complex tuple."""
    if not isinstance(v, (list, tuple)):
        return (_parse_complex(v),)
    return tuple(_parse_complex(t) for t in v)


def _radius(x):
    return math.inf if str(x).lower() in ("inf", "infinity") else float(x)


def from_json(obj: dict) -> Region:
    """Build a region from its JSON description (see ``schemas/region.schema.json``)."""
    if not isinstance(obj, dict) or "type" not in obj:
        raise RegionError("region spec must be an object with a 'type'")
    t = obj["type"]
    try:
        if t == "disk":
            return Disk(_parse_complex(obj.get("center", 0)), float(obj["radius"]))
        if t == "ball":
            return Ball(_radius(obj["radius"]), int(obj.get("dim", 2)))
        if t == "polydisk":
            r1, r2 = obj["radii"]
            return Polydisk(float(r1), float(r2))
        if t == "segment":
            return Segment(float(obj["a"]), float(obj["b"]))
        if t == "halfline":
            return Halfline(parse_vector(obj.get("origin", 0)), parse_vector(obj.get("direction", 1)))
        if t == "slab":
            lo, hi = obj["interval"]
            return Slab(parse_vector(obj["form"]), (float(lo), float(hi)))
        if t == "cone":
            return Cone(parse_vector(obj["form"]), float(obj["aperture"]))
        if t == "example1":
            return Example1()
        if t == "product":
            f1, f2 = obj["factors"]
            return Product(from_json(f1), from_json(f2))
        if t == "union":
            return Union(tuple(from_json(p) for p in obj["parts"]))
        if t == "fatten":
            return Fatten(from_json(obj["base"]), float(obj["epsilon"]))
        if t == "remove_slice":
            return RemoveSlice(from_json(obj["base"]), parse_vector(obj["form"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, RegionError):
            raise
        raise RegionError(f"bad '{t}' region: {exc}") from exc
    raise RegionError(f"unknown region type {t!r}")
