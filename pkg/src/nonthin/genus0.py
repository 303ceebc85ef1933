"""Genus-zero families, counting functions and the growth theorems.

Every family here is a function of one linear form, ``P_n(z) = F_n(l(z))``
with ``F_n(s) = a s^alpha prod_j (1 - s / c_j)``.  The slice through a unit
representative ``lam`` is then ``P_n(w lam) = F_n(w l(lam))`` and its zeros
are exactly ``c_j / l(lam)``.  Products are always evaluated as sums of
logarithms; the phase is tracked separately and only when asked for.

Lazily truncated zero lists declare a ``tail_radius`` (every zero with
``|c| < tail_radius`` is listed) and a ``tail_bound`` on the sum of
``1/|c|`` over the zeros that are not listed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .regions import SampledRegion

GOLDEN = 0.5 * (1.0 + math.sqrt(5.0))
DEFAULT_DIRECTIONS = 2048
DEFAULT_QUADRATURE = 4096
CIRCLE_NUDGE = 1e-9


class GenusZeroError(ValueError):
    pass


class UncertainCountError(GenusZeroError):
    """A lazily truncated zero list cannot decide the requested quantity."""


# ---------------------------------------------------------------- slice data

@dataclass(frozen=True)
class ZeroData:
    """``a s^alpha prod (1 - s/c_j)^{mult_j}`` in the coordinate ``s``.

    Zeros are sorted by modulus.  ``tail_radius = inf`` means the list is
    complete.
    """

    log_abs_a: float
    arg_a: float
    alpha: int
    zeros: np.ndarray
    mult: np.ndarray
    tail_radius: float = math.inf
    tail_bound: float = 0.0

    def __post_init__(self):
        z = np.asarray(self.zeros, dtype=complex).reshape(-1)
        m = np.asarray(self.mult, dtype=np.int64).reshape(-1)
        if z.size != m.size:
            raise GenusZeroError("one multiplicity per zero")
        if np.any(z == 0):
            raise GenusZeroError("zeros at the origin belong in alpha, not the zero list")
        if np.any(m < 1) or self.alpha < 0:
            raise GenusZeroError("multiplicities must be >= 1 and alpha >= 0")
        order = np.argsort(np.abs(z), kind="stable")
        object.__setattr__(self, "zeros", z[order])
        object.__setattr__(self, "mult", m[order])
        if self.lazy and not np.isfinite(self.tail_bound):
            raise GenusZeroError("a lazy zero list needs a finite tail bound")

    @property
    def lazy(self) -> bool:
        return math.isfinite(self.tail_radius)

    @property
    def a(self) -> complex:
        return complex(math.exp(self.log_abs_a) * np.exp(1j * self.arg_a))

    @property
    def reciprocal_sum(self) -> float:
        """``sum 1/|c_j|`` with multiplicity, including the declared tail."""
        return float(np.sum(self.mult / np.abs(self.zeros))) + self.tail_bound

    def rescaled(self, l: complex) -> "ZeroData":
        """Data of ``w -> F(w l)``: zeros ``c / l``, leading term ``a l^alpha``."""
        if l == 0:
            raise GenusZeroError("the form vanishes on this direction")
        al = abs(l)
        return ZeroData(self.log_abs_a + self.alpha * math.log(al), self.arg_a + self.alpha * np.angle(l),
                        self.alpha, self.zeros / l, self.mult, self.tail_radius / al, self.tail_bound * al)

    def log_abs(self, s, upto: int | None = None) -> np.ndarray:
        """``log |F(s)|`` over an array of ``s`` using the first ``upto`` zeros."""
        s = np.asarray(s, dtype=complex)
        flat = s.reshape(-1)
        zeros, mult = self.zeros[:upto], self.mult[:upto]
        out = np.full(flat.shape, self.log_abs_a)
        if self.alpha:
            with np.errstate(divide="ignore"):
                out += self.alpha * np.log(np.abs(flat))
        # chunk so the (points x zeros) block stays small
        step = max(1, 2_000_000 // max(1, zeros.size))
        with np.errstate(divide="ignore"):
            for i in range(0, flat.size, step):
                block = flat[i:i + step, None]
                out[i:i + step] += np.log(np.abs(1.0 - block / zeros[None, :])) @ mult
        return out.reshape(s.shape)

    def phase(self, s, upto: int | None = None) -> np.ndarray:
        s = np.asarray(s, dtype=complex).reshape(-1)
        zeros, mult = self.zeros[:upto], self.mult[:upto]
        out = np.full(s.shape, self.arg_a) + self.alpha * np.angle(s)
        out += np.angle(1.0 - s[:, None] / zeros[None, :]) @ mult
        return out


def _zero_data_from_roots(roots, log_scale: float = 0.0, arg_scale: float = 0.0) -> ZeroData:
    """``scale * prod (s - r)`` rewritten in canonical form."""
    roots = np.asarray(roots, dtype=complex)
    at_origin = roots == 0
    rest = roots[~at_origin]
    # s - r = -r (1 - s/r)
    log_a = log_scale + float(np.sum(np.log(np.abs(rest))))
    arg_a = arg_scale + float(np.sum(np.angle(-rest)))
    values, counts = _collapse(rest)
    return ZeroData(log_a, arg_a, int(at_origin.sum()), values, counts)


def _collapse(values):
    if values.size == 0:
        return values, np.zeros(0, dtype=np.int64)
    uniq, inverse = np.unique(np.round(values, 15), return_inverse=True)
    counts = np.bincount(inverse.reshape(-1))
    first = np.array([values[np.flatnonzero(inverse == k)[0]] for k in range(uniq.size)])
    return first, counts


# ------------------------------------------------------------------ weights

def _weight_rule(spec):
    if callable(spec):
        return spec
    if spec in (None, "n"):
        return lambda n: float(n)
    if isinstance(spec, dict) and "power" in spec:
        p = float(spec["power"])
        return lambda n: float(n) ** p
    if isinstance(spec, (int, float)):
        c = float(spec)
        return lambda n: c
    raise GenusZeroError(f"unknown weight rule {spec!r}")


# ----------------------------------------------------------------- families

@dataclass(frozen=True, eq=False)
class GenusZeroFamily:
    """Base class: ``P_n(z) = F_n(l(z))`` for a linear form ``l``."""

    form: tuple = (1 + 0j,)
    weights: object = "n"

    constructor = "abstract"

    def __post_init__(self):
        l = np.asarray(self.form, dtype=complex).reshape(-1)
        if l.size not in (1, 2):
            raise GenusZeroError("only C^1 and C^2 are supported")
        if not np.any(l != 0):
            raise GenusZeroError("the linear form must be nonzero")
        object.__setattr__(self, "form", tuple(complex(x) for x in l))
        object.__setattr__(self, "_k", _weight_rule(self.weights))
        object.__setattr__(self, "data", lru_cache(maxsize=256)(self._data))

    @property
    def dim(self) -> int:
        return len(self.form)

    def k(self, n: int) -> float:
        k = float(self._k(n))
        if not k >= 1:
            raise GenusZeroError(f"weight k_{n} = {k} must be >= 1")
        return k

    def _data(self, n: int) -> ZeroData:
        raise NotImplementedError

    def form_value(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if z.ndim == 0:
            z = z.reshape(1, 1)
        z = z.reshape(-1, self.dim)
        return z @ np.asarray(self.form)

    def slice(self, n: int, lam) -> ZeroData:
        """Canonical data of ``w -> P_n(w lam)``."""
        return self.data(n).rescaled(complex(self.form_value(lam)[0]))

    def weights_json(self):
        return self.weights if not callable(self.weights) else "custom"

    def to_json(self) -> dict:
        return {"constructor": self.constructor, "form": [[x.real, x.imag] for x in self.form],
                "weights": self.weights_json()}


@dataclass(frozen=True, eq=False)
class LinearFormProduct(GenusZeroFamily):
    """``prod_{j <= count(n)} (1 - l(z) / c_j)`` with ``c_j = scale * j`` by default."""

    scale: float = 1.0
    count: object = "n"
    table: tuple | None = None

    constructor = "linear-form-product"

    def _zeros(self, n):
        if self.table is not None:
            return np.asarray(self.table, dtype=complex)
        count = n if self.count == "n" else int(self.count)
        return self.scale * np.arange(1, count + 1, dtype=float).astype(complex)

    def _data(self, n):
        c = self._zeros(n)
        return ZeroData(0.0, 0.0, 0, c, np.ones(c.size, dtype=np.int64))

    def to_json(self):
        out = super().to_json()
        if self.table is not None:
            out["zeros"] = {"table": [[c.real, c.imag] for c in np.asarray(self.table, dtype=complex)]}
        else:
            out["zeros"] = {"rule": "integers", "scale": self.scale, "count": self.count}
        return out


@dataclass(frozen=True, eq=False)
class ExponentialApproximant(GenusZeroFamily):
    """``(1 - l(z)/n)^n``: one zero at ``n`` of multiplicity ``n``."""

    constructor = "exponential-approximant"

    def _data(self, n):
        return ZeroData(0.0, 0.0, 0, np.array([complex(n)]), np.array([n]))


@dataclass(frozen=True, eq=False)
class ChebyshevSlab(GenusZeroFamily):
    """``T_n(u)`` with ``u = (2 l(z) - a - b) / (b - a)``: sup 1 where ``l(z)`` lies in ``[a, b]``."""

    interval: tuple = (-2.0, 2.0)

    constructor = "chebyshev-slab"

    def __post_init__(self):
        super().__post_init__()
        a, b = (float(x) for x in self.interval)
        if not b > a:
            raise GenusZeroError("interval must satisfy a < b")
        object.__setattr__(self, "interval", (a, b))

    def _data(self, n):
        a, b = self.interval
        j = np.arange(1, n + 1)
        x = np.cos((2 * j - 1) * np.pi / (2 * n))
        # snap the middle root of odd degree so it lands in alpha exactly
        x[np.abs(x) < 1e-15] = 0.0
        roots = 0.5 * (a + b) + 0.5 * (b - a) * x
        roots[np.abs(roots) < 1e-14 * max(abs(a), abs(b))] = 0.0
        # T_n(u) = 2^{n-1} prod (u - x_j) = 2^{n-1} (2/(b-a))^n prod (s - r_j)
        log_scale = (n - 1) * math.log(2.0) + n * math.log(2.0 / (b - a))
        return _zero_data_from_roots(roots, log_scale)

    def to_json(self):
        return {**super().to_json(), "interval": list(self.interval)}


@dataclass(frozen=True, eq=False)
class CustomZeroTable(GenusZeroFamily):
    """Zero data given per ``n`` (key ``"default"`` applies to unlisted ``n``)."""

    entries: dict = field(default_factory=dict)

    constructor = "custom-zero-table"

    def _data(self, n):
        e = self.entries.get(n, self.entries.get(str(n), self.entries.get("default")))
        if e is None:
            raise GenusZeroError(f"no table entry for n = {n}")
        zeros = np.array([_complex(c) for c in e.get("zeros", [])], dtype=complex)
        mult = np.asarray(e.get("multiplicities", [1] * zeros.size), dtype=np.int64)
        a = _complex(e.get("a", 1.0))
        if a == 0:
            raise GenusZeroError("leading coefficient must be nonzero")
        return ZeroData(math.log(abs(a)), float(np.angle(a)), int(e.get("alpha", 0)), zeros, mult,
                        float(e.get("tail_radius", math.inf)), float(e.get("tail_bound", 0.0)))

    def to_json(self):
        return {**super().to_json(), "entries": self.entries}


def _complex(x):
    if isinstance(x, (list, tuple)):
        return complex(float(x[0]), float(x[1]))
    return complex(x)


CONSTRUCTORS = {cls.constructor: cls for cls in
                (LinearFormProduct, ExponentialApproximant, ChebyshevSlab, CustomZeroTable)}


def from_json(obj: dict) -> GenusZeroFamily:
    """Build a family from its JSON description (``schemas/family.schema.json``)."""
    if not isinstance(obj, dict) or obj.get("constructor") not in CONSTRUCTORS:
        raise GenusZeroError(f"family needs a constructor in {sorted(CONSTRUCTORS)}")
    try:
        form = tuple(_complex(x) for x in obj.get("form", [1]))
        common = {"form": form, "weights": obj.get("weights", "n")}
        kind = obj["constructor"]
        if kind == "linear-form-product":
            zeros = obj.get("zeros", {"rule": "integers"})
            if "table" in zeros:
                return LinearFormProduct(**common, table=tuple(_complex(c) for c in zeros["table"]))
            return LinearFormProduct(**common, scale=float(zeros.get("scale", 1.0)),
                                     count=zeros.get("count", "n"))
        if kind == "exponential-approximant":
            return ExponentialApproximant(**common)
        if kind == "chebyshev-slab":
            return ChebyshevSlab(**common, interval=tuple(obj.get("interval", (-2.0, 2.0))))
        return CustomZeroTable(**common, entries=dict(obj["entries"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, GenusZeroError):
            raise
        raise GenusZeroError(f"bad family: {exc}") from exc


# ---------------------------------------------------------------- directions

@dataclass(frozen=True)
class DirectionGrid:
    """Unit representatives of points of ``P^{m-1}`` with weights summing to 1."""

    directions: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-12:
            raise GenusZeroError("weights must be positive and sum to 1")
        if not np.allclose(np.linalg.norm(self.directions, axis=1), 1.0, atol=1e-12):
            raise GenusZeroError("representatives must have unit norm")

    def __len__(self):
        return len(self.weights)

    @classmethod
    def for_dim(cls, m: int, count: int = DEFAULT_DIRECTIONS) -> "DirectionGrid":
        """The single direction for ``m = 1``; an equal-area sphere grid for ``m = 2``.

        ``P^1`` is the Riemann sphere; a Fibonacci lattice on it pulled back
        through ``(cos(t/2), sin(t/2) e^{i phi})`` gives equal Fubini-Study
        cells, so every point gets weight ``1/count``.
        """
        if m == 1:
            return cls(np.ones((1, 1), dtype=complex), np.ones(1))
        if m != 2:
            raise GenusZeroError("only m = 1, 2 are supported")
        if count < 1:
            raise GenusZeroError("need at least one direction")
        k = np.arange(count)
        height = 1.0 - (2 * k + 1) / count
        theta = np.arccos(height)
        phi = 2 * np.pi * np.mod(k / GOLDEN, 1.0)
        lam = np.column_stack([np.cos(theta / 2), np.sin(theta / 2) * np.exp(1j * phi)])
        return cls(lam, np.full(count, 1.0 / count))


def resolve(z) -> tuple[complex, np.ndarray]:
    """Split ``z = w lam`` with ``lam`` a unit vector whose first nonzero entry is real positive."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    r = float(np.linalg.norm(z))
    if r == 0:
        raise GenusZeroError("the origin has no direction")
    lead = z[np.flatnonzero(z)[0]]
    phase = lead / abs(lead)
    return r * phase, z / (r * phase)


# ------------------------------------------------------------------ counting

def counting(family: GenusZeroFamily, n: int, t: float, lam=None) -> int:
    """Zeros of the ``lam``-slice with ``|w| <= t`` (with multiplicity), plus ``alpha``."""
    if not t > 0:
        raise GenusZeroError("t must be positive")
    s = family.slice(n, _default_lambda(family, lam))
    if s.lazy and t >= s.tail_radius:
        raise UncertainCountError(f"zeros beyond |w| = {s.tail_radius:g} are not listed; cannot count to t = {t:g}")
    return int(s.alpha + s.mult[np.abs(s.zeros) <= t].sum())


def _default_lambda(family, lam):
    if lam is None:
        if family.dim != 1:
            raise GenusZeroError("a direction is required in C^2")
        return np.ones(1, dtype=complex)
    return np.asarray(lam, dtype=complex).reshape(-1)


def counting_integrated(family: GenusZeroFamily, n: int, t: float, grid: DirectionGrid | None = None) -> float:
    """``eta(t) = sum_i weight_i * counting(lam_i)`` over a normalized grid."""
    grid = grid or DirectionGrid.for_dim(family.dim)
    counts = np.array([counting(family, n, t, lam) for lam in grid.directions], dtype=float)
    return float(grid.weights @ counts)


def tail_sum(family: GenusZeroFamily, n: int, lam, R: float, with_bound: bool = False):
    """``sum_{|w| >= R} 1/w`` over the slice zeros.

    Exact for complete lists.  For lazy lists the listed part is returned and
    the declared tail bound is the error; ``with_bound`` returns both.
    """
    if not R > 0:
        raise GenusZeroError("R must be positive")
    s = family.slice(n, _default_lambda(family, lam))
    keep = np.abs(s.zeros) >= R
    value = complex(np.sum(s.mult[keep] / s.zeros[keep]))
    bound = s.tail_bound if s.lazy else 0.0
    return (value, bound) if with_bound else value


# ---------------------------------------------------------------- evaluation

@dataclass
class Evaluation:
    value: complex
    log_abs: float
    relative_error: float


def evaluate_full(family: GenusZeroFamily, n: int, z, J: int | None = None) -> Evaluation:
    """``P_n(z)`` from the first ``J`` zeros, with a bound on the dropped factors.

    ``|prod_{j > J} (1 - s/c_j) - 1| <= exp(|s| sum_{j > J} 1/|c_j|) - 1``.
    """
    d = family.data(n)
    s = complex(family.form_value(z)[0])
    J = d.zeros.size if J is None else max(0, min(int(J), d.zeros.size))
    log_abs = float(d.log_abs(np.array([s]), J)[0])
    dropped = float(np.sum(d.mult[J:] / np.abs(d.zeros[J:]))) + d.tail_bound
    rel = math.expm1(abs(s) * dropped)
    if log_abs == -math.inf:
        return Evaluation(0j, log_abs, rel)
    phase = float(d.phase(np.array([s]), J)[0])
    return Evaluation(complex(math.exp(log_abs) * np.exp(1j * phase)), log_abs, rel)


def evaluate(family: GenusZeroFamily, n: int, z, J: int | None = None) -> complex:
    return evaluate_full(family, n, z, J).value


def slice_evaluate(data: ZeroData, w) -> complex:
    """``a w^alpha prod (1 - w/w_j)`` directly from slice data."""
    w = complex(w)
    lv = float(data.log_abs(np.array([w]))[0])
    if lv == -math.inf:
        return 0j
    return complex(math.exp(lv) * np.exp(1j * data.phase(np.array([w]))[0]))


def log_growth(family: GenusZeroFamily, n: int, points) -> np.ndarray:
    """``log |P_n(z)| / k_n`` at each point (``-inf`` at zeros)."""
    s = family.form_value(points)
    return family.data(n).log_abs(s) / family.k(n)


# ---------------------------------------------------------------- conditions

def tail_half(n_range) -> np.ndarray:
    """The second half of an n range: where limsup proxies are read off."""
    n = np.asarray(list(n_range), dtype=int)
    if n.size == 0:
        raise GenusZeroError("empty n range")
    return n[n.size // 2:]


def limsup_proxy(values) -> float:
    """Running maximum over the tail half of a sequence indexed by the n range."""
    v = np.asarray(values, dtype=float)
    return float(np.max(v[v.size // 2:]))


def sqrt_rule(n):
    return math.sqrt(n)


@dataclass
class ConditionReport:
    """Tabulated defining sequences for the four growth conditions and their proxies.

    ``unit_count``: ``[eta(1, lam) + sum_{|w| >= 1} 1/|w|] / k_n``.
    ``tail_table``: ``|sum_{|w| >= R} 1/w| / k_n`` over ``tail_radii`` x n.
    ``growth_count``: ``eta(R_n, lam) / k_n``; ``kappa`` is its worst proxy.
    ``compact_per_n``: ``max |P_n|^{1/k_n}`` over an optional compact sample.
    """

    n_range: tuple
    tail_range: tuple
    lambdas: np.ndarray
    unit_count: np.ndarray
    unit_count_proxy: np.ndarray
    tail_radii: tuple
    tail_table: np.ndarray
    tail_proxy: np.ndarray
    count_radii: np.ndarray
    growth_count: np.ndarray
    growth_count_proxy: np.ndarray
    kappa: float
    compact_bound: float | None = None
    compact_per_n: np.ndarray | None = None
    warnings: list = field(default_factory=list)
    C_lambda: np.ndarray | None = None
    tau: float | None = None
    beta: float | None = None
    C_m: float | None = None
    envelope: object = None

    def rows(self) -> list[dict]:
        out = []
        for i in range(len(self.lambdas)):
            for k, n in enumerate(self.n_range):
                out.append({"condition": "unit-count", "n": n, "lambda_index": i, "param": "", "value": self.unit_count[i, k]})
                for r, R in enumerate(self.tail_radii):
                    out.append({"condition": "tail-sum", "n": n, "lambda_index": i, "param": R,
                                "value": self.tail_table[i, r, k]})
                out.append({"condition": "count-at-R_n", "n": n, "lambda_index": i, "param": self.count_radii[k],
                            "value": self.growth_count[i, k]})
        if self.compact_per_n is not None:
            for k, n in enumerate(self.n_range):
                out.append({"condition": "compact-bound", "n": n, "lambda_index": "", "param": "",
                            "value": self.compact_per_n[k]})
        return out


def condition_checks(family: GenusZeroFamily, lambdas, n_range, R_rule=sqrt_rule,
                     radii=(2.0, 4.0, 8.0, 16.0), compact=None) -> ConditionReport:
    """Tabulate the four conditions over ``n_range`` for each direction.

    ``R_rule`` maps ``n`` to ``R_{n,lam}``; ``compact`` is an optional array
    of points standing in for a compact set in the first condition.
    """
    n_range = tuple(int(n) for n in n_range)
    if len(n_range) < 10:
        raise GenusZeroError("a limsup proxy needs at least 10 values of n")
    if family.dim == 1 and lambdas is None:
        lambdas = np.ones((1, 1), dtype=complex)
    lambdas = np.asarray(lambdas, dtype=complex).reshape(-1, family.dim)
    radii = tuple(float(R) for R in radii)
    nl, nn = len(lambdas), len(n_range)
    t41 = np.zeros((nl, nn))
    t42 = np.zeros((nl, len(radii), nn))
    t43 = np.zeros((nl, nn))
    Rn = np.array([float(R_rule(n)) for n in n_range])
    warnings = []
    for i, lam in enumerate(lambdas):
        for k, n in enumerate(n_range):
            s = family.slice(n, lam)
            kn = family.k(n)
            mod = np.abs(s.zeros)
            inside = s.alpha + s.mult[mod <= 1].sum()
            outer = np.sum(s.mult[mod >= 1] / mod[mod >= 1]) + s.tail_bound
            if s.lazy and s.tail_radius <= 1:
                warnings.append(f"unit-count: n={n}, lambda {i}: count at t=1 uncertain")
            t41[i, k] = (inside + outer) / kn
            for r, R in enumerate(radii):
                keep = mod >= R
                t42[i, r, k] = abs(np.sum(s.mult[keep] / s.zeros[keep])) / kn
                if s.lazy:
                    t42[i, r, k] += s.tail_bound / kn
            if s.lazy and Rn[k] >= s.tail_radius:
                warnings.append(f"count-at-R_n: n={n}, lambda {i}: count at R_n uncertain")
            t43[i, k] = (s.alpha + s.mult[mod <= Rn[k]].sum()) / kn
    p41 = np.array([limsup_proxy(row) for row in t41])
    p42 = np.array([[limsup_proxy(row) for row in block] for block in t42])
    p43 = np.array([limsup_proxy(row) for row in t43])
    report = ConditionReport(n_range, tuple(tail_half(n_range)), lambdas, t41, p41, radii, t42, p42,
                             Rn, t43, p43, float(p43.max()) if p43.size else 0.0, warnings=warnings)
    if compact is not None:
        per_n = np.array([np.exp(np.max(log_growth(family, n, compact))) for n in n_range])
        report.compact_per_n = per_n
        report.compact_bound = limsup_proxy(per_n)
    return report


# ------------------------------------------------------------ growth checks

@dataclass
class GrowthReport:
    n_range: tuple
    hypothesis_margin: float
    conclusion_margin: float
    tolerance: float
    hypothesis_holds: bool
    conclusion_holds: bool
    flagged_points: int = 0

    @property
    def verified(self) -> bool:
        return (not self.hypothesis_holds) or self.conclusion_holds

    def rows(self) -> list[dict]:
        return [{"quantity": "hypothesis_margin", "value": self.hypothesis_margin},
                {"quantity": "conclusion_margin", "value": self.conclusion_margin},
                {"quantity": "verified", "value": int(self.verified)}]


def _points(E):
    return E.points if isinstance(E, SampledRegion) else np.asarray(E, dtype=complex)


def _tail_max_growth(family, points, n_range):
    tail = tail_half(n_range)
    best = np.full(len(points), -np.inf)
    for n in tail:
        best = np.maximum(best, log_growth(family, int(n), points))
    return best


def growth_verify(family: GenusZeroFamily, E, grid, n_range, tolerance: float = 0.05) -> GrowthReport:
    """Hypothesis margin on ``E`` and conclusion margin on ``grid``.

    Each margin is the max over points of the tail-max over ``n`` of
    ``|P_n(z)|^{1/k_n}``.  The check passes unless the hypothesis holds
    (margin <= 1 + tolerance) while the conclusion fails.
    """
    n_range = tuple(int(n) for n in n_range)
    pe = _points(E).reshape(-1, family.dim)
    pg = np.asarray(grid, dtype=complex).reshape(-1, family.dim)
    he = _tail_max_growth(family, pe, n_range)
    hg = _tail_max_growth(family, pg, n_range)
    flagged = int(np.sum(~np.isfinite(he) & (he > 0)) + np.sum(~np.isfinite(hg) & (hg > 0)))
    hyp = float(np.exp(np.max(he)))
    con = float(np.exp(np.max(hg)))
    return GrowthReport(n_range, hyp, con, tolerance, hyp <= 1 + tolerance, con <= 1 + tolerance, flagged)


# ---------------------------------------------------------- circle averages

@dataclass
class CircleAverage:
    value: float
    flagged: bool


def slice_circle_average(data: ZeroData, quadrature: int = DEFAULT_QUADRATURE) -> CircleAverage:
    """``(1/2pi) int log |F(e^{i theta})| d theta`` by the trapezoid rule.

    A node landing on a zero is moved by ``CIRCLE_NUDGE`` and the result
    flagged; the logarithmic singularity is integrable.
    """
    if data.lazy:
        raise UncertainCountError("circle averages need a complete zero list")
    theta = 2 * np.pi * np.arange(quadrature) / quadrature
    nodes = np.exp(1j * theta)
    flagged = False
    on_circle = data.zeros[np.abs(np.abs(data.zeros) - 1.0) < 1e-12]
    if on_circle.size:
        hit = np.min(np.abs(nodes[:, None] - on_circle[None, :]), axis=1) < 1e-12
        if hit.any():
            flagged = True
            nodes[hit] = np.exp(1j * (theta[hit] + CIRCLE_NUDGE))
    return CircleAverage(float(np.mean(data.log_abs(nodes))), flagged)


def circle_average(family: GenusZeroFamily, n: int, lam=None, quadrature: int = DEFAULT_QUADRATURE) -> float:
    """``(1 / (2 pi k_n)) int log |P_n(e^{i theta} lam)| d theta``."""
    return slice_circle_average(family.slice(n, _default_lambda(family, lam)), quadrature).value / family.k(n)


def jensen_average(data: ZeroData) -> float:
    """Closed form of the circle average: ``log|a| + sum_{|w_j|<1} log(1/|w_j|)``."""
    mod = np.abs(data.zeros)
    inner = mod < 1
    return data.log_abs_a + float(np.sum(data.mult[inner] * -np.log(mod[inner])))


# ---------------------------------------------------------------- theorem 5

@dataclass(frozen=True)
class Envelope:
    """Growth envelope ``h`` with a declared exponent ``tau``.

    ``kind = "power"``: ``h(R) = scale (1 + R)^tau``.  ``kind = "table"``:
    log-log interpolation of ``(radii, values)``, constant beyond the ends.
    """

    tau: float
    kind: str = "power"
    scale: float = 1.0
    radii: tuple = ()
    values: tuple = ()

    def __post_init__(self):
        if self.kind not in ("power", "table"):
            raise GenusZeroError("envelope kind must be 'power' or 'table'")
        if self.kind == "table" and (len(self.radii) < 2 or len(self.radii) != len(self.values)):
            raise GenusZeroError("a tabulated envelope needs matching radii and values")
        if not self.tau >= 0:
            raise GenusZeroError("tau must be nonnegative")

    def __call__(self, R):
        R = np.asarray(R, dtype=float)
        if self.kind == "power":
            return self.scale * (1.0 + R) ** self.tau
        lr = np.log(np.asarray(self.radii, dtype=float))
        lv = np.log(np.asarray(self.values, dtype=float))
        return np.exp(np.interp(np.log(np.maximum(R, 1e-300)), lr, lv))


@dataclass
class Theorem5Report:
    n_range: tuple
    C_lambda: np.ndarray
    exponent: float
    ratio: float
    per_lambda_ratio: np.ndarray
    tau: float
    beta: float
    C_m: float
    hypothesis_ratio: float | None
    tolerance: float
    flagged: bool

    @property
    def passed(self) -> bool:
        return self.ratio <= 1 + self.tolerance

    def rows(self) -> list[dict]:
        return [{"lambda_index": i, "C_lambda": c, "ratio": r}
                for i, (c, r) in enumerate(zip(self.C_lambda, self.per_lambda_ratio))]


def theorem5_exponent(tau: float, beta: float, C_m: float) -> float:
    denom = 1.0 - C_m * (1.0 - beta)
    if not denom > 0:
        raise GenusZeroError(f"1 - C_m (1 - beta) = {denom:g} must be positive for a finite exponent")
    return tau / denom


def theorem5_check(family: GenusZeroFamily, lambdas, w_grid, n_range, tau: float, beta: float,
                   C_m: float, envelope: Envelope | None = None, E=None,
                   quadrature: int = DEFAULT_QUADRATURE, tolerance: float = 0.05) -> Theorem5Report:
    """Compare ``|P_n(w lam)|^{1/k_n}`` with ``C_lam (1 + |w|)^{tau / (1 - C_m (1 - beta))}``.

    ``C_lam`` is the exponential of the tail-max over ``n`` of the circle
    averages.  With an envelope and a sample ``E`` the hypothesis ratio
    ``|P_n|^{1/k_n} / h(|z|)`` on ``E`` is reported too.
    """
    if C_m is None:
        raise GenusZeroError("C_m must be supplied")
    exponent = theorem5_exponent(tau, beta, C_m)
    n_range = tuple(int(n) for n in n_range)
    if family.dim == 1 and lambdas is None:
        lambdas = np.ones((1, 1), dtype=complex)
    lambdas = np.asarray(lambdas, dtype=complex).reshape(-1, family.dim)
    w = np.asarray(w_grid, dtype=complex).reshape(-1)
    tail = tail_half(n_range)
    C = np.zeros(len(lambdas))
    ratios = np.zeros(len(lambdas))
    flagged = False
    for i, lam in enumerate(lambdas):
        avgs = []
        for n in tail:
            ca = slice_circle_average(family.slice(int(n), lam), quadrature)
            flagged |= ca.flagged
            avgs.append(ca.value / family.k(int(n)))
        C[i] = math.exp(max(avgs))
        growth = _tail_max_growth(family, w[:, None] * lam[None, :], n_range)
        bound = np.log(C[i]) + exponent * np.log1p(np.abs(w))
        ratios[i] = float(np.exp(np.max(growth - bound)))
    hyp = None
    if envelope is not None and E is not None:
        pe = _points(E).reshape(-1, family.dim)
        g = _tail_max_growth(family, pe, n_range)
        hyp = float(np.exp(np.max(g - np.log(envelope(np.linalg.norm(pe, axis=1))))))
    return Theorem5Report(n_range, C, exponent, float(ratios.max()), ratios, tau, beta, C_m, hyp,
                          tolerance, flagged)
