"""Comparison functions, derivative approximations, running sups and scalar conditions."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError, NonFiniteValue, OutOfDomain, ParamError
from .hybrid_time import TIME_TOL, HybridTimeDomain, MemoryArc, memory_operator
from .report import CheckReport

CLASSES = ("K", "Kinf", "PD", "nondecreasing")
DEFAULT_GRID = np.concatenate([[0.0], np.logspace(-6, 6, 121)])
SMALL_GAIN_GRID = np.logspace(-6, 6, 121)
KINF_THRESHOLD = 1e3

StateFn = Callable[[np.ndarray], float]
ArcFn = Callable[[MemoryArc], float]


# ---------------------------------------------------------------------------
# comparison functions


@dataclass
class ComparisonFunction:
    """A scalar function ``R>=0 -> R>=0`` with a declared comparison class."""

    f: Callable[[float], float]
    declared_class: str = "K"
    spec: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.declared_class == "K∞":
            self.declared_class = "Kinf"
        if self.declared_class not in CLASSES:
            raise ParamError(f"unknown comparison class {self.declared_class!r}")

    def __call__(self, v: float) -> float:
        return float(self.f(float(v)))

    @classmethod
    def linear(cls, k: float, declared_class: str = "Kinf") -> "ComparisonFunction":
        k = float(k)
        return cls(lambda v: k * v, declared_class, {"type": "linear", "k": k})

    @classmethod
    def power(cls, p: float, k: float = 1.0, declared_class: str = "Kinf") -> "ComparisonFunction":
        p, k = float(p), float(k)
        return cls(lambda v: k * v**p, declared_class, {"type": "power", "p": p, "k": k})

    @classmethod
    def saturating(cls, declared_class: str = "K") -> "ComparisonFunction":
        return cls(lambda v: v / (1.0 + v), declared_class, {"type": "saturating"})

    @classmethod
    def zero(cls) -> "ComparisonFunction":
        return cls(lambda v: 0.0, "nondecreasing", {"type": "zero"})

    @classmethod
    def table(cls, points: Sequence[Sequence[float]], declared_class: str = "K") -> "ComparisonFunction":
        """Piecewise-linear through ``(v, f(v))`` points, extended linearly past the last point."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
            raise ParamError("table needs at least two (v, f) points")
        vs, fs = pts[:, 0], pts[:, 1]
        if np.any(np.diff(vs) <= 0):
            raise ParamError("table abscissae must be strictly increasing")
        slope = (fs[-1] - fs[-2]) / (vs[-1] - vs[-2])

        def f(v):
            if v > vs[-1]:
                return fs[-1] + slope * (v - vs[-1])
            return float(np.interp(v, vs, fs))

        return cls(f, declared_class, {"type": "table", "points": pts.tolist()})

    @classmethod
    def from_spec(cls, spec: dict | float | int, declared_class: str | None = None) -> "ComparisonFunction":
        """Build from a tagged form such as ``{"type": "linear", "k": 0.5}``. A bare number means linear."""
        if isinstance(spec, (int, float)):
            spec = {"type": "linear", "k": float(spec)}
        kind = spec.get("type")
        dc = spec.get("class", declared_class)
        kw = {} if dc is None else {"declared_class": dc}
        if kind == "linear":
            return cls.linear(spec["k"], **kw)
        if kind == "power":
            return cls.power(spec["p"], spec.get("k", 1.0), **kw)
        if kind == "saturating":
            return cls.saturating(**kw)
        if kind == "table":
            return cls.table(spec["points"], **kw)
        if kind == "zero":
            return cls.zero()
        raise ParamError(f"unknown comparison function type {kind!r}")

    def to_spec(self) -> dict:
        return dict(self.spec)


def validate_class(f: ComparisonFunction, grid: Iterable[float] | None = None, kinf_threshold: float = KINF_THRESHOLD) -> CheckReport:
    """Grid test of the declared class. A pass means "not falsified on the grid"."""
    g = np.asarray(DEFAULT_GRID if grid is None else list(grid), dtype=float)
    rep = CheckReport(variant=f"class-{f.declared_class}", tolerances={"kinf_threshold": kinf_threshold})
    vals = np.array([f(v) for v in g])
    cls_ = f.declared_class
    for v, fv in zip(g, vals):
        rep.require(bool(np.isfinite(fv)), "finite", fv, 0.0, t=v)
    if cls_ in ("K", "Kinf", "PD") and g[0] == 0.0:
        rep.require(abs(vals[0]) <= 1e-12, "zero-at-zero", vals[0], 0.0, t=0.0)
    if cls_ in ("K", "Kinf"):
        for i in range(len(g) - 1):
            rep.require(vals[i + 1] > vals[i], "strictly-increasing", vals[i], vals[i + 1], t=g[i + 1])
    if cls_ == "PD":
        for v, fv in zip(g, vals):
            if v > 0:
                rep.require(fv > 0, "positive", 0.0, fv, t=v)
    if cls_ == "nondecreasing":
        for i in range(len(g) - 1):
            rep.require(vals[i + 1] >= vals[i], "nondecreasing", vals[i], vals[i + 1], t=g[i + 1])
        for v, fv in zip(g, vals):
            rep.require(fv >= 0, "non-negative", 0.0, fv, t=v)
    if cls_ == "Kinf":
        rep.require(vals[-1] > kinf_threshold, "unbounded", kinf_threshold, vals[-1], t=g[-1])
    return rep


# ---------------------------------------------------------------------------
# derivatives

DIRECTIONAL_STEPS = (1e-4, 1e-5, 1e-6)
DINI_STEPS = (1e-3, 1e-4)


def directional_deriv(V: StateFn, x, f, steps: Sequence[float] = DIRECTIONAL_STEPS) -> float:
    """Upper estimate of the Clarke derivative ``V°(x, f)`` by forward quotients."""
    x = np.asarray(x, dtype=float)
    f = np.asarray(f, dtype=float)
    if not np.any(f):
        return 0.0
    v0 = V(x)
    best = max((V(x + h * f) - v0) / h for h in steps)
    if not math.isfinite(best):
        raise NonFiniteValue(f"directional derivative is not finite at x={x}")
    return float(best)


def dini_functional_deriv(V: ArcFn, sol, t: float, j: int, steps: Sequence[float] = DINI_STEPS) -> float:
    """Upper right Dini derivative of ``V`` along the stored solution at ``(t, j)``.

    Uses the steps that fit inside the current flow interval.
    """
    seg = sol.x.segment(j)
    room = seg.t_hi - t
    usable = [h for h in steps if h <= room + TIME_TOL]
    if not usable:
        raise OutOfDomain(f"no room to differentiate at ({t}, {j}); interval ends at {seg.t_hi}")
    v0 = V(memory_operator(sol.x, t, j, sol.delta))
    out = -math.inf
    for h in usable:
        th = min(t + h, seg.t_hi)
        out = max(out, (V(memory_operator(sol.x, th, j, sol.delta)) - v0) / (th - t))
    return float(out)


# ---------------------------------------------------------------------------
# running sups


def vbar(V: StateFn, phi: MemoryArc, delta: float) -> float:
    """``sup V(phi(s, k))`` over samples with ``s + k >= -delta - 1``."""
    _, _, xs = phi.samples(delta + 1.0)
    return max(float(V(x)) for x in xs)


def sliding_max(values: np.ndarray, positions: np.ndarray, width: float) -> np.ndarray:
    """``out[i] = max(values[k] : positions[i] - width <= positions[k] <= positions[i])``.

    ``positions`` must be non-decreasing.
    """
    out = np.empty(len(values))
    dq: deque[int] = deque()
    lo = 0
    for i, (v, p) in enumerate(zip(values, positions)):
        while dq and values[dq[-1]] <= v:
            dq.pop()
        dq.append(i)
        while positions[lo] < p - width - TIME_TOL:
            lo += 1
        while dq[0] < lo:
            dq.popleft()
        out[i] = values[dq[0]]
    return out


def vbar_series(V: StateFn, sol, delta: float | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(t, j, vbar)`` at every forward sample, including memory samples in the window."""
    delta = sol.delta if delta is None else delta
    flat = sol.x.flat()
    vals = np.array([float(V(x)) for x in flat.x])
    pos = flat.position
    running = sliding_max(vals, pos, delta + 1.0)
    fwd = flat.forward_mask()
    return flat.t[fwd], flat.j[fwd], running[fwd]


def vhat(V: ArcFn, sol, t: float, j: int, delta: float | None = None) -> float:
    """Running sup of the functional over the last ``delta + 1`` of hybrid time.

    The sup runs over the stored forward samples when the whole window lies in
    the forward domain; otherwise the value is ``V`` at ``(t, j)`` itself.
    """
    delta = sol.delta if delta is None else delta
    here = float(V(memory_operator(sol.x, t, j, sol.delta)))
    p = t + j
    if p - delta - 1.0 < -TIME_TOL:
        return here
    best = here
    for seg in sol.x.segments:
        if seg.j < 0 or seg.j > j:
            continue
        for ts in seg.t:
            q = ts + seg.j
            if ts < -TIME_TOL or q < p - delta - 1.0 - TIME_TOL or q > p + TIME_TOL:
                continue
            best = max(best, float(V(memory_operator(sol.x, float(ts), seg.j, sol.delta))))
    return best


def vhat_series(values: np.ndarray, positions: np.ndarray, delta: float) -> np.ndarray:
    """Vectorised :func:`vhat` from precomputed functional values at forward samples."""
    running = sliding_max(values, positions, delta + 1.0)
    return np.where(positions - delta - 1.0 >= -TIME_TOL, running, values)


# ---------------------------------------------------------------------------
# scalar conditions


def check_small_gain(f: ComparisonFunction | Callable[[float], float], grid: Iterable[float] | None = None) -> CheckReport:
    """``f(v) < v`` at every grid point (log-spaced over [1e-6, 1e6] by default)."""
    g = SMALL_GAIN_GRID if grid is None else np.asarray(list(grid), dtype=float)
    rep = CheckReport(variant="small-gain")
    for v in g:
        fv = float(f(v))
        rep.require(fv < v, "small-gain", fv, float(v), t=float(v))
    return rep


def check_dwell_band(d: HybridTimeDomain, eps: float, N0: int, tol: float = 1e-9) -> CheckReport:
    """Every forward ``(t, j)`` satisfies ``t/eps - N0 <= j <= t/eps + N0``.

    The band is linear in ``t`` so checking both ends of each flow interval is exact.
    """
    if eps <= 0 or N0 < 1:
        raise ParamError("dwell band needs eps > 0 and N0 >= 1")
    rep = CheckReport(variant="dwell-band", tolerances={"abs": tol})
    for s in d.forward:
        lower = s.t_hi / eps - N0
        rep.require(s.j >= lower - tol, "band-lower", lower, float(s.j), t=s.t_hi, j=s.j)
        upper = s.t_lo / eps + N0
        rep.require(s.j <= upper + tol, "band-upper", float(s.j), upper, t=s.t_lo, j=s.j)
    return rep


def adt_margin(lam1: float, mu: float, eps: float) -> float:
    """``lam1 * eps - ln(mu)``; the dwell condition holds when this is positive."""
    if mu < 1:
        raise DomainError(f"mu must be >= 1, got {mu}")
    if lam1 <= 0 or eps <= 0:
        raise DomainError("lam1 and eps must be positive")
    return lam1 * eps - math.log(mu)


def radt_margin(lam1: float, mu: float, eps: float) -> float:
    """``lam1 * eps + ln(mu)``; the reverse dwell condition holds when this is negative."""
    if not 0 < mu < 1:
        raise DomainError(f"mu must lie in (0, 1), got {mu}")
    if lam1 <= 0 or eps <= 0:
        raise DomainError("lam1 and eps must be positive")
    return lam1 * eps + math.log(mu)


def decay_residual(lam: float, lam1: float, lam2: float, delta: float) -> float:
    """``lam - lam1 + lam2 * exp(lam * (delta + 1))``."""
    return lam - lam1 + lam2 * math.exp(lam * (delta + 1.0))


def bisect_root(fn: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10, max_iter: int = 200) -> float:
    """Root of an increasing ``fn`` with ``fn(lo) <= 0 <= fn(hi)``, to residual ``tol``."""
    flo, fhi = fn(lo), fn(hi)
    if flo > 0 or fhi < 0:
        raise DomainError(f"no sign change on [{lo}, {hi}]: f = {flo}, {fhi}")
    mid = lo
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if abs(fm) <= tol:
            return mid
        if fm < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 0:
            break
    return mid


def solve_lambda_bar(lam1: float, lam2: float, delta: float) -> float:
    """The positive root of ``lam - lam1 + lam2 * exp(lam * (delta + 1))``."""
    if not lam1 > lam2 >= 0:
        raise DomainError(f"need lam1 > lam2 >= 0, got lam1={lam1}, lam2={lam2}")
    if lam2 == 0:
        return float(lam1)
    return bisect_root(lambda lam: decay_residual(lam, lam1, lam2, delta), 0.0, float(lam1))


def stable_jump_rate(lam1: float, lam2: float, mu: float, N0: int, delta: float) -> float:
    """Growth rate ``lam1 + lam2 * mu**(-N0) * e**(delta + 1)`` for the stable-jump case."""
    if lam1 < 0 or lam2 < 0:
        raise DomainError("lam1 and lam2 must be non-negative")
    if not 0 < mu < 1:
        raise DomainError(f"mu must lie in (0, 1), got {mu}")
    if N0 < 1:
        raise DomainError("N0 must be at least 1")
    return lam1 + lam2 * mu ** (-N0) * math.exp(delta + 1.0)


@dataclass
class PersistenceSpec:
    """``t + j >= T`` implies ``t > gamma(T) - N`` (flow) or ``j > gamma(T) - N`` (jump)."""

    gamma: ComparisonFunction
    N: float
    target: str = "jump"

    def __post_init__(self):
        if self.N <= 0:
            raise ParamError("persistence constant N must be positive")
        if self.target not in ("flow", "jump"):
            raise ParamError("persistence target must be 'flow' or 'jump'")


def check_persistence(d: HybridTimeDomain, spec: PersistenceSpec, interior: int = 16) -> CheckReport:
    """Check the persistence inequality at ``(t, j)`` points of the forward domain.

    Taking ``T = t + j`` gives the tightest instance at each point. Each flow
    interval is sampled at its ends and ``interior`` points in between.
    """
    rep = CheckReport(variant=f"persistence-{spec.target}", tolerances={"N": spec.N})
    for s in d.forward:
        ts = np.linspace(s.t_lo, s.t_hi, interior + 2) if s.t_hi > s.t_lo else np.array([s.t_lo])
        for t in ts:
            T = t + s.j
            if T <= 0:
                continue
            rhs = spec.gamma(T) - spec.N
            lhs = t if spec.target == "flow" else float(s.j)
            rep.require(lhs > rhs, f"persistent-{spec.target}", rhs, lhs, t=float(t), j=s.j)
    return rep
