"""Hybrid time domains with memory, hybrid arcs and the memory window operator.

A hybrid arc is stored as one :class:`ArcSegment` per jump index ``j``. Each
segment holds a strictly increasing time grid, the state at every grid point and
(optionally) the time derivative there, used for cubic Hermite dense output.
A jump is two segments that share a time value; samples are never double valued.

The global sample order (by ``j`` then ``t``) is also the order of the hybrid
position ``t + j``, which is what every window computation below relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import total_ordering
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import AnchorError, ContiguityError, OrderError, OutOfDomain

TIME_TOL = 1e-12
INTERPOLATIONS = ("cubic-hermite", "linear")


@total_ordering
@dataclass(frozen=True, eq=False)
class HybridTime:
    """A hybrid time ``(t, j)``, ordered by ``t + j``."""

    t: float
    j: int

    @property
    def position(self) -> float:
        return self.t + self.j

    def __eq__(self, other):
        if not isinstance(other, HybridTime):
            return NotImplemented
        return self.t == other.t and self.j == other.j

    def __hash__(self):
        return hash((self.t, self.j))

    def __lt__(self, other: "HybridTime") -> bool:
        return self.position < other.position

    def precedes(self, other: "HybridTime", strict: bool = False) -> bool:
        if strict:
            return self.position < other.position
        return self.position <= other.position


# ---------------------------------------------------------------------------
# domains


@dataclass(frozen=True)
class DomainSegment:
    t_lo: float
    t_hi: float
    j: int


class HybridTimeDomain:
    """A validated compact hybrid time domain with memory.

    Build instances with :func:`validate_domain`. ``memory`` holds the segments
    in ``R<=0 x Z<=0`` and ``forward`` those in ``R>=0 x Z>=0``; a ``j = 0``
    interval straddling ``t = 0`` is split between the two.
    """

    def __init__(self, memory: Sequence[DomainSegment], forward: Sequence[DomainSegment]):
        self.memory = tuple(memory)
        self.forward = tuple(forward)

    @property
    def segments(self) -> tuple[DomainSegment, ...]:
        return self.memory + self.forward

    @property
    def J(self) -> int:
        return len(self.forward)

    @property
    def K(self) -> int:
        return -min(s.j for s in self.memory) if self.memory else 0

    def contains(self, t: float, j: int) -> bool:
        return any(s.j == j and s.t_lo - TIME_TOL <= t <= s.t_hi + TIME_TOL for s in self.segments)

    def truncate(self, T: float, J: int, S: float = math.inf, K: int | None = None) -> "HybridTimeDomain":
        """Compact truncation ``[0,T] x {0..J}`` united with ``[-S,0] x {-K..0}``."""
        segs = []
        for s in self.memory:
            if K is not None and s.j < -K:
                continue
            lo = max(s.t_lo, -S)
            if lo <= s.t_hi:
                segs.append((lo, s.t_hi, s.j))
        for s in self.forward:
            if s.j > J:
                continue
            hi = min(s.t_hi, T)
            if s.t_lo <= hi:
                segs.append((s.t_lo, hi, s.j))
        return validate_domain(segs)

    def forward_only(self) -> "HybridTimeDomain":
        return HybridTimeDomain((), self.forward)

    def as_tuples(self) -> list[tuple[float, float, int]]:
        return [(s.t_lo, s.t_hi, s.j) for s in self.segments]

    def __repr__(self):
        return f"HybridTimeDomain(memory={self.memory!r}, forward={self.forward!r})"


def validate_domain(segments: Iterable[tuple[float, float, int]]) -> HybridTimeDomain:
    """Check the list of ``(t_lo, t_hi, j)`` intervals and build a domain.

    Raises OrderError, ContiguityError or AnchorError on the corresponding defect.
    """
    raw = [(float(a), float(b), int(j)) for a, b, j in segments]
    if not raw:
        raise ValueError("a hybrid time domain needs at least one segment")
    for a, b, j in raw:
        if a > b:
            raise OrderError(f"segment j={j} has t_lo={a} > t_hi={b}")

    memory: list[DomainSegment] = []
    forward: list[DomainSegment] = []
    for a, b, j in sorted(raw, key=lambda s: (s[2], s[0])):
        if j < 0 or (j == 0 and a < 0):
            if j < 0 and b > TIME_TOL:
                raise AnchorError(f"memory segment j={j} extends to positive time {b}")
            has_fwd0 = any(r[2] == 0 and r[0] >= -TIME_TOL for r in raw)
            if j == 0 and (b > TIME_TOL or (not has_fwd0 and any(r[2] > 0 for r in raw))):
                # (0, 0) belongs to both parts; keep it as a forward point when jumps follow
                memory.append(DomainSegment(a, 0.0, 0))
                forward.append(DomainSegment(0.0, max(b, 0.0), 0))
            else:
                memory.append(DomainSegment(a, b, j))
        else:
            if a < -TIME_TOL:
                raise AnchorError(f"forward segment j={j} starts at negative time {a}")
            forward.append(DomainSegment(a, b, j))

    if memory:
        last = memory[-1]
        if last.j != 0 or abs(last.t_hi) > TIME_TOL:
            raise AnchorError(f"memory part must end at (0, 0), ends at ({last.t_hi}, {last.j})")
    if forward:
        first = forward[0]
        if first.j != 0 or abs(first.t_lo) > TIME_TOL:
            raise AnchorError(f"forward part must start at (0, 0), starts at ({first.t_lo}, {first.j})")
    for part in (memory, forward):
        for prev, nxt in zip(part, part[1:]):
            if nxt.j != prev.j + 1:
                raise ContiguityError(f"jump index skips from {prev.j} to {nxt.j}")
            if abs(prev.t_hi - nxt.t_lo) > TIME_TOL:
                raise ContiguityError(
                    f"segment j={prev.j} ends at t={prev.t_hi} but j={nxt.j} starts at t={nxt.t_lo}"
                )
    return HybridTimeDomain(memory, forward)


def depth(d: HybridTimeDomain) -> float:
    """Memory depth: the smallest ``s + k`` over the memory part (0 if there is none)."""
    if not d.memory:
        return 0.0
    return min(s.t_lo + s.j for s in d.memory)


# ---------------------------------------------------------------------------
# arcs


class ArcSegment:
    """Samples of an arc on the flow interval with jump index ``j``.

    Buffers grow by doubling so the simulator can append in place. Missing
    derivatives are stored as NaN rows. ``kinks`` maps a sample index to a
    right derivative that differs from the left one (where a flow starts
    from a history whose slope does not match).
    """

    __slots__ = ("j", "n", "_t", "_x", "_dx", "kinks")

    def __init__(self, j: int, dim: int, capacity: int = 16):
        self.j = int(j)
        self.n = 0
        self.kinks: dict[int, np.ndarray] = {}
        self._t = np.empty(capacity)
        self._x = np.empty((capacity, dim))
        self._dx = np.full((capacity, dim), np.nan)

    @classmethod
    def from_arrays(cls, j, t, x, dx=None) -> "ArcSegment":
        t = np.asarray(t, dtype=float).reshape(-1)
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x.reshape(len(t), -1)
        if len(t) == 0:
            raise ValueError(f"segment j={j} has no samples")
        if np.any(np.diff(t) <= 0):
            raise OrderError(f"sample times of segment j={j} are not strictly increasing")
        seg = cls(j, x.shape[1], capacity=len(t))
        seg._t[:] = t
        seg._x[:] = x
        if dx is not None:
            seg._dx[:] = np.asarray(dx, dtype=float).reshape(x.shape)
        seg.n = len(t)
        return seg

    @property
    def t(self) -> np.ndarray:
        return self._t[: self.n]

    @property
    def x(self) -> np.ndarray:
        return self._x[: self.n]

    @property
    def dx(self) -> np.ndarray:
        return self._dx[: self.n]

    @property
    def t_lo(self) -> float:
        return float(self._t[0])

    @property
    def t_hi(self) -> float:
        return float(self._t[self.n - 1])

    def append(self, t: float, x, dx=None) -> None:
        if self.n == len(self._t):
            cap = 2 * len(self._t)
            for name in ("_t", "_x", "_dx"):
                old = getattr(self, name)
                new = np.full((cap,) + old.shape[1:], np.nan)
                new[: self.n] = old[: self.n]
                setattr(self, name, new)
        self._t[self.n] = t
        self._x[self.n] = x
        self._dx[self.n] = np.nan if dx is None else dx
        self.n += 1

    def pop(self) -> None:
        self.n -= 1
        self.kinks.pop(self.n, None)

    def trim(self) -> None:
        self._t = self._t[: self.n].copy()
        self._x = self._x[: self.n].copy()
        self._dx = self._dx[: self.n].copy()

    def value(self, t: float, interpolation: str = "cubic-hermite") -> np.ndarray:
        ts = self._t
        n = self.n
        if t < ts[0] - TIME_TOL or t > ts[n - 1] + TIME_TOL:
            raise OutOfDomain(f"t={t} outside segment j={self.j} [{ts[0]}, {ts[n - 1]}]")
        i = int(np.searchsorted(ts[:n], t))
        if i < n and ts[i] == t:
            return self._x[i].copy()
        if i == 0:
            return self._x[0].copy()
        if i >= n:
            return self._x[n - 1].copy()
        t0, t1 = ts[i - 1], ts[i]
        x0, x1 = self._x[i - 1], self._x[i]
        h = t1 - t0
        u = (t - t0) / h
        if interpolation == "cubic-hermite":
            d0 = self.kinks.get(i - 1)
            if d0 is None:
                d0 = self._dx[i - 1]
            d1 = self._dx[i]
            if not (np.isnan(d0[0]) or np.isnan(d1[0])):
                u2 = u * u
                u3 = u2 * u
                return (
                    (2 * u3 - 3 * u2 + 1) * x0
                    + (u3 - 2 * u2 + u) * h * d0
                    + (-2 * u3 + 3 * u2) * x1
                    + (u3 - u2) * h * d1
                )
        return (1 - u) * x0 + u * x1


class HybridArc:
    """A sampled hybrid arc with memory.

    Parameters
    ----------
    segments : sequence of ArcSegment
        One per jump index, consecutive ``j`` values, each ending where the next starts.
    interpolation : {"cubic-hermite", "linear"}
        Dense output between samples. Hermite falls back to linear wherever a
        derivative is missing.
    """

    def __init__(self, segments: Sequence[ArcSegment], interpolation: str = "cubic-hermite", validate: bool = True):
        if interpolation not in INTERPOLATIONS:
            raise ValueError(f"unknown interpolation {interpolation!r}")
        self.segments = sorted(segments, key=lambda s: s.j)
        self.interpolation = interpolation
        if not self.segments:
            raise ValueError("an arc needs at least one segment")
        self.dim = self.segments[0].x.shape[1]
        self.j_min = self.segments[0].j
        if validate:
            for s in self.segments:
                if s.x.shape[1] != self.dim:
                    raise ValueError("state dimension differs between segments")
            self.domain  # noqa: B018 - raises on invalid layouts

    # construction helpers -------------------------------------------------

    @classmethod
    def from_samples(cls, rows: Iterable[tuple], interpolation: str = "cubic-hermite") -> "HybridArc":
        """Build from ``(t, j, x)`` or ``(t, j, x, dx)`` rows in hybrid-time order."""
        groups: dict[int, list] = {}
        for row in rows:
            groups.setdefault(int(row[1]), []).append(row)
        segs = []
        for j, rs in groups.items():
            t = [r[0] for r in rs]
            x = np.array([np.atleast_1d(r[2]) for r in rs], dtype=float)
            dx = None
            if all(len(r) > 3 and r[3] is not None for r in rs):
                dx = np.array([np.atleast_1d(r[3]) for r in rs], dtype=float)
            segs.append(ArcSegment.from_arrays(j, t, x, dx))
        return cls(segs, interpolation)

    @classmethod
    def from_function(
        cls,
        fn: Callable[[float, int], Sequence[float]],
        segments: Iterable[tuple[float, float, int]],
        step: float,
        deriv: Callable[[float, int], Sequence[float]] | None = None,
        interpolation: str = "cubic-hermite",
    ) -> "HybridArc":
        """Sample ``fn(t, j)`` on a grid of spacing ``step`` over each segment (endpoints kept)."""
        segs = []
        for a, b, j in segments:
            n = max(1, int(math.ceil((b - a) / step - 1e-9)))
            t = np.linspace(a, b, n + 1) if b > a else np.array([a])
            x = np.array([np.atleast_1d(fn(ti, j)) for ti in t], dtype=float)
            dx = None if deriv is None else np.array([np.atleast_1d(deriv(ti, j)) for ti in t], dtype=float)
            segs.append(ArcSegment.from_arrays(j, t, x, dx))
        return cls(segs, interpolation)

    @classmethod
    def constant(cls, value, t_lo: float, t_hi: float = 0.0, j: int = 0, step: float | None = None) -> "HybridArc":
        """Constant arc on ``[t_lo, t_hi] x {j}`` with zero stored derivative."""
        value = np.atleast_1d(np.asarray(value, dtype=float))
        if step is None or t_hi == t_lo:
            t = np.array([t_lo, t_hi]) if t_hi > t_lo else np.array([t_lo])
        else:
            t = np.linspace(t_lo, t_hi, max(2, int(math.ceil((t_hi - t_lo) / step)) + 1))
        x = np.tile(value, (len(t), 1))
        return cls([ArcSegment.from_arrays(j, t, x, np.zeros_like(x))])

    # queries ----------------------------------------------------------------

    @property
    def domain(self) -> HybridTimeDomain:
        return validate_domain([(s.t_lo, s.t_hi, s.j) for s in self.segments])

    @property
    def j_max(self) -> int:
        return self.segments[-1].j

    def segment(self, j: int) -> ArcSegment:
        i = j - self.j_min
        if i < 0 or i >= len(self.segments):
            raise OutOfDomain(f"jump index {j} not in arc (j in [{self.j_min}, {self.j_max}])")
        return self.segments[i]

    def has(self, t: float, j: int) -> bool:
        i = j - self.j_min
        if i < 0 or i >= len(self.segments):
            return False
        s = self.segments[i]
        return s.t_lo - TIME_TOL <= t <= s.t_hi + TIME_TOL

    def eval(self, t: float, j: int) -> np.ndarray:
        """State at ``(t, j)``; exact at sample points, interpolated in between."""
        return self.segment(j).value(t, self.interpolation)

    def end(self) -> tuple[float, int]:
        last = self.segments[-1]
        return last.t_hi, last.j

    def flat(self) -> "FlatSamples":
        return FlatSamples.of(self)

    def positions_bounds(self) -> list[tuple[float, float, int]]:
        return [(s.t_lo + s.j, s.t_hi + s.j, s.j) for s in self.segments]

    def window_start(self, t: float, j: int, delta: float) -> float:
        """Absolute position where the depth-``delta`` memory window anchored at ``(t, j)`` starts.

        This is ``t + j - delta_inf``: the largest position of the arc not above
        ``t + j - delta``. When the history is shallower it is the oldest position.
        """
        target = t + j - delta
        for i in range(j - self.j_min, -1, -1):
            s = self.segments[i]
            lo = s.t_lo + s.j
            hi = (min(s.t_hi, t) if s.j == j else s.t_hi) + s.j
            if target > hi:
                return hi
            if target >= lo - TIME_TOL:
                return max(target, lo)
        return self.segments[0].t_lo + self.segments[0].j

    def __repr__(self):
        return f"HybridArc(dim={self.dim}, j=[{self.j_min}, {self.j_max}], samples={sum(s.n for s in self.segments)})"


@dataclass
class FlatSamples:
    """All samples of an arc in hybrid-time order."""

    t: np.ndarray
    j: np.ndarray
    x: np.ndarray
    dx: np.ndarray
    last_in_segment: np.ndarray

    @property
    def position(self) -> np.ndarray:
        return self.t + self.j

    @classmethod
    def of(cls, arc: HybridArc) -> "FlatSamples":
        t = np.concatenate([s.t for s in arc.segments])
        j = np.concatenate([np.full(s.n, s.j) for s in arc.segments])
        x = np.concatenate([s.x for s in arc.segments])
        dx = np.concatenate([s.dx for s in arc.segments])
        last = np.zeros(len(t), dtype=bool)
        last[np.cumsum([s.n for s in arc.segments]) - 1] = True
        return cls(t, j, x, dx, last)

    def forward_mask(self) -> np.ndarray:
        return (self.t >= -TIME_TOL) & (self.j >= 0)


# ---------------------------------------------------------------------------
# memory arcs


class MemoryArc:
    """The window ``phi(s, k) = x(t + s, j + k)`` of an arc, re-centred at ``(t, j)``.

    This is a view: it holds a reference to the parent arc and never copies
    samples until :meth:`samples` or :meth:`to_arc` is called.
    """

    __slots__ = ("arc", "t", "j", "start", "_head", "left_limits", "crossed")

    def __init__(self, arc: HybridArc, t: float, j: int, start: float, left_limits: bool = False):
        self.arc = arc
        self.t = t
        self.j = j
        self.start = start
        self._head = None
        # with left_limits, delayed() returns the limit from earlier times at a jump instant
        self.left_limits = left_limits
        self.crossed = False

    @classmethod
    def from_arc(cls, arc: HybridArc) -> "MemoryArc":
        """Treat a non-positive-domain arc as a memory arc anchored at (0, 0)."""
        if arc.j_max != 0 or abs(arc.segments[-1].t_hi) > TIME_TOL:
            raise AnchorError("a memory arc must end at (0, 0)")
        first = arc.segments[0]
        return cls(arc, 0.0, 0, first.t_lo + first.j)

    @property
    def delta_inf(self) -> float:
        return self.t + self.j - self.start

    @property
    def dim(self) -> int:
        return self.arc.dim

    def depth(self) -> float:
        return -self.delta_inf

    def head(self) -> np.ndarray:
        if self._head is None:
            self._head = self.arc.eval(self.t, self.j)
        return self._head

    def eval(self, s: float, k: int) -> np.ndarray:
        if s > TIME_TOL or k > 0 or s + k < -self.delta_inf - TIME_TOL:
            raise OutOfDomain(f"({s}, {k}) outside memory window of depth {self.delta_inf}")
        if s == 0 and k == 0:
            return self.head().copy()
        return self.arc.eval(self.t + s, self.j + k)

    def delayed(self, r: float) -> np.ndarray:
        """Value at ``(-r, k(-r))`` where ``k(-r)`` is the largest index with ``(-r, k)`` in the window.

        With ``left_limits`` set and ``-r`` on a jump instant, the value on the
        interval that reaches that instant from the left is returned instead and
        :attr:`crossed` is set.
        """
        tq = self.t - r
        arc = self.arc
        for i in range(self.j - arc.j_min, -1, -1):
            seg = arc.segments[i]
            if seg.t_lo - TIME_TOL <= tq <= seg.t_hi + TIME_TOL:
                if tq + seg.j < self.start - TIME_TOL:
                    break
                if self.left_limits and tq <= seg.t_lo + TIME_TOL:
                    left = self._left_segment(i, tq)
                    if left is not None:
                        self.crossed = True
                        return left.value(left.t_hi, arc.interpolation)
                return seg.value(min(max(tq, seg.t_lo), seg.t_hi), arc.interpolation)
            if seg.t_hi < tq:
                break
        raise OutOfDomain(f"delay {r} reaches outside the memory window at ({self.t}, {self.j})")

    def _left_segment(self, i: int, tq: float):
        """Highest segment below index ``i`` with positive length ending at ``tq``, inside the window."""
        for seg in reversed(self.arc.segments[:i]):
            if abs(seg.t_hi - tq) > TIME_TOL:
                return None
            if seg.t_hi - seg.t_lo > TIME_TOL:
                return seg if seg.t_hi + seg.j >= self.start - TIME_TOL else None
        return None

    def samples(self, depth: float | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(s, k, X)`` for every sample with ``s + k >= -depth`` inside the window.

        The window's lower edge and the anchor are included (interpolated when they
        are not grid points), so sups over the returned values are exact for
        piecewise-monotone interpolants.
        """
        lo = self.start if depth is None else max(self.start, self.t + self.j - depth)
        arc = self.arc
        ss, ks, xs = [], [], []
        for i in range(self.j - arc.j_min, -1, -1):
            seg = arc.segments[i]
            if seg.t_hi + seg.j < lo - TIME_TOL:
                break
            t_top = min(seg.t_hi, self.t) if seg.j == self.j else seg.t_hi
            t_bot = max(seg.t_lo, lo - seg.j)
            if t_bot > t_top + TIME_TOL:
                continue
            ts = seg.t
            a = int(np.searchsorted(ts, t_bot - TIME_TOL))
            b = int(np.searchsorted(ts, t_top + TIME_TOL, side="right"))
            tt = ts[a:b]
            xx = seg.x[a:b]
            if len(tt) == 0 or tt[0] > t_bot + TIME_TOL:
                tt = np.concatenate([[t_bot], tt])
                xx = np.vstack([seg.value(t_bot, arc.interpolation)[None, :], xx])
            if tt[-1] < t_top - TIME_TOL:
                tt = np.concatenate([tt, [t_top]])
                xx = np.vstack([xx, seg.value(t_top, arc.interpolation)[None, :]])
            ss.append(tt - self.t)
            ks.append(np.full(len(tt), seg.j - self.j))
            xs.append(xx)
        ss.reverse()
        ks.reverse()
        xs.reverse()
        return np.concatenate(ss), np.concatenate(ks), np.vstack(xs)

    def time_profile(self, r: float, keep_jumps: bool = False) -> tuple[np.ndarray, np.ndarray]:
        """``(s, X)`` on ``s in [-r, 0]`` taking the latest jump index at each time.

        With ``keep_jumps`` the pre- and post-jump samples at a shared time are
        both kept (``s`` is then non-decreasing), so a trapezoid rule sees the
        jump as a zero-width panel. Used for integral functionals over the last
        ``r`` seconds.
        """
        s, k, x = self.samples()
        keep = s >= -r - TIME_TOL
        s, k, x = s[keep], k[keep], x[keep]
        # at shared jump times keep the post-jump (largest k) sample
        if len(s) > 1 and not keep_jumps:
            dup = np.concatenate([np.abs(np.diff(s)) <= TIME_TOL, [False]])
            s, x = s[~dup], x[~dup]
        if len(s) == 0 or s[0] > -r + TIME_TOL:
            try:
                edge = self.delayed(r)
            except OutOfDomain:
                edge = None
            if edge is not None:
                s = np.concatenate([[-r], s])
                x = np.vstack([edge[None, :], x])
        return s, x

    @property
    def domain(self) -> HybridTimeDomain:
        s, k, _ = self.samples()
        segs = {}
        for si, ki in zip(s, k):
            lo, hi = segs.get(int(ki), (si, si))
            segs[int(ki)] = (min(lo, si), max(hi, si))
        return validate_domain([(lo, hi, k) for k, (lo, hi) in segs.items()])

    def to_arc(self) -> HybridArc:
        """Materialise the window as a standalone arc on non-positive hybrid time."""
        s, k, x = self.samples()
        rows = []
        for si, ki, xi in zip(s, k, x):
            t_abs, j_abs = self.t + si, self.j + int(ki)
            seg = self.arc.segment(j_abs)
            i = int(np.searchsorted(seg.t, t_abs - TIME_TOL))
            d = seg.dx[i] if i < seg.n and abs(seg.t[i] - t_abs) <= TIME_TOL and not np.isnan(seg.dx[i][0]) else None
            rows.append((0.0 if abs(si) <= TIME_TOL else float(si), int(ki), xi, d))
        return HybridArc.from_samples(rows, self.arc.interpolation)

    def __repr__(self):
        return f"MemoryArc(anchor=({self.t}, {self.j}), delta_inf={self.delta_inf:.6g})"


def memory_operator(x: HybridArc, t: float, j: int, delta: float) -> MemoryArc:
    """The depth-``delta`` memory window of ``x`` at ``(t, j)``."""
    if j < 0 or t < -TIME_TOL or not x.has(t, j):
        raise OutOfDomain(f"({t}, {j}) is not in the forward domain of the arc")
    return MemoryArc(x, t, j, x.window_start(t, j, delta))


def memory_sup_distance(phi: MemoryArc, dist_w: Callable[[np.ndarray], float], delta: float | None = None) -> float:
    """``sup |phi(s,k)|_W`` over the window (restricted to ``s + k >= -delta - 1`` if given)."""
    _, _, x = phi.samples(None if delta is None else delta + 1)
    return max(float(dist_w(xi)) for xi in x)


# ---------------------------------------------------------------------------
# inputs


class InputSignal:
    """A hybrid input ``u``. Either sampled (previous-sample hold) or a function of ``(t, j)``.

    Sampled inputs live on forward hybrid time only: ``dom_{<=0} u = {(0, 0)}``.
    """

    def __init__(self, dim: int, fn: Callable[[float, int], Sequence[float]] | None = None, arc: HybridArc | None = None):
        if (fn is None) == (arc is None):
            raise ValueError("give exactly one of fn or arc")
        if arc is not None:
            first = arc.segments[0]
            if first.j < 0 or first.t_lo < -TIME_TOL:
                raise AnchorError("input samples must lie in forward hybrid time")
            if arc.dim != dim:
                raise ValueError("input dimension mismatch")
        self.dim = dim
        self.fn = fn
        self.arc = arc

    @classmethod
    def zero(cls, dim: int = 1) -> "InputSignal":
        z = np.zeros(dim)
        return cls(dim, fn=lambda t, j: z)

    @classmethod
    def constant(cls, value) -> "InputSignal":
        v = np.atleast_1d(np.asarray(value, dtype=float))
        return cls(len(v), fn=lambda t, j: v)

    @classmethod
    def from_function(cls, fn, dim: int) -> "InputSignal":
        return cls(dim, fn=lambda t, j: np.atleast_1d(np.asarray(fn(t, j), dtype=float)))

    @classmethod
    def from_arc(cls, arc: HybridArc) -> "InputSignal":
        return cls(arc.dim, arc=HybridArc(arc.segments, "linear"))

    @property
    def sampled(self) -> bool:
        return self.arc is not None

    def value(self, t: float, j: int) -> np.ndarray:
        if self.fn is not None:
            return self.fn(t, j)
        arc = self.arc
        i = min(max(j - arc.j_min, 0), len(arc.segments) - 1)
        seg = arc.segments[i]
        k = int(np.searchsorted(seg.t, t + TIME_TOL, side="right")) - 1
        return seg.x[max(k, 0)]


def sup_norm_input(u: InputSignal, start: HybridTime, stop: HybridTime) -> float:
    """``||u||`` over the hybrid window ``start <= (t, j) <= stop`` (ordered by ``t + j``).

    Jump points in Gamma(u) are taken exactly; the essential sup elsewhere is
    approximated by the sample sup.
    """
    if not u.sampled:
        raise ValueError("sup norms need a sampled input; use Solution.u or InputSignal.from_arc")
    if stop.position < start.position:
        raise ValueError("window end precedes window start")
    arc = u.arc
    for ht in (start, stop):
        if not arc.has(ht.t, ht.j):
            raise OutOfDomain(f"({ht.t}, {ht.j}) not in dom u")
    lo, hi = start.position - TIME_TOL, stop.position + TIME_TOL
    gamma_sup = 0.0
    rest_sup = 0.0
    for idx, seg in enumerate(arc.segments):
        pos = seg.t + seg.j
        inside = (pos >= lo) & (pos <= hi)
        if not inside.any():
            continue
        mags = np.linalg.norm(seg.x[inside], axis=1)
        is_gamma = np.zeros(seg.n, dtype=bool)
        if idx + 1 < len(arc.segments):
            is_gamma[-1] = True
        g = is_gamma[inside]
        if g.any():
            gamma_sup = max(gamma_sup, float(mags[g].max()))
        if (~g).any():
            rest_sup = max(rest_sup, float(mags[~g].max()))
    return max(gamma_sup, rest_sup)
