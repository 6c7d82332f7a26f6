"""Hybrid systems with memory and the solution-pair simulator."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import BadInitial, DimensionMismatch, EmptyFlowSet, NoBracket, NonFiniteValue
from .hybrid_time import (
    TIME_TOL,
    ArcSegment,
    HybridArc,
    InputSignal,
    MemoryArc,
    memory_operator,
)
from .report import CheckReport

MapFn = Callable[[MemoryArc, np.ndarray], Sequence[np.ndarray]]
PredFn = Callable[[MemoryArc, np.ndarray], bool]

PRIORITIES = ("jump-first", "flow-first")
SELECTIONS = ("first", "random")
EVENT_KINDS = ("jump", "flow-exit", "dead-end", "horizon", "zeno")


def _euclid(x: np.ndarray) -> float:
    return float(np.linalg.norm(x))


@dataclass
class SystemDef:
    """Data ``(F, G, C, D)`` of a hybrid system with memory of size ``delta``.

    ``flow_map`` and ``jump_map`` return finite lists of candidates; the
    simulator picks one according to :attr:`SimConfig.selection`.
    """

    delta: float
    state_dim: int
    input_dim: int
    flow_map: MapFn
    jump_map: MapFn
    flow_set: PredFn
    jump_set: PredFn
    dist_w: Callable[[np.ndarray], float] = _euclid
    name: str = "system"

    def __post_init__(self):
        if not math.isfinite(self.delta) or self.delta < 0:
            raise ValueError(f"memory size must be finite and non-negative, got {self.delta}")


@dataclass(frozen=True)
class SimConfig:
    h: float = 1e-3
    horizon: tuple[float, int] = (1.0, 100)
    priority: str = "jump-first"
    selection: str = "first"
    seed: int = 0
    zeno_guard: int = 1000
    event_tol: float = 1e-9

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("step h must be positive")
        if not self.event_tol > 0:
            raise ValueError("event_tol must be positive")
        if self.zeno_guard < 1:
            raise ValueError("zeno_guard must be at least 1")
        if self.priority not in PRIORITIES:
            raise ValueError(f"priority must be one of {PRIORITIES}")
        if self.selection not in SELECTIONS:
            raise ValueError(f"selection must be one of {SELECTIONS}")


@dataclass(frozen=True)
class Event:
    t: float
    j: int
    kind: str

    def to_dict(self) -> dict:
        return {"t": self.t, "j": self.j, "kind": self.kind}


@dataclass
class Solution:
    """A simulated solution pair. ``x`` carries the initial memory arc as its memory part."""

    x: HybridArc
    u: InputSignal
    events: list[Event]
    termination: str
    delta: float
    dist_w: Callable[[np.ndarray], float] = _euclid
    jump_choices: list[int] = field(default_factory=list)

    def memory(self, t: float, j: int) -> MemoryArc:
        return memory_operator(self.x, t, j, self.delta)

    def initial_memory(self) -> MemoryArc:
        return self.memory(0.0, 0)

    def forward_samples(self):
        """Iterate ``(t, j, x)`` over every forward sample in hybrid-time order."""
        for seg in self.x.segments:
            if seg.j < 0:
                continue
            start = int(np.searchsorted(seg.t, -TIME_TOL)) if seg.j == 0 else 0
            for i in range(start, seg.n):
                yield float(seg.t[i]), seg.j, seg.x[i]

    def forward_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        ts, js, xs = [], [], []
        for seg in self.x.segments:
            if seg.j < 0:
                continue
            start = int(np.searchsorted(seg.t, -TIME_TOL)) if seg.j == 0 else 0
            ts.append(seg.t[start:])
            js.append(np.full(seg.n - start, seg.j))
            xs.append(seg.x[start:])
        return np.concatenate(ts), np.concatenate(js), np.vstack(xs)

    def jumps(self) -> list[Event]:
        return [e for e in self.events if e.kind == "jump"]

    def final_state(self) -> np.ndarray:
        return self.x.segments[-1].x[-1].copy()

    def input_norm(self, t: float, j: int) -> float:
        """``||u||_(t,j)``: sup of |u| from (0, 0) up to (t, j)."""
        from .hybrid_time import HybridTime, sup_norm_input

        return sup_norm_input(self.u, HybridTime(0.0, 0), HybridTime(t, j))


# ---------------------------------------------------------------------------
# integration


def _pick(cands: Sequence[np.ndarray], idx: int | None, rng, what: str) -> tuple[np.ndarray, int]:
    if len(cands) == 0:
        raise EmptyFlowSet(f"{what} returned no candidates")
    if idx is None:
        idx = 0 if rng is None else int(rng.integers(len(cands)))
    idx = min(idx, len(cands) - 1)
    return np.asarray(cands[idx], dtype=float), idx


def _rk4(sys: SystemDef, arc: HybridArc, t: float, j: int, h: float, u: InputSignal, rng, k1=None, idx=None):
    """One RK4 step from the last sample of ``arc`` (which must sit at ``(t, j)``).

    Each stage point is pushed onto the arc while F is evaluated there so
    the memory window seen by F contains the stage data, then popped.
    The candidate index is chosen once, at the first stage, unless ``k1`` and
    ``idx`` are supplied. Later stages see delayed values as limits from the
    left, which is what F equals inside the step when a delayed argument lands
    on a jump instant. Returns ``(x_new, dx_new, k1, idx, k1_next)`` where
    ``dx_new`` is that left value of F at the new point and ``k1_next`` is F
    there with the usual lookup (the two differ only across such an instant).
    """
    seg = arc.segments[-1]
    delta = sys.delta
    x0 = seg.x[-1].copy()
    if k1 is None:
        phi = MemoryArc(arc, t, j, arc.window_start(t, j, delta))
        k1, idx = _pick(sys.flow_map(phi, u.value(t, j)), None, rng, "flow map")
    elif idx is None:
        idx = 0

    crossed = False

    def stage(tc, xc, dc, left=True):
        nonlocal crossed
        seg.append(tc, xc, dc)
        try:
            phi = MemoryArc(arc, tc, j, arc.window_start(tc, j, delta), left_limits=left)
            k, _ = _pick(sys.flow_map(phi, u.value(tc, j)), idx, rng, "flow map")
            crossed = phi.crossed
        finally:
            seg.pop()
        return k

    th = t + 0.5 * h
    k2 = stage(th, x0 + 0.5 * h * k1, k1)
    k3 = stage(th, x0 + 0.5 * h * k2, k2)
    k4 = stage(t + h, x0 + h * k3, k3)
    xn = x0 + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    if not np.all(np.isfinite(xn)):
        raise NonFiniteValue(f"non-finite state after flow step at t={t}, j={j}")
    dn = stage(t + h, xn, k4)
    k1_next = stage(t + h, xn, dn, left=False) if crossed else dn
    return xn, dn, k1, idx, k1_next


def step_flow(
    sys: SystemDef,
    history: HybridArc,
    t: float,
    j: int,
    h: float,
    selection: str = "first",
    u: InputSignal | None = None,
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """One explicit fourth-order flow step from the end of ``history``.

    ``history`` must end at ``(t, j)``. It is not modified. Returns the new state
    and F evaluated there (the derivative stored for dense output).
    """
    last = history.segments[-1]
    if last.j != j or abs(last.t_hi - t) > TIME_TOL:
        raise ValueError(f"history ends at ({last.t_hi}, {last.j}), not at ({t}, {j})")
    tail = ArcSegment.from_arrays(last.j, last.t, last.x, last.dx)
    tail.kinks = dict(last.kinks)
    work = HybridArc(
        history.segments[:-1] + [tail],
        history.interpolation,
        validate=False,
    )
    u = u or InputSignal.zero(sys.input_dim)
    rng = np.random.default_rng(seed) if selection == "random" else None
    xn, dn, _, _, _ = _rk4(sys, work, t, j, h, u, rng)
    return xn, dn


def detect_flow_exit(pred: Callable[[float], bool], bracket: tuple[float, float], tol: float) -> float:
    """Bisect for the last point where ``pred`` holds.

    ``pred`` must hold at ``bracket[0]`` and fail at ``bracket[1]``. Returns a
    point inside (``pred`` true) within ``tol`` of the boundary.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not pred(lo):
        raise NoBracket(f"predicate already false at {lo}")
    if pred(hi):
        raise NoBracket(f"predicate still true at {hi}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# simulation


def _copy_history(phi0: MemoryArc | HybridArc) -> list[ArcSegment]:
    arc = phi0.to_arc() if isinstance(phi0, MemoryArc) else phi0
    out = []
    for s in arc.segments:
        seg = ArcSegment(s.j, arc.dim, capacity=max(16, 2 * s.n))
        for i in range(s.n):
            seg.append(s.t[i], s.x[i], s.dx[i])
        seg.kinks = dict(s.kinks)
        out.append(seg)
    return out


def simulate(sys: SystemDef, phi0: MemoryArc | HybridArc, u: InputSignal | None, cfg: SimConfig) -> Solution:
    """Simulate a solution pair from the initial memory arc ``phi0``.

    Flow uses RK4 with dense memory lookups; jumps append a new segment at
    the same ``t``. When both C and D hold ``cfg.priority`` decides. A step that
    leaves C is cut back by bisection to the last point inside C; the solution
    then jumps if D holds and ends as a dead end otherwise.
    """
    u = u or InputSignal.zero(sys.input_dim)
    if phi0.dim != sys.state_dim:
        raise DimensionMismatch(f"initial arc has dimension {phi0.dim}, system expects {sys.state_dim}")
    if u.dim != sys.input_dim:
        raise DimensionMismatch(f"input has dimension {u.dim}, system expects {sys.input_dim}")

    segs = _copy_history(phi0)
    last = segs[-1]
    if last.j != 0 or abs(last.t[last.n - 1]) > TIME_TOL:
        raise BadInitial("initial memory arc must end at (0, 0)")
    first = segs[0]
    if first.t[0] + first.j > -sys.delta + TIME_TOL:
        raise BadInitial(
            f"initial memory arc reaches depth {-(first.t[0] + first.j)}, shallower than memory size {sys.delta}"
        )
    arc = HybridArc(segs, getattr(phi0, "interpolation", None) or phi0.arc.interpolation, validate=False)
    arc.domain  # noqa: B018

    T, J = float(cfg.horizon[0]), int(cfg.horizon[1])
    delta = sys.delta
    rng = np.random.default_rng(cfg.seed) if cfg.selection == "random" else None
    events: list[Event] = []
    choices: list[int] = []

    t, j = 0.0, 0
    phi = MemoryArc(arc, t, j, arc.window_start(t, j, delta))
    u0 = u.value(t, j)
    if not (sys.flow_set(phi, u0) or sys.jump_set(phi, u0)):
        raise BadInitial("initial memory arc and input are in neither the flow set nor the jump set")

    blocked = False
    jumps_here = 0
    k1 = None
    termination = "horizon"
    while True:
        seg = arc.segments[-1]
        phi = MemoryArc(arc, t, j, arc.window_start(t, j, delta))
        uv = u.value(t, j)
        in_c = (not blocked) and bool(sys.flow_set(phi, uv))
        in_d = bool(sys.jump_set(phi, uv))
        can_flow = in_c and t < T - TIME_TOL
        can_jump = in_d and j < J
        if not (can_flow or can_jump):
            termination = "horizon" if (in_c or in_d) else "dead-end"
            events.append(Event(t, j, termination))
            break

        if can_jump and (cfg.priority == "jump-first" or not can_flow):
            jumps_here = jumps_here + 1 if events and events[-1].kind == "jump" and events[-1].t == t else 1
            if jumps_here > cfg.zeno_guard:
                termination = "zeno"
                events.append(Event(t, j, "zeno"))
                break
            g, idx = _pick(sys.jump_map(phi, uv), None, rng, "jump map")
            if not np.all(np.isfinite(g)):
                raise NonFiniteValue(f"non-finite jump value at t={t}, j={j}")
            new = ArcSegment(j + 1, arc.dim, capacity=64)
            new.append(t, g)
            arc.segments.append(new)
            events.append(Event(t, j, "jump"))
            choices.append(idx)
            j += 1
            blocked = False
            k1 = None
            continue

        remaining = T - t
        h = cfg.h if remaining - cfg.h > 1e-9 * cfg.h else remaining
        cache = k1 if rng is None else None
        xn, dn, k1_used, idx_used, k1_next = _rk4(sys, arc, t, j, h, u, rng, cache)
        last = seg.n - 1
        if np.isnan(seg._dx[last][0]):
            seg._dx[last] = k1_used
        elif last not in seg.kinks and not np.array_equal(seg._dx[last], k1_used):
            seg.kinks[last] = np.array(k1_used)
        t_new = T if h == remaining else t + h
        seg.append(t_new, xn, dn)
        phi_n = MemoryArc(arc, t_new, j, arc.window_start(t_new, j, delta))
        if sys.flow_set(phi_n, u.value(t_new, j)):
            t = t_new
            k1 = k1_next
            continue
        seg.pop()

        def inside(hp: float) -> bool:
            if hp <= 0.0:
                return True
            xp, dp, _, _, _ = _rk4(sys, arc, t, j, hp, u, None, k1_used, idx_used)
            seg.append(t + hp, xp, dp)
            try:
                return bool(sys.flow_set(MemoryArc(arc, t + hp, j, arc.window_start(t + hp, j, delta)), u.value(t + hp, j)))
            finally:
                seg.pop()

        hp = detect_flow_exit(inside, (0.0, h), cfg.event_tol)
        if hp > 0.0 and t + hp > t:
            xp, dp, _, _, _ = _rk4(sys, arc, t, j, hp, u, None, k1_used, idx_used)
            seg.append(t + hp, xp, dp)
            t = t + hp
        events.append(Event(t, j, "flow-exit"))
        blocked = True
        k1 = None

    for s in arc.segments:
        s.trim()
    return Solution(arc, _resample_input(u, arc), events, termination, delta, sys.dist_w, choices)


def _resample_input(u: InputSignal, arc: HybridArc) -> InputSignal:
    segs = []
    for s in arc.segments:
        if s.j < 0:
            continue
        start = int(np.searchsorted(s.t, -TIME_TOL)) if s.j == 0 else 0
        ts = s.t[start:]
        vals = np.array([np.atleast_1d(u.value(float(tt), s.j)) for tt in ts], dtype=float).reshape(len(ts), u.dim)
        segs.append(ArcSegment.from_arrays(s.j, ts, vals))
    return InputSignal(u.dim, arc=HybridArc(segs, "linear", validate=False))


def audit_solution(sys: SystemDef, sol: Solution) -> CheckReport:
    """Replay a solution against the solution-pair conditions.

    Every jump must start in D and land on a member of the G list; every sample
    on a flow interval must lie in C.
    """
    rep = CheckReport(variant="solution-pair")
    x = sol.x
    for ev in sol.jumps():
        phi = memory_operator(x, ev.t, ev.j, sol.delta)
        uv = sol.u.value(ev.t, ev.j)
        post = x.segment(ev.j + 1).x[0]
        in_d = bool(sys.jump_set(phi, uv))
        rep.compare(ev.t, ev.j, "jump-in-D", 0.0 if in_d else 1.0, 0.0, _EXACT)
        if in_d:
            member = any(np.array_equal(post, np.asarray(g, dtype=float)) for g in sys.jump_map(phi, uv))
            rep.compare(ev.t, ev.j, "jump-in-G", 0.0 if member else 1.0, 0.0, _EXACT)
    for seg in x.segments:
        if seg.j < 0 or seg.n < 2:
            continue
        for t in seg.t:
            if t < -TIME_TOL:
                continue
            phi = memory_operator(x, float(t), seg.j, sol.delta)
            in_c = bool(sys.flow_set(phi, sol.u.value(float(t), seg.j)))
            rep.compare(float(t), seg.j, "flow-in-C", 0.0 if in_c else 1.0, 0.0, _EXACT)
    return rep


class _Exact:
    def slack(self, rhs):
        return 0.0


_EXACT = _Exact()
