"""Trajectory checks for Lyapunov-Razumikhin and Lyapunov-Krasovskii certificates.

Every check samples a simulated :class:`~hymem.system.Solution`; a pass means
the hypothesis was not falsified along that trajectory.

Variants and what they check
----------------------------
Razumikhin (state function ``V_state``), trigger ``V >= max(gamma1(Vbar), gamma2(|u|))``:

=======  ===========================  ==================================
variant  flow (when triggered)        jump
=======  ===========================  ==================================
ThmA     V° <= -alpha3(V)             V(g) <= rho(Vbar)   (always)
ThmB     V° <= -rho(|x|_W)            V(g) - V <= -rho(|x|_W)
PropC    V° <= 0                      V(g) - V <= -rho(|x|_W)
PropD    V° <= -rho(|x|_W)            V(g) <= V
ThmE     V° <= -lam1 V                V(g) <= mu V
ThmF     V° <= lam1 V                 V(g) <= mu V
=======  ===========================  ==================================

Krasovskii (functional ``V_func``), trigger ``V(phi) >= rho(|u|)``:

===========  =================================  ==============================
variant      flow                               jump (phi+ = arc after jump)
===========  =================================  ==============================
ThmG         D+V <= -alpha3(|x|_W)              V(phi+) <= V - alpha3(|x|_W)
PropG-flow   D+V <= 0                           V(phi+) <= V - alpha3(|x|_W)
PropG-jump   D+V <= -alpha3(|x|_W)              V(phi+) <= V
ThmH         D+V <= -lam1 V + lam2 Vhat         V(phi+) <= mu V
ThmI         D+V <= lam1 V + lam2 Vhat          V(phi+) <= mu V
===========  =================================  ==============================
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import OutOfDomain, SchemaError
from .hybrid_time import TIME_TOL, memory_operator, memory_sup_distance
from .report import DEFAULT_TOL, DERIV_TOL, CheckReport, Tol
from .toolkit import (
    ComparisonFunction,
    PersistenceSpec,
    adt_margin,
    check_dwell_band,
    check_persistence,
    check_small_gain,
    directional_deriv,
    dini_functional_deriv,
    stable_jump_rate,
    radt_margin,
    sliding_max,
    solve_lambda_bar,
    validate_class,
    vhat_series,
)

RAZUMIKHIN = ("ThmA", "ThmB", "PropC", "PropD", "ThmE", "ThmF")
KRASOVSKII = ("ThmG", "PropG-flow", "PropG-jump", "ThmH", "ThmI")
VARIANTS = RAZUMIKHIN + KRASOVSKII

_REQUIRED = {
    "ThmA": ("V_state", "alpha1", "alpha2", "alpha3", "rho", "gamma1", "gamma2"),
    "ThmB": ("V_state", "alpha1", "alpha2", "rho", "gamma1", "gamma2"),
    "PropC": ("V_state", "alpha1", "alpha2", "rho", "gamma1", "gamma2", "persistence"),
    "PropD": ("V_state", "alpha1", "alpha2", "rho", "gamma1", "gamma2", "persistence"),
    "ThmE": ("V_state", "alpha1", "alpha2", "gamma1", "gamma2", "lam1", "mu", "eps", "N0"),
    "ThmF": ("V_state", "alpha1", "alpha2", "gamma1", "gamma2", "lam1", "mu", "eps", "N0"),
    "ThmG": ("V_func", "alpha1", "alpha2", "alpha3", "rho"),
    "PropG-flow": ("V_func", "alpha1", "alpha2", "alpha3", "rho", "persistence"),
    "PropG-jump": ("V_func", "alpha1", "alpha2", "alpha3", "rho", "persistence"),
    "ThmH": ("V_func", "alpha1", "alpha2", "rho", "lam1", "lam2", "mu", "eps", "N0"),
    "ThmI": ("V_func", "alpha1", "alpha2", "rho", "lam1", "lam2", "mu", "eps", "N0"),
}

# a state-valued bound can stand in for the matching comparison function
_OVERRIDES = {"alpha1": "lower_bound", "alpha2": "upper_bound", "rho": "flow_bound"}

StateFn = Callable[[np.ndarray], float]


@dataclass
class CertificateSpec:
    """A candidate certificate: the variant, its Lyapunov object and constants.

    ``lower_bound`` / ``upper_bound`` replace ``alpha1(|x|_W)`` / ``alpha2(|x|_W)``
    by a function of the state, and ``flow_bound`` replaces the variant's flow
    right-hand side by a function of the state (``V° <= flow_bound(x)``).
    ``lam`` is the decay or growth rate used by the envelope checks.
    """

    variant: str
    V_state: StateFn | None = None
    V_func: Callable | None = None
    alpha1: ComparisonFunction | None = None
    alpha2: ComparisonFunction | None = None
    alpha3: ComparisonFunction | None = None
    rho: ComparisonFunction | None = None
    gamma1: ComparisonFunction | None = None
    gamma2: ComparisonFunction | None = None
    lam1: float | None = None
    lam2: float | None = None
    mu: float | None = None
    eps: float | None = None
    N0: int | None = None
    varpi: float = 1.0
    persistence: PersistenceSpec | None = None
    lower_bound: StateFn | None = None
    upper_bound: StateFn | None = None
    flow_bound: StateFn | None = None
    lam: float | None = None
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.validate()

    @property
    def razumikhin(self) -> bool:
        return self.variant in RAZUMIKHIN

    def validate(self) -> None:
        if self.variant not in VARIANTS:
            raise SchemaError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        missing = []
        for name in _REQUIRED[self.variant]:
            if getattr(self, name) is None and getattr(self, _OVERRIDES.get(name, ""), None) is None:
                missing.append(name)
        if missing:
            raise SchemaError(f"{self.variant} needs {', '.join(missing)}")
        if self.razumikhin and self.V_func is not None:
            raise SchemaError(f"{self.variant} takes a state function V_state, not a functional")
        if not self.razumikhin and self.V_state is not None:
            raise SchemaError(f"{self.variant} takes a functional V_func, not a state function")
        v, lam1, lam2, mu = self.variant, self.lam1, self.lam2, self.mu
        if v == "ThmE" and not (mu >= 1 and lam1 > 0):
            raise SchemaError("ThmE needs mu >= 1 and lam1 > 0")
        if v == "ThmF" and not (0 < mu < 1 and lam1 > 0):
            raise SchemaError("ThmF needs mu in (0, 1) and lam1 > 0")
        if v == "ThmH" and not (lam1 > lam2 >= 0 and mu > 1):
            raise SchemaError("ThmH needs lam1 > lam2 >= 0 and mu > 1")
        if v == "ThmI" and not (lam1 >= 0 and lam2 >= 0 and 0 < mu < 1):
            raise SchemaError("ThmI needs lam1, lam2 >= 0 and mu in (0, 1)")
        if self.N0 is not None and self.N0 < 1:
            raise SchemaError("N0 must be a positive integer")


def _need(spec: CertificateSpec, group: tuple[str, ...], what: str) -> None:
    if spec.variant not in group:
        raise SchemaError(f"{what} does not apply to variant {spec.variant}")


def _tol_dict(tol: Tol) -> dict:
    return tol.as_dict()


# ---------------------------------------------------------------------------
# per-sample helpers


def _flow_points(sol, stride: int = 1):
    """``(t, j, x, f, i, seg)`` at forward samples where a flow step starts, ``f`` the right derivative."""
    for seg in sol.x.segments:
        if seg.j < 0:
            continue
        start = int(np.searchsorted(seg.t, -TIME_TOL)) if seg.j == 0 else 0
        for i in range(start, seg.n - 1, stride):
            f = seg.kinks.get(i)
            if f is None:
                f = seg.dx[i]
            if np.isnan(f[0]):
                continue
            yield float(seg.t[i]), seg.j, seg.x[i], f


def _vbar_at_samples(V: StateFn, sol) -> dict[tuple[int, int], float]:
    """Sample sup of ``V`` over each forward sample's own memory window (depth up to delta + 1)."""
    flat = sol.x.flat()
    vals = np.array([float(V(x)) for x in flat.x])
    pos = flat.position
    fwd = np.nonzero(flat.forward_mask())[0]
    starts = np.full(len(pos), -np.inf)
    for k in fwd:
        starts[k] = sol.x.window_start(float(flat.t[k]), int(flat.j[k]), sol.delta)
    out = _sliding_max_var(vals, pos, starts)
    res = {}
    seg_first = {}
    offset = 0
    for seg in sol.x.segments:
        seg_first[seg.j] = offset
        offset += seg.n
    for k in fwd:
        j = int(flat.j[k])
        res[(j, k - seg_first[j])] = out[k]
    return res


def _sliding_max_var(values: np.ndarray, positions: np.ndarray, starts: np.ndarray) -> np.ndarray:
    """Max of ``values[k]`` with ``starts[i] <= positions[k] <= positions[i]``; ``starts`` non-decreasing where finite."""
    out = np.empty(len(values))
    dq: list[int] = []
    head = 0
    lo = 0
    for i in range(len(values)):
        v = values[i]
        while len(dq) > head and values[dq[-1]] <= v:
            dq.pop()
        dq.append(i)
        s = starts[i]
        if np.isfinite(s):
            while positions[lo] < s - TIME_TOL:
                lo += 1
            while dq[head] < lo:
                head += 1
        out[i] = values[dq[head]]
    return out


def _razumikhin_trigger(spec: CertificateSpec, Vx: float, vb: float, unorm: float) -> bool:
    return Vx >= max(spec.gamma1(vb), spec.gamma2(unorm))


# ---------------------------------------------------------------------------
# sandwich


def check_sandwich(spec: CertificateSpec, sol, tol: Tol = DEFAULT_TOL, stride: int = 1) -> CheckReport:
    """``alpha1(|x|_W) <= V <= alpha2(.)`` at every forward sample.

    For functionals the upper bound uses the memory sup ``||phi||_W``.
    """
    rep = CheckReport(variant=f"{spec.variant}:sandwich", tolerances=_tol_dict(tol))
    dw = sol.dist_w
    for k, (t, j, x) in enumerate(sol.forward_samples()):
        if k % stride:
            continue
        if spec.razumikhin:
            v = float(spec.V_state(x))
            lo = spec.lower_bound(x) if spec.lower_bound else spec.alpha1(dw(x))
            hi = spec.upper_bound(x) if spec.upper_bound else spec.alpha2(dw(x))
        else:
            phi = memory_operator(sol.x, t, j, sol.delta)
            v = float(spec.V_func(phi))
            lo = spec.lower_bound(x) if spec.lower_bound else spec.alpha1(dw(x))
            hi = spec.alpha2(memory_sup_distance(phi, dw, sol.delta))
        rep.compare(t, j, "sandwich-lower", lo, v, tol)
        rep.compare(t, j, "sandwich-upper", v, hi, tol)
    return rep


# ---------------------------------------------------------------------------
# Razumikhin


def _razumikhin_flow_rhs(spec: CertificateSpec, x, Vx: float, dw: float) -> float:
    if spec.flow_bound is not None:
        return float(spec.flow_bound(x))
    v = spec.variant
    if v == "ThmA":
        return -spec.alpha3(Vx)
    if v in ("ThmB", "PropD"):
        return -spec.rho(dw)
    if v == "PropC":
        return 0.0
    if v == "ThmE":
        return -spec.lam1 * Vx
    return spec.lam1 * Vx  # ThmF


def check_razumikhin_flow(spec: CertificateSpec, sol, tol: Tol = DERIV_TOL, stride: int = 1) -> CheckReport:
    """Flow decrease at triggered flow samples, using the stored right derivative as ``f``."""
    _need(spec, RAZUMIKHIN, "the Razumikhin flow check")
    rep = CheckReport(variant=f"{spec.variant}:flow-decrease", trigger_hits=0, tolerances=_tol_dict(tol))
    rep.notes.append("per-selection check: f is the derivative realised by the simulator")
    V = spec.V_state
    vbars = _vbar_at_samples(V, sol)
    for seg in sol.x.segments:
        if seg.j < 0:
            continue
        start = int(np.searchsorted(seg.t, -TIME_TOL)) if seg.j == 0 else 0
        for i in range(start, seg.n - 1, stride):
            f = seg.kinks.get(i)
            if f is None:
                f = seg.dx[i]
            if np.isnan(f[0]):
                continue
            t, j, x = float(seg.t[i]), seg.j, seg.x[i]
            Vx = float(V(x))
            unorm = float(np.linalg.norm(sol.u.value(t, j)))
            if not _razumikhin_trigger(spec, Vx, vbars[(j, i)], unorm):
                continue
            rep.hit()
            lhs = directional_deriv(V, x, f)
            rhs = _razumikhin_flow_rhs(spec, x, Vx, sol.dist_w(x))
            rep.compare(t, j, "flow-decrease", lhs, rhs, tol)
    return rep


def check_razumikhin_jump(spec: CertificateSpec, sol, tol: Tol = DEFAULT_TOL) -> CheckReport:
    """Jump condition at every jump; gated by the trigger except for ThmA."""
    _need(spec, RAZUMIKHIN, "the Razumikhin jump check")
    gated = spec.variant != "ThmA"
    rep = CheckReport(variant=f"{spec.variant}:jump", trigger_hits=0 if gated else None, tolerances=_tol_dict(tol))
    V = spec.V_state
    vbars = _vbar_at_samples(V, sol)
    for ev in sol.jumps():
        t, j = ev.t, ev.j
        seg = sol.x.segment(j)
        i = seg.n - 1
        x = seg.x[i]
        g = sol.x.segment(j + 1).x[0]
        Vx, Vg = float(V(x)), float(V(g))
        vb = vbars[(j, i)]
        if gated:
            unorm = float(np.linalg.norm(sol.u.value(t, j)))
            if not _razumikhin_trigger(spec, Vx, vb, unorm):
                continue
            rep.hit()
        v = spec.variant
        if v == "ThmA":
            rep.compare(t, j, "jump-bound", Vg, spec.rho(vb), tol)
        elif v in ("ThmB", "PropC"):
            rep.compare(t, j, "jump-decrease", Vg - Vx, -spec.rho(sol.dist_w(x)), tol)
        elif v == "PropD":
            rep.compare(t, j, "jump-nonincrease", Vg, Vx, tol)
        else:
            rep.compare(t, j, "jump-growth", Vg, spec.mu * Vx, tol)
    return rep


def check_vbar_monotone(V: StateFn, sol, delta: float | None = None, tol: float = 1e-9) -> CheckReport:
    """``Vbar`` (sample sup over each sample's window) never grows by more than ``tol`` between samples."""
    delta = sol.delta if delta is None else delta
    rep = CheckReport(variant="vbar-monotone", tolerances={"abs": tol, "rel": 0.0})
    if delta != sol.delta:
        flat = sol.x.flat()
        vals = np.array([float(V(x)) for x in flat.x])
        run = sliding_max(vals, flat.position, delta + 1.0)
        fwd = flat.forward_mask()
        ts, js, vb = flat.t[fwd], flat.j[fwd], run[fwd]
    else:
        d = _vbar_at_samples(V, sol)
        keys = sorted(d)
        vb = np.array([d[k] for k in keys])
        ts = np.array([sol.x.segment(j).t[i] for j, i in keys])
        js = np.array([j for j, _ in keys])
    t_ = Tol(abs=tol, rel=0.0)
    for k in range(1, len(vb)):
        rep.compare(ts[k], js[k], "vbar-nonincreasing", vb[k], vb[k - 1], t_)
    return rep


# ---------------------------------------------------------------------------
# Krasovskii


def functional_values(V_func, sol, stride: int = 1):
    """``(t, j, V)`` arrays of the functional at forward samples."""
    ts, js, vs = [], [], []
    for k, (t, j, _) in enumerate(sol.forward_samples()):
        if k % stride:
            continue
        ts.append(t)
        js.append(j)
        vs.append(float(V_func(memory_operator(sol.x, t, j, sol.delta))))
    return np.array(ts), np.array(js, dtype=int), np.array(vs)


def check_krasovskii(spec: CertificateSpec, sol, tol: Tol = DERIV_TOL, jump_tol: Tol = DEFAULT_TOL, stride: int = 1) -> CheckReport:
    """Flow (upper Dini derivative) and jump conditions of a functional certificate.

    Flow samples without room for a difference quotient (the last one of each
    flow interval) are skipped.
    """
    _need(spec, KRASOVSKII, "the Krasovskii check")
    rep = CheckReport(variant=f"{spec.variant}:krasovskii", trigger_hits=0, tolerances=_tol_dict(tol))
    rep.notes.append("per-selection check: D+V is taken along the simulated continuation")
    V = spec.V_func
    v = spec.variant
    ts, js, vs = functional_values(V, sol)
    index = {(int(j), float(t)): k for k, (t, j) in enumerate(zip(ts, js))}
    need_hat = v in ("ThmH", "ThmI")
    vhat = vhat_series(vs, ts + js, sol.delta) if need_hat else None

    for n, (t, j, x, _) in enumerate(_flow_points(sol)):
        if n % stride:
            continue
        k = index[(j, t)]
        Vp = vs[k]
        unorm = float(np.linalg.norm(sol.u.value(t, j)))
        if Vp < spec.rho(unorm):
            continue
        try:
            d = dini_functional_deriv(V, sol, t, j)
        except OutOfDomain:
            continue
        rep.hit()
        dw = sol.dist_w(x)
        if v in ("ThmG", "PropG-jump"):
            rhs = -spec.alpha3(dw)
        elif v == "PropG-flow":
            rhs = 0.0
        elif v == "ThmH":
            rhs = -spec.lam1 * Vp + spec.lam2 * vhat[k]
        else:
            rhs = spec.lam1 * Vp + spec.lam2 * vhat[k]
        rep.compare(t, j, "dini-flow", d, rhs, tol)

    for ev in sol.jumps():
        t, j = ev.t, ev.j
        k = index[(j, float(sol.x.segment(j).t[-1]))]
        kp = index[(j + 1, float(sol.x.segment(j + 1).t[0]))]
        Vp, Vplus = vs[k], vs[kp]
        unorm = float(np.linalg.norm(sol.u.value(t, j)))
        if Vp < spec.rho(unorm):
            continue
        rep.hit()
        x = sol.x.segment(j).x[-1]
        if v in ("ThmG", "PropG-flow"):
            rep.compare(t, j, "jump-decrease", Vplus, Vp - spec.alpha3(sol.dist_w(x)), jump_tol)
        elif v == "PropG-jump":
            rep.compare(t, j, "jump-nonincrease", Vplus, Vp, jump_tol)
        else:
            rep.compare(t, j, "jump-growth", Vplus, spec.mu * Vp, jump_tol)
    return rep


# ---------------------------------------------------------------------------
# envelopes


def initial_norm(sol, dist_w=None) -> float:
    """``||A_[0,0] x||_W``: memory sup of the initial arc."""
    return memory_sup_distance(sol.initial_memory(), dist_w or sol.dist_w, sol.delta)


def _input_running_sup(sol) -> np.ndarray:
    norms = []
    for seg in sol.u.arc.segments:
        norms.extend(np.linalg.norm(seg.x, axis=1))
    return np.maximum.accumulate(np.array(norms)) if norms else np.zeros(0)


def check_iss_envelope(
    sol,
    beta: Callable[[float, float, int], float],
    gamma: ComparisonFunction | Callable[[float], float],
    dist_w=None,
    tol: Tol = DEFAULT_TOL,
    trace: bool = False,
) -> CheckReport:
    """``|x|_W <= max(beta(||phi0||_W, t, j), gamma(||u||_(t,j)))`` at every forward sample."""
    dw = dist_w or sol.dist_w
    rep = CheckReport(variant="iss-envelope", tolerances=_tol_dict(tol), trace=[] if trace else None)
    r0 = initial_norm(sol, dw)
    usup = _input_running_sup(sol)
    for k, (t, j, x) in enumerate(sol.forward_samples()):
        rhs = max(beta(r0, t, j), gamma(float(usup[k])))
        rep.compare(t, j, "iss-envelope", dw(x), rhs, tol)
    return rep


def check_razumikhin_envelope(
    sol, V: StateFn, mu: float, lam1: float, alpha2: ComparisonFunction, delta: float | None = None,
    tol: float = 1e-6, trace: bool = False,
) -> CheckReport:
    """``V(x(t,j)) <= mu**j * exp(-lam1 t) * alpha2(||phi0||_W)`` within ``tol * (1 + rhs)``."""
    if mu < 1 or lam1 <= 0:
        raise SchemaError("the Razumikhin envelope needs mu >= 1 and lam1 > 0")
    rep = CheckReport(variant="razumikhin-envelope", tolerances={"abs": tol, "rel": tol}, trace=[] if trace else None)
    a = alpha2(initial_norm(sol))
    t_ = Tol(abs=tol, rel=tol)
    for t, j, x in sol.forward_samples():
        rep.compare(t, j, "razumikhin-envelope", float(V(x)), mu**j * math.exp(-lam1 * t) * a, t_)
    return rep


def check_stable_flow_envelope(
    sol, V_func, mu: float, lam: float, alpha2: ComparisonFunction, delta: float | None = None,
    tol: float = 1e-6, trace: bool = False, values=None,
) -> CheckReport:
    """``exp(lam t) V(A_[t,j] x) <= mu**j alpha2(||phi0||_W)`` at every forward sample."""
    if mu <= 1 or lam <= 0:
        raise SchemaError("the stable-flow envelope needs mu > 1 and lam > 0")
    rep = CheckReport(variant="stable-flow-envelope", tolerances={"abs": tol, "rel": 0.0}, trace=[] if trace else None)
    a = alpha2(initial_norm(sol))
    ts, js, vs = values if values is not None else functional_values(V_func, sol)
    t_ = Tol(abs=tol, rel=0.0)
    for t, j, v in zip(ts, js, vs):
        rep.compare(t, j, "stable-flow-envelope", math.exp(lam * t) * v, mu ** int(j) * a, t_)
    return rep


def check_stable_jump_envelope(
    sol, V_func, mu: float, lam: float, alpha2: ComparisonFunction, delta: float | None = None,
    tol: float = 1e-6, trace: bool = False, values=None,
) -> CheckReport:
    """``V(A_[t,j] x) <= mu**j exp(lam t) alpha2(||phi0||_W)`` at every forward sample."""
    if not 0 < mu < 1:
        raise SchemaError("the stable-jump envelope needs mu in (0, 1)")
    rep = CheckReport(variant="stable-jump-envelope", tolerances={"abs": tol, "rel": 0.0}, trace=[] if trace else None)
    a = alpha2(initial_norm(sol))
    ts, js, vs = values if values is not None else functional_values(V_func, sol)
    t_ = Tol(abs=tol, rel=0.0)
    for t, j, v in zip(ts, js, vs):
        rep.compare(t, j, "stable-jump-envelope", v, mu ** int(j) * math.exp(lam * t) * a, t_)
    return rep


# ---------------------------------------------------------------------------
# constants


def check_constants(spec: CertificateSpec, delta: float | None = None, domain=None) -> CheckReport:
    """Scalar side conditions of the variant: small gain, dwell margins, decay-rate bands,
    class membership of the supplied comparison functions, and (given a domain)
    the dwell band and persistence."""
    rep = CheckReport(variant=f"{spec.variant}:constants")
    v = spec.variant
    for name in ("alpha1", "alpha2", "alpha3", "rho", "gamma1", "gamma2"):
        f = getattr(spec, name)
        if isinstance(f, ComparisonFunction):
            sub = validate_class(f)
            if not sub.passed:
                rep.notes.append(f"{name} is not of declared class {f.declared_class} on the grid")
                rep.require(False, f"class-{name}", 1.0, 0.0)
            else:
                rep.require(True, f"class-{name}", 0.0, 0.0)
    if v == "ThmA":
        rep.merge(_tag(check_small_gain(spec.rho), "small-gain-rho"))
    if v in RAZUMIKHIN:
        rep.merge(_tag(check_small_gain(spec.gamma1), "small-gain-gamma1"))
    if v == "ThmE":
        m = adt_margin(spec.lam1, spec.mu, spec.eps)
        rep.require(m > 0, "dwell-margin", 0.0, m)
        rep.notes.append(f"dwell margin lam1*eps - ln(mu) = {m:.6g}")
    if v == "ThmF":
        m = radt_margin(spec.lam1, spec.mu, spec.eps)
        rep.require(m < 0, "reverse-dwell-margin", m, 0.0)
        rep.notes.append(f"reverse dwell margin lam1*eps + ln(mu) = {m:.6g}")
    if v == "ThmH":
        if delta is None:
            raise SchemaError("ThmH constants need the memory size delta")
        lb = solve_lambda_bar(spec.lam1, spec.lam2, delta)
        rep.notes.append(f"lambda_bar = {lb:.12g}")
        if spec.lam is not None:
            rep.require(0 < spec.lam < lb, "rate-below-lambda-bar", spec.lam, lb)
            m = spec.eps * spec.lam - math.log(spec.mu)
        else:
            m = spec.eps * lb - math.log(spec.mu)
            rep.notes.append("no rate given: checked that some rate below lambda_bar satisfies the margin")
        rep.require(m > 0, "dwell-margin", 0.0, m)
    if v == "ThmI":
        if delta is None:
            raise SchemaError("ThmI constants need the memory size delta")
        lam = stable_jump_rate(spec.lam1, spec.lam2, spec.mu, spec.N0, delta)
        m = math.log(spec.mu) + spec.eps * lam
        rep.notes.append(f"growth rate lambda = {lam:.12g}, margin ln(mu) + eps*lambda = {m:.6g}")
        rep.require(m < 0, "reverse-dwell-margin", m, 0.0)
    if domain is not None:
        if v in ("ThmE", "ThmF", "ThmH", "ThmI"):
            rep.merge(_tag(check_dwell_band(domain, spec.eps, spec.N0), "dwell-band"))
        if spec.persistence is not None:
            rep.merge(_tag(check_persistence(domain, spec.persistence), "persistence"))
    return rep


def _tag(rep: CheckReport, name: str) -> CheckReport:
    if not rep.passed:
        rep.notes.append(f"{name} failed")
    return rep


def run_suite(spec: CertificateSpec, sol, stride: int = 1) -> list[CheckReport]:
    """All trajectory and constant checks that apply to the variant."""
    reps = [check_sandwich(spec, sol, stride=stride)]
    if spec.razumikhin:
        reps.append(check_razumikhin_flow(spec, sol, stride=stride))
        reps.append(check_razumikhin_jump(spec, sol))
    else:
        reps.append(check_krasovskii(spec, sol, stride=stride))
    reps.append(check_constants(spec, sol.delta, sol.x.domain.forward_only()))
    return reps
