"""The two worked systems: a networked-control loop with a delayed plant, and
linear impulsive switched delay systems. Builders, parameters and certificates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .certificates import (
    CertificateSpec,
    check_iss_envelope,
    check_stable_flow_envelope,
    check_stable_jump_envelope,
)
from .errors import DimensionMismatch, DomainError, ParamError
from .hybrid_time import ArcSegment, HybridArc, InputSignal, MemoryArc
from .report import CheckReport
from .system import SimConfig, Solution, SystemDef
from .toolkit import ComparisonFunction, PersistenceSpec, bisect_root, stable_jump_rate

PRED_TOL = 1e-9

# ---------------------------------------------------------------------------
# Example 1: networked control loop with transmission timer


@dataclass(frozen=True)
class Example1Params:
    """Delay ``r`` and timer constants. Defaults are artifact choices satisfying the constraints."""

    r: float = 0.02
    eps: float = 0.01
    tau_mati: float = 0.04
    tau_mad: float = 0.02
    tau_bar: float = 0.04125

    def validate(self) -> None:
        if not self.r > 0:
            raise ParamError(f"delay r must be positive, got {self.r}")
        if not 0 < self.eps < self.tau_mati <= self.tau_bar:
            raise ParamError(
                f"need 0 < eps < tau_mati <= tau_bar, got eps={self.eps}, tau_mati={self.tau_mati}, tau_bar={self.tau_bar}"
            )
        if not 0 <= self.tau_mad <= self.tau_mati:
            raise ParamError(f"need 0 <= tau_mad <= tau_mati, got tau_mad={self.tau_mad}")

    @property
    def delta(self) -> float:
        return self.r + self.r / self.eps + 1.0


_PHI_STEP = 1e-5
_PHI_RANGE = 0.06
_PHI_ODES = {
    0: (lambda t, y: -8 * y - (64 / 7) * y**2 - 8, 2.0),
    1: (lambda t, y: -10 * y - (64 / 7) * y**2 - 15, 2.2),
}


@lru_cache(maxsize=None)
def _phi_table(l: int) -> tuple[np.ndarray, np.ndarray]:
    rhs, y0 = _PHI_ODES[l]
    grid = np.linspace(0.0, _PHI_RANGE, int(round(_PHI_RANGE / _PHI_STEP)) + 1)
    out = solve_ivp(rhs, (0.0, _PHI_RANGE), [y0], t_eval=grid, method="DOP853", rtol=1e-12, atol=1e-12)
    return grid, out.y[0]


def _phi(l: int, tau: float) -> float:
    grid, vals = _phi_table(l)
    return float(np.interp(tau, grid, vals))


def example1_phi(l: int, tau: float, tau_mati: float = Example1Params.tau_mati) -> float:
    """Timer weight ``phi_l(tau)`` for logic mode ``l``, tabulated at step 1e-5."""
    if l not in (0, 1):
        raise DomainError(f"logic mode must be 0 or 1, got {l}")
    if tau < -PRED_TOL or tau > tau_mati + PRED_TOL:
        raise DomainError(f"tau={tau} outside [0, {tau_mati}]")
    return _phi(l, min(max(tau, 0.0), tau_mati))


def example1_assumptions(p: Example1Params = Example1Params()) -> CheckReport:
    """Numerical check of the timer-weight properties the certificate relies on.

    Range [0.5, 2.2] and strict decrease on [0, tau_mati]; ``phi0 >= phi1(0)/2`` on
    [0, tau_mati]; ``phi1 >= phi0`` on [0, tau_mad]. Failures are reported, not raised.
    """
    rep = CheckReport(variant="example1-timer-assumptions")
    grid, _ = _phi_table(0)
    mask = grid <= p.tau_mati + 1e-15
    g = grid[mask]
    phis = {l: _phi_table(l)[1][mask] for l in (0, 1)}
    for l in (0, 1):
        v = phis[l]
        lo_i, hi_i = int(np.argmin(v)), int(np.argmax(v))
        rep.require(v[lo_i] >= 0.5, f"phi{l}-range-low", 0.5, v[lo_i], t=g[lo_i])
        rep.require(v[hi_i] <= 2.2 + 1e-12, f"phi{l}-range-high", v[hi_i], 2.2, t=g[hi_i])
        d = np.diff(v)
        k = int(np.argmax(d))
        rep.require(d[k] < 0, f"phi{l}-decreasing", d[k], 0.0, t=g[k + 1])
    half = 0.5 * phis[1][0]
    k = int(np.argmin(phis[0]))
    ok = rep.require(phis[0][k] >= half, "phi0-above-half-phi1-at-0", half, phis[0][k], t=g[k])
    if not ok:
        rep.notes.append(f"phi0(tau) >= 0.5*phi1(0) = {half:.4g} fails for tau >= {g[np.argmax(phis[0] < half)]:.5g}")
    m = g <= p.tau_mad + 1e-15
    diff = phis[1][m] - phis[0][m]
    k = int(np.argmin(diff))
    ok = rep.require(diff[k] >= 0, "phi1-above-phi0", phis[0][m][k], phis[1][m][k], t=g[m][k])
    if not ok:
        rep.notes.append(f"phi1(tau) >= phi0(tau) fails for tau >= {g[m][np.argmax(diff < 0)]:.5g}")
    return rep


def example1_lyapunov(x: np.ndarray) -> float:
    """``x^2 + phi_l(tau) (e + s)^2`` on the state ``(x, e, s, tau, l)``."""
    l = 0 if x[4] < 0.5 else 1
    w = x[1] + x[2]
    return float(x[0] ** 2 + _phi(l, x[3]) * w * w)


def build_example1(p: Example1Params = Example1Params()) -> tuple[SystemDef, CertificateSpec]:
    """System on the state ``(x, e, s, tau, l)`` with a scalar input, and its Razumikhin certificate."""
    p.validate()
    r, eps, mati, mad = p.r, p.eps, p.tau_mati, p.tau_mad

    def in_c(phi: MemoryArc, u) -> bool:
        z = phi.head()
        tau = z[3]
        if z[4] < 0.5:
            return -PRED_TOL <= tau <= mati + PRED_TOL
        return -PRED_TOL <= tau <= mad + PRED_TOL

    def in_d(phi: MemoryArc, u) -> bool:
        z = phi.head()
        tau = z[3]
        if z[4] < 0.5:
            return eps - PRED_TOL <= tau <= mati + PRED_TOL
        return -PRED_TOL <= tau <= mad + PRED_TOL

    def flow(phi: MemoryArc, u):
        z = phi.head()
        xd = phi.delayed(r)[0]
        uu = float(u[0])
        return [np.array([-7 * z[0] + xd + z[1] + uu, 5 * z[0] - xd - z[1] + uu, 0.0, 1.0, 0.0])]

    def jump(phi: MemoryArc, u):
        z = phi.head()
        if z[4] < 0.5:
            return [np.array([z[0], 0.5 * z[1], 0.0, 0.0, 1.0])]
        w = z[1] + z[2]
        return [np.array([z[0], w, -w, z[3], 0.0])]

    sys = SystemDef(
        delta=p.delta,
        state_dim=5,
        input_dim=1,
        flow_map=flow,
        jump_map=jump,
        flow_set=in_c,
        jump_set=in_d,
        dist_w=lambda z: float(math.sqrt(z[0] ** 2 + z[1] ** 2 + z[2] ** 2)),
        name="example1",
    )
    spec = CertificateSpec(
        variant="PropD",
        V_state=example1_lyapunov,
        lower_bound=lambda z: float(z[0] ** 2),
        upper_bound=lambda z: float(z[0] ** 2 + 2.2 * (z[1] + z[2]) ** 2),
        flow_bound=lambda z: float(-(z[0] ** 2) - z[1] ** 2),
        gamma1=ComparisonFunction.linear(0.5, "K"),
        gamma2=ComparisonFunction.power(2.0, 1.0, "Kinf"),
        persistence=PersistenceSpec(ComparisonFunction.linear(0.5), N=2.0, target="jump"),
    )
    assumptions = example1_assumptions(p)
    spec.notes.extend(assumptions.notes)
    return sys, spec


def _random_profile(rng: np.random.Generator, n_terms: int = 3):
    amp = rng.uniform(-1, 1, n_terms)
    freq = rng.uniform(0.5, 40.0, n_terms)
    phase = rng.uniform(0, 2 * math.pi, n_terms)
    bias = rng.uniform(-1, 1)
    f = lambda s: bias + np.sum(amp * np.sin(freq * s + phase))  # noqa: E731
    df = lambda s: np.sum(amp * freq * np.cos(freq * s + phase))  # noqa: E731
    return f, df


def example1_initial_arc(p: Example1Params, seed: int, step: float = 2e-3) -> HybridArc:
    """A random smooth initial memory arc on ``[-delta, 0]`` with ``sup |(x, e, s)| <= 1``.

    Timer and logic are constant; the logic mode and timer value are drawn so the
    arc starts in the flow set.
    """
    rng = np.random.default_rng(seed)
    comps = [_random_profile(rng) for _ in range(3)]
    l0 = int(rng.integers(2))
    tau0 = float(rng.uniform(0.0, p.tau_mati if l0 == 0 else p.tau_mad))
    n = int(math.ceil(p.delta / step))
    ts = np.linspace(-p.delta, 0.0, n + 1)
    X = np.zeros((len(ts), 5))
    dX = np.zeros((len(ts), 5))
    for c, (f, df) in enumerate(comps):
        X[:, c] = [f(s) for s in ts]
        dX[:, c] = [df(s) for s in ts]
    peak = float(np.max(np.linalg.norm(X[:, :3], axis=1)))
    scale = float(rng.uniform(0.1, 1.0)) / peak
    X[:, :3] *= scale
    dX[:, :3] *= scale
    X[:, 3] = tau0
    X[:, 4] = l0
    return HybridArc([ArcSegment.from_arrays(0, ts, X, dX)])


# ---------------------------------------------------------------------------
# Example 2: impulsive switched delay systems


def _mat(a, rows: int | None = None) -> np.ndarray:
    m = np.atleast_2d(np.asarray(a, dtype=float))
    if rows is not None and m.shape[0] != rows:
        raise DimensionMismatch(f"matrix has {m.shape[0]} rows, expected {rows}")
    return m


@dataclass
class Example2Params:
    """Per-mode matrices ``A, B, C, D`` (lists indexed by mode), delay ``r``, impulse period ``delta``,
    functional weights ``sigma``, ``mu`` and ``eta``, and the trigger scale ``varpi``."""

    A: list
    B: list
    C: list
    D: list
    r: float = 0.1
    period: float = 1.0
    sigma: list | None = None
    mu: list | None = None
    eta: float = 0.0
    varpi: float = 1.0

    def __post_init__(self):
        self.A = [_mat(a) for a in self.A]
        n = self.A[0].shape[0]
        self.B = [_mat(b, n) for b in self.B]
        self.C = [_mat(c, n) for c in self.C]
        self.D = [_mat(d, n) for d in self.D]
        modes = len(self.A)
        if not (len(self.B) == len(self.C) == len(self.D) == modes):
            raise DimensionMismatch("A, B, C, D must list the same number of modes")
        m = self.C[0].shape[1]
        for k in range(modes):
            if self.A[k].shape != (n, n) or self.B[k].shape != (n, n) or self.D[k].shape != (n, n):
                raise DimensionMismatch(f"mode {k}: A, B, D must be {n}x{n}")
            if self.C[k].shape != (n, m):
                raise DimensionMismatch(f"mode {k}: C must be {n}x{m}")
        self.sigma = [1.0] * modes if self.sigma is None else [float(s) for s in self.sigma]
        self.mu = [1.0] * modes if self.mu is None else [float(s) for s in self.mu]
        if len(self.sigma) != modes or len(self.mu) != modes:
            raise DimensionMismatch("sigma and mu need one entry per mode")
        if self.period <= 0 or self.r <= 0:
            raise ParamError("period and r must be positive")
        if min(self.sigma) <= 0 or min(self.mu) <= 0 or self.eta < 0 or self.varpi <= 0:
            raise ParamError("sigma, mu, varpi must be positive and eta non-negative")

    @classmethod
    def scalar(cls, A, B, C, D, **kw) -> "Example2Params":
        return cls([[[A]]], [[[B]]], [[[C]]], [[[D]]], **kw)

    @property
    def n(self) -> int:
        return self.A[0].shape[0]

    @property
    def m(self) -> int:
        return self.C[0].shape[1]

    @property
    def modes(self) -> int:
        return len(self.A)

    @property
    def delta(self) -> float:
        """Memory size covering the delay plus every impulse inside it."""
        return self.r + self.r / self.period + 1.0

    def to_dict(self) -> dict:
        return {
            "A": [a.tolist() for a in self.A],
            "B": [b.tolist() for b in self.B],
            "C": [c.tolist() for c in self.C],
            "D": [d.tolist() for d in self.D],
            "r": self.r,
            "period": self.period,
            "sigma": list(self.sigma),
            "mu": list(self.mu),
            "eta": self.eta,
            "varpi": self.varpi,
        }


def lam_max(M: np.ndarray) -> float:
    """Largest eigenvalue of the symmetric part (square) or largest singular value (non-square)."""
    M = np.atleast_2d(M)
    if M.shape[0] != M.shape[1]:
        return float(np.linalg.svd(M, compute_uv=False)[0])
    return float(np.linalg.eigvalsh(0.5 * (M + M.T))[-1])


def build_example2(p: Example2Params) -> SystemDef:
    """State ``(x, mode, tau)``; flow for ``tau in [0, period]``, jump at ``tau = period``."""
    n, m, r, T = p.n, p.m, p.r, p.period
    A, B, C, D = p.A, p.B, p.C, p.D
    modes = p.modes

    def mode_of(z) -> int:
        return min(max(int(round(z[n])), 0), modes - 1)

    def flow(phi: MemoryArc, u):
        z = phi.head()
        k = mode_of(z)
        xd = phi.delayed(r)[:n]
        dx = A[k] @ z[:n] + B[k] @ xd + C[k] @ np.asarray(u, dtype=float)
        return [np.concatenate([dx, [0.0, 1.0]])]

    def jump(phi: MemoryArc, u):
        z = phi.head()
        xn = D[mode_of(z)] @ z[:n]
        return [np.concatenate([xn, [float(q), 0.0]]) for q in range(modes)]

    def in_c(phi: MemoryArc, u) -> bool:
        tau = phi.head()[n + 1]
        return -PRED_TOL <= tau <= T + 1e-7

    def in_d(phi: MemoryArc, u) -> bool:
        return abs(phi.head()[n + 1] - T) <= 1e-7

    return SystemDef(
        delta=p.delta,
        state_dim=n + 2,
        input_dim=m,
        flow_map=flow,
        jump_map=jump,
        flow_set=in_c,
        jump_set=in_d,
        dist_w=lambda z: float(np.linalg.norm(z[:n])),
        name="example2",
    )


def example2_functional(p: Example2Params) -> Callable[[MemoryArc], float]:
    """``sigma_p |x(0,0)|^2 + mu_p * integral over [-r, 0] of exp(-eta tau) |x|^2`` (trapezoid rule)."""
    n, r, eta = p.n, p.r, p.eta
    modes = p.modes

    def V(phi: MemoryArc) -> float:
        z = phi.head()
        k = min(max(int(round(z[n])), 0), modes - 1)
        s, X = phi.time_profile(r, keep_jumps=True)
        w = np.einsum("ij,ij->i", X[:, :n], X[:, :n])
        if eta:
            w = w * np.exp(-eta * X[:, n + 1])
        integral = float(np.sum(0.5 * (w[1:] + w[:-1]) * np.diff(s))) if len(s) > 1 else 0.0
        return float(p.sigma[k] * (z[:n] @ z[:n]) + p.mu[k] * integral)

    return V


def example2_initial_arc(p: Example2Params, x0: Sequence[float], mode: int = 0, step: float | None = None) -> HybridArc:
    """Constant history ``x0`` on ``[-delta, 0]`` with the timer at 0."""
    z = np.concatenate([np.asarray(x0, dtype=float).reshape(p.n), [float(mode), 0.0]])
    return HybridArc.constant(z, -p.delta, 0.0, step=step)


@dataclass
class Example2Classification:
    Lambda: list[float]
    Omega: list[float]
    lam_D2: list[float]
    case: str
    lambda_bar: float | None = None
    lambda_bar_modes: list[float | None] = field(default_factory=list)
    predicates: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "Lambda": self.Lambda,
            "Omega": self.Omega,
            "lam_D2": self.lam_D2,
            "case": self.case,
            "lambda_bar": self.lambda_bar,
            "lambda_bar_modes": self.lambda_bar_modes,
            "predicates": self.predicates,
        }


def _case3_root(Lam: float, Om: float, width: float) -> float | None:
    """Smallest positive root of ``-l + Lam + Om * exp(l * width)``, if one exists."""
    g = lambda l: l - Lam - Om * math.exp(l * width)  # noqa: E731  increasing up to its peak
    if Om == 0:
        return Lam
    peak = math.log(1.0 / (Om * width)) / width if Om * width < 1 else 0.0
    if peak <= 0 or g(peak) < 0:
        return None
    return bisect_root(g, 0.0, peak)


def classify_example2(p: Example2Params, eps_trigger: float | None = None) -> Example2Classification:
    """Per-mode ``Lambda_p``, ``Omega_p`` and ``lam_max(D^T D)``, and which of the three cases holds for all modes."""
    e = p.r if eps_trigger is None else eps_trigger
    Lam, Om, D2 = [], [], []
    for k in range(p.modes):
        s, mu = p.sigma[k], p.mu[k]
        Lam.append(2 * s * lam_max(p.A[k]) + mu + s * lam_max(p.B[k]) + s * lam_max(p.C[k]))
        Om.append(s * lam_max(p.B[k]) - mu * math.exp(-p.eta * e))
        D2.append(float(np.linalg.eigvalsh(p.D[k].T @ p.D[k])[-1]))
    c1 = all(L < 1.0 / p.varpi and O < 0 and d < 1 for L, O, d in zip(Lam, Om, D2))
    c2 = all(-L > O >= 0 and d > 1 for L, O, d in zip(Lam, Om, D2))
    c3 = all(L > 0 and O >= 0 and d < 1 for L, O, d in zip(Lam, Om, D2))
    case = "Case1" if c1 else "Case2" if c2 else "Case3" if c3 else "Unclassified"
    width = p.delta + 1.0
    roots: list[float | None] = []
    if case == "Case2":
        for L, O in zip(Lam, Om):
            roots.append(bisect_root(lambda l: l + L + O * math.exp(l * width), 0.0, -L))
    elif case == "Case3":
        roots = [_case3_root(L, O, width) for L, O in zip(Lam, Om)]
    found = [x for x in roots if x is not None]
    return Example2Classification(
        Lam, Om, D2, case, max(found) if found else None, roots, {"Case1": c1, "Case2": c2, "Case3": c3}
    )


def classification_report(p: Example2Params, expected: str) -> CheckReport:
    """A report that fails (one row per broken predicate) unless ``expected`` holds for every mode."""
    cl = classify_example2(p)
    rep = CheckReport(variant=f"example2-classification:{expected}")
    rep.notes.append(f"classified as {cl.case}")
    for k, (L, O, d) in enumerate(zip(cl.Lambda, cl.Omega, cl.lam_D2)):
        if expected == "Case1":
            rep.require(L < 1.0 / p.varpi, "Lambda-below-1/varpi", L, 1.0 / p.varpi, j=k)
            rep.require(O < 0, "Omega-negative", O, 0.0, j=k)
            rep.require(d < 1, "jump-gain-below-1", d, 1.0, j=k)
        elif expected == "Case2":
            rep.require(-L > O, "flow-dominates", O, -L, j=k)
            rep.require(O >= 0, "Omega-nonnegative", 0.0, O, j=k)
            rep.require(d > 1, "jump-gain-above-1", 1.0, d, j=k)
        elif expected == "Case3":
            rep.require(L > 0, "Lambda-positive", 0.0, L, j=k)
            rep.require(O >= 0, "Omega-nonnegative", 0.0, O, j=k)
            rep.require(d < 1, "jump-gain-below-1", d, 1.0, j=k)
        else:
            raise ParamError(f"unknown case {expected!r}")
    return rep


# shipped scalar instances, one per case
CASE_PARAMS = {
    1: dict(A=-3.0, B=0.5, C=1.0, D=0.5, sigma=[1.0], mu=[1.0], eta=0.0, r=0.1, period=1.0),
    2: dict(A=-1.0, B=0.01, C=0.0, D=1.5, sigma=[1.0], mu=[0.01], eta=0.0, r=0.1, period=1.0),
    3: dict(A=1.0, B=1.0, C=0.0, D=0.5, sigma=[1.0], mu=[1.0], eta=0.0, r=0.1, period=0.1),
}


def example2_params(case: int, **overrides) -> Example2Params:
    if case not in CASE_PARAMS:
        raise ParamError(f"case must be 1, 2 or 3, got {case}")
    kw = {**CASE_PARAMS[case], **overrides}
    return Example2Params.scalar(kw.pop("A"), kw.pop("B"), kw.pop("C"), kw.pop("D"), **kw)


def example2_certificate(p: Example2Params, case: int, lam: float | None = None) -> CertificateSpec:
    """Functional certificate for a scalar-style instance of the given case.

    Case 1 uses the strict-decrease variant, Case 2 the stable-flow dwell
    variant and Case 3 the stable-jump dwell variant. Rates are derived from
    the flow bound of the functional for the shipped instances.
    """
    V = example2_functional(p)
    s_min = min(p.sigma)
    s_max = max(s + m * p.r for s, m in zip(p.sigma, p.mu))
    a1 = ComparisonFunction.power(2.0, s_min)
    a2 = ComparisonFunction.power(2.0, s_max)
    c_gain = max(s * lam_max(c) for s, c in zip(p.sigma, p.C))
    rho = ComparisonFunction.power(2.0, max(p.varpi * c_gain, 1.0))
    cl = classify_example2(p)
    if case == 1:
        return CertificateSpec("ThmG", V_func=V, alpha1=a1, alpha2=a2, alpha3=ComparisonFunction.power(2.0, 0.5, "PD"), rho=rho)
    if case == 2:
        # dV <= Lambda |x|^2 <= -|Lambda| V + |Lambda| max(mu) r * sup |x|^2 over the delay window
        lam1 = -max(cl.Lambda)
        lam2 = 0.01
        mu_j = max(cl.lam_D2)
        return CertificateSpec(
            "ThmH", V_func=V, alpha1=a1, alpha2=a2, rho=rho, lam1=lam1, lam2=lam2, mu=mu_j, eps=p.period, N0=1,
            lam=lam,
        )
    if case == 3:
        return CertificateSpec(
            "ThmI", V_func=V, alpha1=a1, alpha2=a2, rho=rho, lam1=max(cl.Lambda), lam2=0.0, mu=0.5, eps=p.period, N0=1,
            lam=lam,
        )
    raise ParamError(f"case must be 1, 2 or 3, got {case}")


def case1_iss_bound(r0: float, t: float, j: int) -> float:
    """Decay part of the envelope used for the Case 1 instance."""
    return 1.1 * r0 * math.exp(-t - 0.5 * j)


# ---------------------------------------------------------------------------
# presets


@dataclass
class Preset:
    """Everything needed to simulate and verify one shipped scenario."""

    name: str
    system: SystemDef
    certificate: CertificateSpec
    initial: HybridArc
    input: InputSignal
    config: SimConfig
    extra_checks: Callable[[Solution, bool], list[CheckReport]] | None = None
    description: str = ""

    def extra(self, sol: Solution, trace: bool = False) -> list[CheckReport]:
        return [] if self.extra_checks is None else self.extra_checks(sol, trace)


def _example2_extras(p: Example2Params, case: int, spec: CertificateSpec, expected: str | None = None):
    def run(sol: Solution, trace: bool = False) -> list[CheckReport]:
        out = [classification_report(p, expected or f"Case{case}")]
        if case == 1:
            out.append(check_iss_envelope(sol, case1_iss_bound, lambda v: v, trace=trace))
        elif case == 2:
            out.append(check_stable_flow_envelope(sol, spec.V_func, spec.mu, spec.lam, spec.alpha2, trace=trace))
        else:
            lam = stable_jump_rate(spec.lam1, spec.lam2, spec.mu, spec.N0, p.delta)
            out.append(check_stable_jump_envelope(sol, spec.V_func, spec.mu, lam, spec.alpha2, trace=trace))
        return out

    return run


_EX2_HORIZON = {1: (5.0, 100), 2: (10.0, 10), 3: (2.0, 1000)}


def example2_preset(case: int, seed: int = 0, x0: float = 1.0, input_level: float = 0.0, **overrides) -> Preset:
    p = example2_params(case, **overrides)
    spec = example2_certificate(p, case, lam=1.2 if case == 2 else None)
    u = InputSignal.zero(p.m) if input_level == 0 else InputSignal.constant([input_level] * p.m)
    return Preset(
        name=f"example2-case{case}",
        system=build_example2(p),
        certificate=spec,
        initial=example2_initial_arc(p, [x0] * p.n),
        input=u,
        config=SimConfig(h=1e-3, horizon=_EX2_HORIZON[case], seed=seed),
        extra_checks=_example2_extras(p, case, spec),
        description=f"scalar impulsive delay system, case {case}",
    )


def example1_preset(seed: int = 0, horizon: float = 0.5, **overrides) -> Preset:
    p = Example1Params(**overrides)
    sys, spec = build_example1(p)
    return Preset(
        name="example1",
        system=sys,
        certificate=spec,
        initial=example1_initial_arc(p, seed),
        input=InputSignal.zero(1),
        config=SimConfig(h=1e-3, horizon=(horizon, 1000), priority="flow-first", seed=seed),
        extra_checks=lambda sol, trace=False: [example1_assumptions(p)],
        description="networked control loop with a delayed plant, random smooth initial arc",
    )


def _sabotaged(seed: int = 0, **overrides) -> Preset:
    overrides = {"mu": [0.1], **overrides}
    pre = example2_preset(1, seed=seed, **overrides)
    p = example2_params(1, **{k: v for k, v in overrides.items() if k in CASE_PARAMS[1] or k == "varpi"})
    pre.name = "example2-case1-sabotaged"
    pre.extra_checks = _example2_extras(p, 1, pre.certificate, expected="Case1")
    pre.description = "case 1 instance with the delay weight too small for a negative Omega"
    return pre


def _vacuous(seed: int = 0, **overrides) -> Preset:
    pre = example2_preset(1, seed=seed, input_level=100.0, **overrides)
    pre.name = "vacuous-demo"
    pre.extra_checks = None
    pre.description = "input so large that the decrease trigger never fires"
    return pre


def _zeno(seed: int = 0) -> Preset:
    sys = SystemDef(
        delta=1.0,
        state_dim=1,
        input_dim=1,
        flow_map=lambda phi, u: [np.zeros(1)],
        jump_map=lambda phi, u: [phi.head().copy()],
        flow_set=lambda phi, u: True,
        jump_set=lambda phi, u: True,
        name="zeno-demo",
    )
    sq = ComparisonFunction.power(2.0)
    spec = CertificateSpec(
        "ThmA",
        V_state=lambda z: float(z @ z),
        alpha1=sq,
        alpha2=sq,
        alpha3=ComparisonFunction.linear(1.0),
        rho=ComparisonFunction.linear(0.5),
        gamma1=ComparisonFunction.linear(0.5),
        gamma2=sq,
    )
    return Preset(
        name="zeno-demo",
        system=sys,
        certificate=spec,
        initial=HybridArc.constant([1.0], -1.0, 0.0, step=0.1),
        input=InputSignal.zero(1),
        config=SimConfig(h=1e-2, horizon=(1.0, 10_000), seed=seed, zeno_guard=50),
        description="jump set everywhere with identity jumps",
    )


PRESETS: dict[str, Callable[..., Preset]] = {
    "example1": example1_preset,
    "example2-case1": lambda seed=0, **kw: example2_preset(1, seed=seed, **kw),
    "example2-case2": lambda seed=0, **kw: example2_preset(2, seed=seed, **kw),
    "example2-case3": lambda seed=0, **kw: example2_preset(3, seed=seed, **kw),
    "example2-case1-sabotaged": _sabotaged,
    "vacuous-demo": _vacuous,
    "zeno-demo": _zeno,
}


def get_preset(name: str, seed: int = 0, **params) -> Preset:
    if name not in PRESETS:
        raise ParamError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    try:
        return PRESETS[name](seed=seed, **params)
    except TypeError as exc:
        raise ParamError(f"bad parameters for preset {name!r}: {exc}") from None
