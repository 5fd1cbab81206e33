"""Fractional action-like variational dynamics.

A classical Lagrangian ``L(q, v) = v.M.v / 2 - V(q)`` is integrated against the
Riemann-Liouville weight ``(t - tau)**(alpha - 1) / Gamma(alpha)`` over observer
time ``tau`` in ``[a, t - epsilon]``. Stationarity of that action gives

    dL/dq - d/dtau dL/dv + (alpha - 1)/(t - tau) * dL/dv = 0,

i.e. ``M q'' = -grad V(q) + (alpha - 1)/(t - tau) * M q'``, a friction term
whose coefficient diverges at the horizon ``t``; ``epsilon`` keeps the
integration domain away from it.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import specfun
from .fracops import _fd_weights, product_trapezoid_weights

__all__ = [
    "FalvaError",
    "SingularCoefficientError",
    "StepSizeError",
    "NumericalFailure",
    "LagrangianModel",
    "FalvaProblem",
    "Trajectory",
    "harmonic_oscillator",
    "free_particle",
    "gaussian_well",
    "friction_coefficient",
    "falva_action",
    "el_residual",
    "el_residuals",
    "rayleigh_dissipation",
    "rayleigh_residual_equivalence",
    "simulate",
    "classical_reference",
    "sine_bump",
    "stationarity_check",
    "loglog_slope",
]


class FalvaError(ValueError):
    pass


class SingularCoefficientError(FalvaError):
    """Evaluation requested inside the standoff where (alpha-1)/(t-tau) blows up."""


class StepSizeError(FalvaError):
    pass


class NumericalFailure(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class LagrangianModel:
    """Quadratic kinetic energy with mass matrix ``mass`` and potential ``V``.

    Construction verifies that ``mass`` is symmetric positive definite and that
    ``potential_gradient`` matches central differences of ``potential``.
    """

    mass: np.ndarray
    potential: Callable[[np.ndarray], float]
    potential_gradient: Callable[[np.ndarray], np.ndarray]
    name: str = "custom"
    _inv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        M = np.atleast_2d(np.array(self.mass, dtype=float))
        if M.shape[0] != M.shape[1]:
            raise FalvaError(f"mass matrix must be square, got shape {M.shape}")
        if not np.allclose(M, M.T, rtol=1e-12, atol=0.0):
            raise FalvaError("mass matrix must be symmetric")
        try:
            chol = np.linalg.cholesky(M)
        except np.linalg.LinAlgError:
            raise FalvaError("mass matrix must be positive definite") from None
        M.flags.writeable = False
        object.__setattr__(self, "mass", M)
        inv = np.linalg.solve(chol.T, np.linalg.solve(chol, np.eye(M.shape[0])))
        object.__setattr__(self, "_inv", inv)
        self._check_gradient()

    @property
    def dim(self) -> int:
        return self.mass.shape[0]

    def _check_gradient(self, n_probe: int = 5, step: float = 1e-5):
        rng = np.random.default_rng(12345)
        for q in rng.uniform(-1.5, 1.5, size=(n_probe, self.dim)):
            g = np.asarray(self.potential_gradient(q), dtype=float)
            fd = np.empty(self.dim)
            for i in range(self.dim):
                e = np.zeros(self.dim)
                e[i] = step
                fd[i] = (self.potential(q + e) - self.potential(q - e)) / (2 * step)
            if g.shape != (self.dim,) or np.max(np.abs(g - fd)) > 1e-6 * (1 + np.max(np.abs(g))):
                raise FalvaError(f"potential_gradient disagrees with finite differences at q={q}")

    def lagrangian(self, q: np.ndarray, v: np.ndarray) -> float:
        return 0.5 * float(v @ self.mass @ v) - float(self.potential(q))

    def dL_dq(self, q: np.ndarray) -> np.ndarray:
        return -np.asarray(self.potential_gradient(q), dtype=float)

    def dL_dv(self, v: np.ndarray) -> np.ndarray:
        return self.mass @ v

    def solve_mass(self, rhs: np.ndarray) -> np.ndarray:
        return self._inv @ rhs


def harmonic_oscillator(omega: float = 1.0, dim: int = 1) -> LagrangianModel:
    w2 = float(omega) ** 2
    return LagrangianModel(
        np.eye(dim),
        lambda q: 0.5 * w2 * float(q @ q),
        lambda q: w2 * np.asarray(q, dtype=float),
        name=f"oscillator:{omega:g}",
    )


def free_particle(dim: int = 1) -> LagrangianModel:
    return LagrangianModel(np.eye(dim), lambda q: 0.0, lambda q: np.zeros(dim), name="freeparticle")


def gaussian_well(depth: float = 1.0, dim: int = 1) -> LagrangianModel:
    """V(q) = -depth * exp(-|q|^2 / 2)."""
    k = float(depth)
    return LagrangianModel(
        np.eye(dim),
        lambda q: -k * math.exp(-0.5 * float(q @ q)),
        lambda q: k * math.exp(-0.5 * float(q @ q)) * np.asarray(q, dtype=float),
        name=f"well:{depth:g}",
    )


@dataclass(frozen=True, eq=False)
class FalvaProblem:
    """Initial-value problem for the fractional action on ``[a, t - epsilon]``.

    ``epsilon`` defaults to ``1e-3 * (t - a)`` for alpha < 1 and to 0 for
    alpha = 1, where the friction coefficient vanishes identically.
    """

    model: LagrangianModel
    alpha: float
    a: float
    t: float
    q0: np.ndarray
    v0: np.ndarray
    epsilon: float | None = None
    steps: int = 1024

    def __post_init__(self):
        alpha, a, t = float(self.alpha), float(self.a), float(self.t)
        if not (0.0 < alpha <= 1.0):
            raise FalvaError(f"alpha must lie in (0,1], got {alpha:g}")
        if not (math.isfinite(a) and math.isfinite(t) and t > a):
            raise FalvaError(f"horizon must satisfy a < t, got [{a:g}, {t:g}]")
        eps = self.epsilon
        if eps is None:
            eps = 1e-3 * (t - a) if alpha < 1 else 0.0
        eps = float(eps)
        if eps < 0 or (alpha < 1 and eps <= 0):
            raise FalvaError(f"epsilon must be > 0 for alpha < 1, got {eps:g}")
        if eps >= (t - a) / 10:
            raise FalvaError(f"epsilon must be below (t-a)/10 = {(t - a) / 10:g}, got {eps:g}")
        q0 = np.atleast_1d(np.array(self.q0, dtype=float))
        v0 = np.atleast_1d(np.array(self.v0, dtype=float))
        dim = self.model.dim
        if q0.shape != (dim,) or v0.shape != (dim,):
            raise FalvaError(f"q0 and v0 must have length {dim}")
        if int(self.steps) != self.steps or self.steps < 16:
            raise FalvaError(f"steps must be an integer >= 16, got {self.steps}")
        for name, val in (("alpha", alpha), ("a", a), ("t", t), ("epsilon", eps), ("q0", q0), ("v0", v0), ("steps", int(self.steps))):
            object.__setattr__(self, name, val)

    @property
    def end(self) -> float:
        return self.t - self.epsilon

    @property
    def dt(self) -> float:
        return (self.end - self.a) / self.steps


@dataclass(frozen=True, eq=False)
class Trajectory:
    taus: np.ndarray
    qs: np.ndarray
    vs: np.ndarray

    def __post_init__(self):
        taus = np.asarray(self.taus, dtype=float)
        qs = np.asarray(self.qs, dtype=float)
        vs = np.asarray(self.vs, dtype=float)
        if qs.ndim == 1:
            qs = qs[:, None]
        if vs.ndim == 1:
            vs = vs[:, None]
        if not (taus.ndim == 1 and qs.shape[0] == taus.size == vs.shape[0] and qs.shape == vs.shape):
            raise FalvaError("trajectory arrays must have matching lengths")
        if taus.size < 2 or np.any(np.diff(taus) <= 0):
            raise FalvaError("trajectory times must be strictly increasing")
        object.__setattr__(self, "taus", taus)
        object.__setattr__(self, "qs", qs)
        object.__setattr__(self, "vs", vs)

    @property
    def dim(self) -> int:
        return self.qs.shape[1]

    def __add__(self, other: "Trajectory") -> "Trajectory":
        if not np.array_equal(self.taus, other.taus):
            raise FalvaError("trajectories must share their time grid")
        return Trajectory(self.taus, self.qs + other.qs, self.vs + other.vs)

    def scaled(self, s: float) -> "Trajectory":
        return Trajectory(self.taus, s * self.qs, s * self.vs)

    def to_csv(self, action: float | None = None) -> str:
        d = self.dim
        buf = io.StringIO()
        header = ["tau"] + [f"q_{i + 1}" for i in range(d)] + [f"v_{i + 1}" for i in range(d)]
        buf.write(",".join(header) + "\n")
        for tau, q, v in zip(self.taus, self.qs, self.vs):
            buf.write(",".join(f"{x:.17g}" for x in (tau, *q, *v)) + "\n")
        if action is not None:
            buf.write(f"# action={action:.17g}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Trajectory":
        rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
        header = rows[0]
        d = (len(header) - 1) // 2
        if header[0] != "tau" or len(header) != 2 * d + 1 or d < 1:
            raise FalvaError("trajectory CSV header must be tau,q_1..q_n,v_1..v_n")
        data = np.array([[float(c) for c in r] for r in rows[1:]], dtype=float)
        return cls(data[:, 0], data[:, 1 : d + 1], data[:, d + 1 :])


def friction_coefficient(problem: FalvaProblem, tau):
    """(alpha - 1)/(t - tau)."""
    return (problem.alpha - 1.0) / (problem.t - np.asarray(tau, dtype=float))


def _check_path(problem: FalvaProblem, path: Trajectory):
    span = problem.end - problem.a
    if abs(path.taus[0] - problem.a) > 1e-9 * span or abs(path.taus[-1] - problem.end) > 1e-9 * span:
        raise FalvaError(
            f"path must span [{problem.a:g}, {problem.end:g}], got [{path.taus[0]:g}, {path.taus[-1]:g}]"
        )
    if path.dim != problem.model.dim:
        raise FalvaError("path dimension does not match the model")


def falva_action(problem: FalvaProblem, path: Trajectory) -> float:
    """(1/Gamma(alpha)) * integral_a^{t-eps} L(q, v) (t - tau)^(alpha-1) dtau.

    The kernel is integrated exactly against the piecewise-linear interpolant of
    the nodal Lagrangian values; for alpha = 1 this is the trapezoid rule.
    """
    _check_path(problem, path)
    model = problem.model
    lag = np.array([model.lagrangian(q, v) for q, v in zip(path.qs, path.vs)])
    w = product_trapezoid_weights(problem.t - path.taus, problem.alpha)
    return float(w @ lag) / specfun.gamma(problem.alpha)


def _path_derivatives(path: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """First and second tau-derivatives of q from fourth-order differences on a uniform grid."""
    taus, q = path.taus, path.qs
    n = taus.size
    if n < 7:
        raise FalvaError("need at least 7 trajectory points to differentiate")
    h = (taus[-1] - taus[0]) / (n - 1)
    if np.max(np.abs(np.diff(taus) - h)) > 1e-6 * h:
        raise FalvaError("trajectory must be uniformly sampled to differentiate")
    d1 = np.empty_like(q)
    d2 = np.empty_like(q)
    d1[2:-2] = (q[:-4] - 8 * q[1:-3] + 8 * q[3:-1] - q[4:]) / (12 * h)
    d2[2:-2] = (-q[:-4] + 16 * q[1:-3] - 30 * q[2:-2] + 16 * q[3:-1] - q[4:]) / (12 * h**2)
    # rows near the ends use shifted one-sided stencils of the same order;
    # the right end is the left end of the reversed path, with d/dtau flipped
    for i, shift in ((0, 0), (1, -1)):
        w1 = _fd_weights(range(shift, shift + 5), 1)
        w2 = _fd_weights(range(shift, shift + 6), 2)
        lo, rev = q[i + shift :], q[::-1][i + shift :]
        d1[i], d1[n - 1 - i] = w1 @ lo[:5] / h, -(w1 @ rev[:5]) / h
        d2[i], d2[n - 1 - i] = w2 @ lo[:6] / h**2, w2 @ rev[:6] / h**2
    return d1, d2


def _residual_terms(problem: FalvaProblem, q, v, acc, tau):
    model = problem.model
    c = float(friction_coefficient(problem, tau))
    p = model.dL_dv(v)
    return model.dL_dq(q), model.mass @ acc, c * p


def _interp_rows(taus, arr, tau):
    return np.array([np.interp(tau, taus, arr[:, i]) for i in range(arr.shape[1])])


def _check_tau(problem: FalvaProblem, path: Trajectory, tau: float) -> float:
    tau = float(tau)
    if problem.t - tau < problem.epsilon or tau >= problem.t:
        raise SingularCoefficientError(
            f"tau={tau:g} lies within epsilon={problem.epsilon:g} of the horizon t={problem.t:g}"
        )
    if not (path.taus[0] < tau < path.taus[-1]) and not (problem.epsilon > 0 and tau == path.taus[-1]):
        raise FalvaError(f"tau={tau:g} is not inside the path interval")
    return tau


def el_residual(problem: FalvaProblem, path: Trajectory, tau: float) -> np.ndarray:
    """dL/dq - d/dtau(dL/dv) + (alpha-1)/(t-tau) dL/dv at ``tau``.

    Velocity and acceleration come from finite differences of ``path.qs``
    (not from ``path.vs``), so the check is independent of the integrator.
    """
    tau = _check_tau(problem, path, tau)
    d1, d2 = _path_derivatives(path)
    q = _interp_rows(path.taus, path.qs, tau)
    v = _interp_rows(path.taus, d1, tau)
    acc = _interp_rows(path.taus, d2, tau)
    force, inertia, friction = _residual_terms(problem, q, v, acc, tau)
    return force - inertia + friction


def el_residuals(problem: FalvaProblem, path: Trajectory) -> np.ndarray:
    """Residual vectors at every interior node of ``path``, shape (n_nodes - 2, dim)."""
    d1, d2 = _path_derivatives(path)
    out = []
    for i in range(1, path.taus.size - 1):
        force, inertia, friction = _residual_terms(problem, path.qs[i], d1[i], d2[i], path.taus[i])
        out.append(force - inertia + friction)
    return np.array(out)


def rayleigh_dissipation(problem: FalvaProblem, v, tau):
    """Rayleigh function F(v, tau) = (alpha-1)/(t-tau) * v.M.v / 2, reproducing the friction sector."""
    c = (problem.alpha - 1.0) / (problem.t - tau)
    v = np.asarray(v)
    return 0.5 * c * (v @ problem.model.mass @ v)


def _complex_step_grad(fun, v: np.ndarray, step: float = 1e-30) -> np.ndarray:
    g = np.empty(v.size)
    for i in range(v.size):
        z = v.astype(complex)
        z[i] += 1j * step
        g[i] = np.imag(fun(z)) / step
    return g


def rayleigh_residual_equivalence(problem: FalvaProblem, path: Trajectory, tau: float) -> float:
    """Max-norm gap between the fractional residual and the Rayleigh form dL/dq - d/dtau dL/dv + dF/dv.

    dF/dv is taken by complex-step differentiation of the scalar Rayleigh
    function, so the two sides are assembled independently.
    """
    tau = _check_tau(problem, path, tau)
    d1, d2 = _path_derivatives(path)
    q = _interp_rows(path.taus, path.qs, tau)
    v = _interp_rows(path.taus, d1, tau)
    acc = _interp_rows(path.taus, d2, tau)
    force, inertia, _ = _residual_terms(problem, q, v, acc, tau)
    dF = _complex_step_grad(lambda z: rayleigh_dissipation(problem, z, tau), v)
    rayleigh = force - inertia + dF
    return float(np.max(np.abs(rayleigh - el_residual(problem, path, tau))))


def _rk4(rhs, y0: np.ndarray, taus: np.ndarray) -> np.ndarray:
    ys = np.empty((taus.size, y0.size))
    ys[0] = y0
    y = y0
    for i in range(taus.size - 1):
        tau, h = taus[i], taus[i + 1] - taus[i]
        k1 = rhs(tau, y)
        k2 = rhs(tau + h / 2, y + h / 2 * k1)
        k3 = rhs(tau + h / 2, y + h / 2 * k2)
        k4 = rhs(tau + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise NumericalFailure(f"state became non-finite at tau={taus[i + 1]:g}")
        ys[i + 1] = y
    return ys


def simulate(problem: FalvaProblem) -> Trajectory:
    """Integrate M q'' = -grad V + (alpha-1)/(t-tau) M q' from (q0, v0) with fixed-step RK4."""
    if problem.alpha < 1 and problem.dt >= problem.epsilon:
        raise StepSizeError(
            f"step {problem.dt:g} must be smaller than epsilon={problem.epsilon:g}; raise steps"
        )
    model, d = problem.model, problem.model.dim
    alpha, t = problem.alpha, problem.t

    def rhs(tau, y):
        q, v = y[:d], y[d:]
        acc = model.solve_mass(-np.asarray(model.potential_gradient(q), dtype=float))
        if alpha != 1.0:
            acc = acc + (alpha - 1.0) / (t - tau) * v
        return np.concatenate((v, acc))

    taus = problem.a + problem.dt * np.arange(problem.steps + 1)
    taus[-1] = problem.end
    ys = _rk4(rhs, np.concatenate((problem.q0, problem.v0)), taus)
    return Trajectory(taus, ys[:, :d], ys[:, d:])


def classical_reference(problem: FalvaProblem, taus: np.ndarray | None = None) -> Trajectory:
    """Tight-tolerance DOP853 solution of the classical (alpha = 1) equations on the same interval."""
    from scipy.integrate import solve_ivp

    model, d = problem.model, problem.model.dim

    def rhs(tau, y):
        return np.concatenate((y[d:], model.solve_mass(-np.asarray(model.potential_gradient(y[:d]), dtype=float))))

    if taus is None:
        taus = problem.a + problem.dt * np.arange(problem.steps + 1)
        taus[-1] = problem.end
    sol = solve_ivp(rhs, (taus[0], taus[-1]), np.concatenate((problem.q0, problem.v0)),
                    method="DOP853", t_eval=taus, rtol=1e-13, atol=1e-13)
    if not sol.success:
        raise NumericalFailure(sol.message)
    return Trajectory(taus, sol.y[:d].T, sol.y[d:].T)


def sine_bump(problem: FalvaProblem, path: Trajectory, modes: int = 1) -> Trajectory:
    """sin(modes * pi * (tau - a)/(end - a)) in every component, with its exact derivative."""
    span = problem.end - problem.a
    k = modes * math.pi / span
    s = np.sin(k * (path.taus - problem.a))
    ds = k * np.cos(k * (path.taus - problem.a))
    s[0] = 0.0
    s[-1] = 0.0
    ones = np.ones(path.dim)
    return Trajectory(path.taus, np.outer(s, ones), np.outer(ds, ones))


def stationarity_check(problem: FalvaProblem, path: Trajectory, bump: Trajectory, amplitudes: Sequence[float]) -> np.ndarray:
    """|S[path + s*bump] - S[path]| for each amplitude s; O(s^2) when ``path`` is stationary."""
    scale = max(1.0, float(np.max(np.abs(bump.qs))))
    if np.max(np.abs(bump.qs[0])) > 1e-12 * scale or np.max(np.abs(bump.qs[-1])) > 1e-12 * scale:
        raise FalvaError("bump must vanish at both ends of the path")
    base = falva_action(problem, path)
    return np.array([abs(falva_action(problem, path + bump.scaled(s)) - base) for s in amplitudes])


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log(ys) against log(xs)."""
    return float(np.polyfit(np.log(np.asarray(xs, dtype=float)), np.log(np.asarray(ys, dtype=float)), 1)[0])
