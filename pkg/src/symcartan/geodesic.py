"""Numeric checks: geodesics, conserved quantities, the spray, and the flow formula for Lˢ.

All integration is classical fixed-step RK4 on plain numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .connection import Connection, _vals, sym_lie, torsion_free_part
from .killing import sample_points
from .ring import Chart, ScalarField, generator_values
from .symtensor import SymField


def rk4(f: Callable[[float, np.ndarray], np.ndarray], y0: np.ndarray, h: float, steps: int,
        t0: float = 0.0, record: bool = True) -> list[np.ndarray]:
    y = np.array(y0, dtype=float)
    out = [y.copy()] if record else []
    t = t0
    for _ in range(steps):
        k1 = f(t, y)
        k2 = f(t + h / 2, y + h / 2 * k1)
        k3 = f(t + h / 2, y + h / 2 * k2)
        k4 = f(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
        if record:
            out.append(y.copy())
    return out if record else [y]


def _step_count(h: float, T: float) -> int:
    if h <= 0 or T < 0:
        raise ValueError("step must be positive and horizon nonnegative")
    steps = round(T / h)
    if abs(steps * h - T) > 1e-9 * max(1.0, T):
        raise ValueError(f"horizon {T} is not an integer multiple of the step {h}")
    return steps


class _Gamma:
    """Numeric evaluation of the Christoffel array at a point."""

    def __init__(self, nabla: Connection):
        self.chart = nabla.chart
        n = nabla.dim
        self.n = n
        self.entries = [(k, i, j, nabla.gamma[k][i][j]) for k in range(n) for i in range(n)
                        for j in range(n) if not nabla.gamma[k][i][j].is_zero]

    def __call__(self, x) -> np.ndarray:
        G = np.zeros((self.n, self.n, self.n))
        gens = generator_values(self.chart, x)
        for k, i, j, g in self.entries:
            G[k, i, j] = g.eval_generators(gens)
        return G


@dataclass
class GeodesicRun:
    chart: Chart
    start: tuple[float, ...]
    velocity: tuple[float, ...]
    h: float
    T: float
    positions: np.ndarray = field(repr=False)
    velocities: np.ndarray = field(repr=False)

    @property
    def steps(self) -> int:
        return len(self.positions) - 1

    def to_json(self) -> dict:
        return {"h": self.h, "T": self.T, "steps": self.steps, "start": list(self.start),
                "velocity": list(self.velocity), "end": self.positions[-1].tolist(),
                "end_velocity": self.velocities[-1].tolist()}

    def csv(self) -> str:
        n = self.chart.dim
        head = ["t"] + self.chart.names + [f"v_{c}" for c in self.chart.names]
        lines = [",".join(head)]
        for s in range(self.steps + 1):
            row = [s * self.h] + list(self.positions[s]) + list(self.velocities[s])
            lines.append(",".join(repr(float(x)) for x in row[:1 + 2 * n]))
        return "\n".join(lines) + "\n"


def integrate_geodesic(nabla: Connection, start: Sequence[float], velocity: Sequence[float],
                       h: float = 1e-3, T: float = 1.0) -> GeodesicRun:
    """RK4 for γ̈ᵏ + Γᵏᵢⱼγ̇ⁱγ̇ʲ = 0."""
    n = nabla.dim
    if len(start) != n or len(velocity) != n:
        raise ValueError("start and velocity must match the chart dimension")
    steps = _step_count(h, T)
    gamma = _Gamma(nabla)

    def f(_t, y):
        x, v = y[:n], y[n:]
        G = gamma(x)
        return np.concatenate([v, -np.einsum("kij,i,j->k", G, v, v)])

    traj = np.array(rk4(f, np.concatenate([start, velocity]).astype(float), h, steps))
    if not np.all(np.isfinite(traj)):
        raise ArithmeticError("geodesic left the evaluable region")
    return GeodesicRun(nabla.chart, tuple(map(float, start)), tuple(map(float, velocity)), h, T,
                       traj[:, :n], traj[:, n:])


def conserved_quantity(run: GeodesicRun, K: SymField) -> float:
    """max − min of K̃(γ̇(t)) along the run."""
    vals = [K.evaluate(generator_values(run.chart, x), v)
            for x, v in zip(run.positions, run.velocities)]
    return float(max(vals) - min(vals))


def spray_correspondence(nabla: Connection, phi: SymField, samples: int = 50, seed: int = 0,
                         step: float = 1e-6) -> float:
    """max |X_∇φ̃ − (∇ˢφ)~| with X_∇φ̃ by central differences along the spray."""
    n = nabla.dim
    gamma = _Gamma(nabla)
    dphi = nabla.sym_derivative(phi)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for point in sample_points(nabla.chart, samples, seed):
        if samples == 0:
            break
        samples -= 1
        x = np.array(point)
        v = rng.uniform(-1.0, 1.0, n)
        G = gamma(x)
        dv = -np.einsum("kij,i,j->k", G, v, v)

        def tilde(s):
            return phi.evaluate(generator_values(nabla.chart, x + s * v), v + s * dv)

        numeric = (tilde(step) - tilde(-step)) / (2 * step)
        exact = dphi.evaluate(generator_values(nabla.chart, x), v)
        worst = max(worst, abs(numeric - exact))
    return worst


def _component_array(phi: SymField, x) -> np.ndarray:
    n, r = phi.chart.dim, phi.degree
    gens = generator_values(phi.chart, x)
    A = np.zeros((n,) * r)
    comps = {idx: c.eval_generators(gens) for idx, c in phi.components().items()}
    for idx in np.ndindex(*((n,) * r)):
        A[idx] = comps.get(tuple(sorted(idx)), 0.0)
    return A


def _apply_slots(L: np.ndarray, A: np.ndarray) -> np.ndarray:
    """Apply a covector map L to every slot of a covariant tensor."""
    for axis in range(A.ndim):
        A = np.moveaxis(np.tensordot(L, A, axes=([1], [axis])), 0, axis)
    return A


def sym_lie_flow_check(nabla: Connection, X, phi: SymField, point: Sequence[float],
                       delta: float = 1e-3, substeps: int = 20) -> float:
    """Finite-difference check of Lˢ_Xφ at m against flow plus ∇⁰ transport.

    F(t) = P_{2t,0} (Ψ_{−t})* φ_{Ψ_t(m)} with Ψ the flow of X and P the
    ∇⁰-parallel transport along the integral curve through m; the residual is
    max |(F(δ) − F(−δ))/2δ − (Lˢ_Xφ)_m| over components.
    """
    nabla.require_torsion_free()
    chart = nabla.chart
    n = chart.dim
    x = _vals(X)
    dX = [[x[a].partial(b) for b in range(n)] for a in range(n)]
    gamma = _Gamma(torsion_free_part(nabla))

    def vec(y):
        gens = generator_values(chart, y)
        return np.array([c.eval_generators(gens) for c in x])

    def jac(y):
        gens = generator_values(chart, y)
        return np.array([[c.eval_generators(gens) for c in row] for row in dX])

    # state: position y, flow Jacobian K (DΨ_s at m), covector transport Φ (T*_m → T*_{γ(s)})
    def f(_t, s):
        y = s[:n]
        K = s[n:n + n * n].reshape(n, n)
        Phi = s[n + n * n:].reshape(n, n)
        Xv = vec(y)
        G = gamma(y)
        dK = jac(y) @ K
        # parallel covectors: α̇_j = Γᵏᵢⱼ Ẋⁱ α_k
        A = np.einsum("kij,i->jk", G, Xv)
        return np.concatenate([Xv, dK.ravel(), (A @ Phi).ravel()])

    y0 = np.concatenate([np.asarray(point, float), np.eye(n).ravel(), np.eye(n).ravel()])

    def F(t):
        h = t / substeps
        traj = rk4(f, y0, h, 2 * substeps)
        mid, end = traj[substeps], traj[-1]
        y1 = mid[:n]
        K1 = mid[n:n + n * n].reshape(n, n)
        K2 = end[n:n + n * n].reshape(n, n)
        Phi = end[n + n * n:].reshape(n, n)
        J = K1 @ np.linalg.inv(K2)  # DΨ_{−t} at Ψ_{2t}(m)
        L = np.linalg.inv(Phi) @ J.T
        return _apply_slots(L, _component_array(phi, y1))

    numeric = (F(delta) - F(-delta)) / (2 * delta)
    exact = _component_array(sym_lie(nabla, x, phi), point)
    return float(np.max(np.abs(numeric - exact))) if numeric.size else float(abs(numeric - exact))


def rk4_order_factor(h: float = 0.05, x0: float = 0.0, v0: float = 0.5, T: float = 1.0) -> float:
    """Error ratio e(h)/e(h/2) on ẍ = −ẋ² (Γ¹₁₁ = 1), whose solution is x₀ + ln(1 + t v₀)."""
    chart = Chart.affine("x")
    nabla = Connection.from_entries(chart, {(0, 0, 0): 1})
    exact = x0 + math.log(1 + T * v0)
    e1 = abs(integrate_geodesic(nabla, [x0], [v0], h, T).positions[-1][0] - exact)
    e2 = abs(integrate_geodesic(nabla, [x0], [v0], h / 2, T).positions[-1][0] - exact)
    return e1 / e2
