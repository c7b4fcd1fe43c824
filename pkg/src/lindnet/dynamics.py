"""Fixed-step RK4 integration of the moment equations and decay-rate fits.

Used as an oracle for the spectral gaps: the fitted late-time decay rate of
``||A(t)||`` or ``||C(t) - C_eq||`` should reproduce Φ or Θ.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DecayFitError, NonFiniteError, StepSizeError
from .moment_generators import (
    apply_first_moment,
    apply_second_moment,
    build_first_moment,
    build_second_moment,
)
from .netmodel import NetworkSpec, require_valid
from .spectral import dark_state_analysis, equilibrium


class Observable(str, enum.Enum):
    MEAN_NORM = "mean_norm"
    CORRELATION_DISTANCE = "correlation_distance"


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    a_values: np.ndarray  # (T, N)
    c_values: np.ndarray  # (T, N, N)
    spec: NetworkSpec
    dt: float


def spectral_radius_bound(spec: NetworkSpec) -> float:
    """max(Γ, max γ_n, max row sum of |J|): sets the step-size contract."""
    return max(
        spec.dephasing,
        float(np.max(spec.loss, initial=0.0)),
        float(np.max(np.abs(spec.hopping).sum(axis=1), initial=0.0)),
    )


def max_step(spec: NetworkSpec) -> float:
    rho = spectral_radius_bound(spec)
    return math.inf if rho == 0 else 0.1 / rho


def rhs(spec_or_gens, a, c):
    """Right-hand side (dA/dt, dC/dt); shares the generator code path."""
    gen_a, gen_b = spec_or_gens
    return apply_first_moment(gen_a, a), apply_second_moment(gen_b, c)


def _rk4_poly(hm: np.ndarray) -> tuple:
    """Stability polynomial of classical RK4 for y' = M y (+ constant).

    Returns (P, Q) with y_{k+1} = P y_k + Q f for y' = M y + f, where
    hm = h*M. Q is returned already multiplied by h.
    """
    eye = np.eye(hm.shape[0], dtype=complex)
    hm2 = hm @ hm
    hm3 = hm2 @ hm
    p = eye + hm + hm2 / 2 + hm3 / 6 + hm3 @ hm / 24
    q = eye + hm / 2 + hm2 / 6 + hm3 / 24
    return p, q


class _Stepper:
    """Advances (A, C) by whole RK4 steps of size ``dt``.

    ``propagator`` applies the exact RK4 one-step map of the linear system as
    a matrix (and its powers for multi-step jumps); ``matrix_free`` evaluates
    the four stages explicitly. Both realize the same scheme.
    """

    def __init__(self, spec: NetworkSpec, dt: float, method: str):
        self.spec = spec
        self.dt = dt
        self.n = spec.n_sites
        self.method = method
        self.gen_a = build_first_moment(spec)
        if method == "propagator":
            gen_b = build_second_moment(spec)
            self.gen_b = gen_b
            pa, _ = _rk4_poly(dt * self.gen_a.matrix_a)
            pb, qb = _rk4_poly(dt * gen_b.matrix_b)
            size = self.n * self.n
            aug = np.zeros((size + 1, size + 1), dtype=complex)
            aug[:size, :size] = pb
            aug[:size, size] = dt * (qb @ gen_b.source)
            aug[size, size] = 1.0
            self._pa, self._aug = pa, aug
            self._powers = {}
        elif method == "matrix_free":
            self.gen_b = build_second_moment(spec, dense=False)
        else:
            raise ValueError(f"unknown integration method {method!r}")

    def _power(self, k):
        if k not in self._powers:
            if len(self._powers) > 8:
                self._powers.clear()
            self._powers[k] = (
                np.linalg.matrix_power(self._pa, k),
                np.linalg.matrix_power(self._aug, k),
            )
        return self._powers[k]

    def step(self, a, c):
        h = self.dt
        gens = (self.gen_a, self.gen_b)
        k1a, k1c = rhs(gens, a, c)
        k2a, k2c = rhs(gens, a + 0.5 * h * k1a, c + 0.5 * h * k1c)
        k3a, k3c = rhs(gens, a + 0.5 * h * k2a, c + 0.5 * h * k2c)
        k4a, k4c = rhs(gens, a + h * k3a, c + h * k3c)
        a = a + (h / 6) * (k1a + 2 * k2a + 2 * k3a + k4a)
        c = c + (h / 6) * (k1c + 2 * k2c + 2 * k3c + k4c)
        return a, c

    def advance(self, a, c, k):
        if k == 0:
            return a, c
        if self.method == "propagator":
            pa, paug = self._power(k)
            y = np.append(c.ravel(), 1.0)
            y = paug @ y
            return pa @ a, y[:-1].reshape(self.n, self.n)
        for _ in range(k):
            a, c = self.step(a, c)
        return a, c


def _resolve_method(spec, method):
    if method == "auto":
        return "propagator" if spec.n_sites <= 32 else "matrix_free"
    return method


def _check_state(a, c, t):
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(c))):
        raise NonFiniteError(f"non-finite moments at t={t:.6g}", time=t)


def integrate(
    spec: NetworkSpec,
    a0,
    c0,
    t_end: float,
    dt_max: float | None = None,
    n_samples: int = 101,
    method: str = "auto",
) -> Trajectory:
    """Integrate both moment equations from (a0, c0) over [0, t_end].

    The step is the largest value ``t_end / n_steps`` not exceeding
    ``dt_max``; ``dt_max`` must respect ``dt_max <= 0.1 / spectral_radius_bound``.
    ``n_samples`` states are recorded on (nearly) uniformly spaced steps.
    """
    spec = require_valid(spec)
    limit = max_step(spec)
    dt_max = limit if dt_max is None else float(dt_max)
    if not dt_max > 0 or dt_max > limit * (1 + 1e-12):
        raise StepSizeError(f"dt_max={dt_max:.3g} violates the contract dt_max <= {limit:.3g}")
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    n_steps = max(1, math.ceil(t_end / dt_max - 1e-9))
    dt = t_end / n_steps
    n = spec.n_sites
    a = np.asarray(a0, dtype=complex).reshape(n)
    c = np.asarray(c0, dtype=complex).reshape(n, n)
    marks = np.unique(np.round(np.linspace(0, n_steps, max(2, n_samples))).astype(int))
    stepper = _Stepper(spec, dt, _resolve_method(spec, method))
    a_out, c_out = [a], [c]
    for prev, cur in zip(marks[:-1], marks[1:]):
        a, c = stepper.advance(a, c, int(cur - prev))
        _check_state(a, c, cur * dt)
        a_out.append(a)
        c_out.append(c)
    return Trajectory(marks * dt, np.array(a_out), np.array(c_out), spec, dt)


def spectral_solution(spec: NetworkSpec, a0, c0, t: float):
    """Exact (A(t), C(t)) from eigendecompositions of the generators."""
    spec = require_valid(spec)
    n = spec.n_sites
    gen_a = build_first_moment(spec)
    gen_b = build_second_moment(spec)
    y_eq = np.zeros(n * n, dtype=complex)
    if np.any(gen_b.source):
        y_eq = equilibrium(spec).c_eq.ravel()

    def evolve(m, y0):
        lam, v = np.linalg.eig(m)
        return v @ (np.exp(lam * t) * np.linalg.solve(v, y0))

    a = evolve(gen_a.matrix_a, np.asarray(a0, dtype=complex))
    y = y_eq + evolve(gen_b.matrix_b, np.asarray(c0, dtype=complex).ravel() - y_eq)
    return a, y.reshape(n, n)


def observable_series(traj: Trajectory, observable, c_eq=None) -> np.ndarray:
    observable = Observable(observable)
    if observable is Observable.MEAN_NORM:
        return np.linalg.norm(traj.a_values, axis=1)
    if c_eq is None:
        c_eq = equilibrium(traj.spec).c_eq if np.any(traj.spec.gain) else 0.0
    return np.linalg.norm(traj.c_values - c_eq, axis=(1, 2))


def fit_decay_rate(
    traj: Trajectory,
    observable,
    c_eq=None,
    window_fraction: float = 1 / 3,
    min_decades: float = 3.0,
    floor: float = 1e-12,
) -> float:
    """Least-squares decay rate of log(observable) over the last part of the
    decay window (samples above ``floor``)."""
    y = observable_series(traj, observable, c_eq)
    t = traj.times
    above = np.flatnonzero(y > floor)
    if above.size < 3:
        raise DecayFitError("observable is below the floor almost immediately")
    last = above[-1]
    hit_floor = last < len(y) - 1
    decades = math.log10(y[0] / y[last]) if y[0] > 0 else 0.0
    if not hit_floor and decades < min_decades:
        raise DecayFitError(
            f"insufficient dynamic range: observable dropped {decades:.2f} decades "
            f"(need {min_decades})"
        )
    t_win, y_win = t[: last + 1], y[: last + 1]
    start = t_win[-1] - window_fraction * (t_win[-1] - t_win[0])
    sel = t_win >= start
    if sel.sum() < 3:
        raise DecayFitError("too few samples in the fit window")
    slope = np.polyfit(t_win[sel], np.log(y_win[sel]), 1)[0]
    if slope >= 0:
        raise DecayFitError(f"observable is not decaying (slope {slope:.3g})")
    return float(-slope)


def default_initial_state(spec: NetworkSpec):
    """a0 = xi and c0 = C_eq + conj(xi) xi^T for the least-leaking hopping mode xi."""
    xi = dark_state_analysis(spec)[0].vector.astype(complex)
    c_eq = equilibrium(spec).c_eq if np.any(spec.gain) else np.zeros((spec.n_sites,) * 2, complex)
    return xi, c_eq + np.outer(xi.conj(), xi), c_eq


@dataclass(frozen=True, eq=False)
class DecayExperiment:
    trajectory: Trajectory
    rate: float
    observable: Observable
    c_eq: np.ndarray


def relaxation_experiment(
    spec: NetworkSpec,
    observable=Observable.CORRELATION_DISTANCE,
    decades: float = 4.0,
    dt_max: float | None = None,
    samples_per_segment: int = 200,
    max_time: float = 1e7,
    window_fraction: float = 1 / 3,
    method: str = "auto",
) -> DecayExperiment:
    """Relax from the default initial state until the observable has dropped
    ``decades`` decades, then fit its decay rate.

    Integration proceeds in segments of doubling length so the horizon is
    found without prior knowledge of the rate.
    """
    spec = require_valid(spec)
    observable = Observable(observable)
    a, c, c_eq = default_initial_state(spec)
    dt = max_step(spec) if dt_max is None else dt_max
    if dt > max_step(spec) * (1 + 1e-12):
        raise StepSizeError(f"dt_max={dt:.3g} violates the contract")
    stepper = _Stepper(spec, dt, _resolve_method(spec, method))

    def measure(a, c):
        if observable is Observable.MEAN_NORM:
            return np.linalg.norm(a)
        return np.linalg.norm(c - c_eq)

    y0 = measure(a, c)
    target = max(y0 * 10.0**-decades, 1e-12)
    times, a_out, c_out = [0.0], [a], [c]
    t_steps = 0
    seg_steps = max(samples_per_segment, 200)
    while True:
        stride = max(1, seg_steps // samples_per_segment)
        for _ in range(seg_steps // stride):
            a, c = stepper.advance(a, c, stride)
            t_steps += stride
            _check_state(a, c, t_steps * dt)
            times.append(t_steps * dt)
            a_out.append(a)
            c_out.append(c)
        if measure(a, c) <= target:
            break
        if t_steps * dt > max_time:
            raise DecayFitError(f"observable did not drop {decades} decades by t={max_time:g}")
        seg_steps *= 2
    traj = Trajectory(np.array(times), np.array(a_out), np.array(c_out), spec, dt)
    rate = fit_decay_rate(traj, observable, c_eq=c_eq, window_fraction=window_fraction)
    return DecayExperiment(traj, rate, observable, c_eq)
