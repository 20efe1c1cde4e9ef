"""Fixed-step RK4 and adaptive RK45 integration, SE(2) reconstruction and
drift monitoring."""
from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import RK45
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk4"
    h: float = 1e-3
    t_final: float = 100.0
    stride: int = 10
    atol: float = 1e-10
    rtol: float = 1e-10

    def __post_init__(self):
        if self.method not in ("rk4", "rk45"):
            raise ValueError(f"unknown integration method {self.method!r}")
        if not self.t_final > 0:
            raise ValueError("t_final must be positive")
        if self.method == "rk4" and not self.h > 0:
            raise ValueError("step h must be positive")
        if self.method == "rk45" and not (self.atol > 0 and self.rtol > 0):
            raise ValueError("tolerances must be positive")
        if int(self.stride) < 1:
            raise ValueError("stride must be a positive integer")


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    monitors: dict[str, np.ndarray] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


class IntegrationError(RuntimeError):
    """Raised on a non-finite stored sample; ``trajectory`` holds the finite samples before it."""

    def __init__(self, message: str, trajectory: Trajectory):
        super().__init__(message)
        self.trajectory = trajectory


def rk4_step(rhs: Callable, x: np.ndarray, h: float) -> np.ndarray:
    k1 = rhs(x)
    k2 = rhs(x + 0.5 * h * k1)
    k3 = rhs(x + 0.5 * h * k2)
    k4 = rhs(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


class _Recorder:
    def __init__(self, monitors: Mapping[str, Callable] | None):
        self.monitors = dict(monitors or {})
        self.times: list[float] = []
        self.states: list[np.ndarray] = []
        self.values: dict[str, list[float]] = {k: [] for k in self.monitors}

    def add(self, t: float, x: np.ndarray):
        self.times.append(t)
        self.states.append(np.array(x, dtype=float))
        for name, fn in self.monitors.items():
            self.values[name].append(float(fn(x)))

    def build(self) -> Trajectory:
        return Trajectory(np.array(self.times), np.array(self.states),
                          {k: np.array(v) for k, v in self.values.items()})


def integrate(rhs: Callable, x0, cfg: IntegratorConfig = IntegratorConfig(),
              monitors: Mapping[str, Callable] | None = None) -> Trajectory:
    """Integrate ``x' = rhs(x)`` from ``t = 0`` to ``cfg.t_final``.

    Every ``cfg.stride``-th step is stored, plus the initial and final
    states.  ``monitors`` maps names to scalar functions of the state that
    are recorded alongside.
    """
    x = np.array(x0, dtype=float)
    rec = _Recorder(monitors)
    rec.add(0.0, x)
    stride = int(cfg.stride)

    def check(t, x):
        if not np.all(np.isfinite(x)):
            raise IntegrationError(f"non-finite state at t = {t:.6g}", rec.build())

    if cfg.method == "rk4":
        n = max(1, math.ceil(cfg.t_final / cfg.h - 1e-9))
        for i in range(1, n + 1):
            t_prev = (i - 1) * cfg.h
            h = min(cfg.h, cfg.t_final - t_prev)
            x = rk4_step(rhs, x, h)
            if i % stride == 0 or i == n:
                # non-finite values propagate, so testing stored samples suffices
                t = cfg.t_final if i == n else i * cfg.h
                check(t, x)
                rec.add(t, x)
        return rec.build()

    solver = RK45(lambda t, y: rhs(y), 0.0, x, cfg.t_final, rtol=cfg.rtol, atol=cfg.atol)
    i = 0
    while solver.status == "running":
        msg = solver.step()
        if solver.status == "failed":
            raise IntegrationError(f"adaptive step failed at t = {solver.t:.6g}: {msg}", rec.build())
        i += 1
        if i % stride == 0 or solver.status == "finished":
            check(solver.t, solver.y)
            rec.add(float(solver.t), solver.y)
    return rec.build()


@dataclass(frozen=True)
class Return:
    period: float
    distance: float


def first_return(rhs: Callable, x0, cfg: IntegratorConfig, radius: float | None = None) -> Return | None:
    """First return of an RK4 orbit to the section through ``x0`` normal to ``rhs(x0)``.

    The crossing is located by root-finding on the length of the last step,
    so ``distance`` measures the orbit's failure to close rather than the
    sampling grid.  A crossing counts only within ``radius`` of ``x0``
    (default: half the largest excursion so far).  ``None`` if no return
    happens before ``cfg.t_final``.
    """
    x0 = np.array(x0, dtype=float)
    f0 = np.asarray(rhs(x0), dtype=float)
    nf = np.linalg.norm(f0)
    if nf == 0:
        return Return(0.0, 0.0)
    f0 = f0 / nf

    def side(x):
        return float((x - x0) @ f0)

    x, t = x0, 0.0
    s_prev = 0.0
    reach = 0.0
    while t < cfg.t_final:
        xn = rk4_step(rhs, x, cfg.h)
        if not np.all(np.isfinite(xn)):
            return None
        s = side(xn)
        d = float(np.linalg.norm(xn - x0))
        reach = max(reach, d)
        limit = 0.5 * reach if radius is None else radius
        if s_prev < 0 <= s and d <= limit:
            base = x
            tau = brentq(lambda u: side(rk4_step(rhs, base, u)), 0.0, cfg.h, xtol=1e-15, rtol=4 * np.finfo(float).eps)
            xr = rk4_step(rhs, base, tau)
            return Return(t + tau, float(np.linalg.norm(xr - x0)))
        x, t, s_prev = xn, t + cfg.h, s
    return None


def reconstruct(traj: Trajectory, g0=(0.0, 0.0, 0.0), cfg: IntegratorConfig | None = None,
                columns: tuple[int, int] = (0, 1)) -> np.ndarray:
    """Planar motion ``(theta, x, y)`` at ``traj.times`` from body velocities with v2 = 0.

    Solves ``theta' = omega``, ``x' = v1 cos theta``, ``y' = v1 sin theta`` by RK4
    with step at most ``cfg.h``, reading ``omega`` and ``v1`` from cubic
    splines through the stored samples.
    """
    t = np.asarray(traj.times, dtype=float)
    w_s = CubicSpline(t, traj.states[:, columns[0]])
    v_s = CubicSpline(t, traj.states[:, columns[1]])
    hmax = cfg.h if cfg is not None else np.inf
    counts = np.maximum(1, np.ceil(np.diff(t) / hmax - 1e-9).astype(int))

    # substep start times and sizes, then driver values at all RK4 stage times
    starts = np.concatenate([t[i] + np.arange(n) * (t[i + 1] - t[i]) / n for i, n in enumerate(counts)])
    sizes = np.repeat(np.diff(t) / counts, counts)
    stage = np.stack([starts, starts + 0.5 * sizes, starts + sizes], axis=1)
    W, V = w_s(stage), v_s(stage)

    out = np.empty((len(t), 3))
    th, x, y = (float(c) for c in g0)
    out[0] = th, x, y
    j = 0
    for i, n in enumerate(counts):
        for _ in range(n):
            h = sizes[j]
            (w0, wm, w1), (u0, um, u1) = W[j], V[j]
            # theta' does not depend on the state, so its stages are explicit
            th2 = th + 0.5 * h * w0
            th3 = th + 0.5 * h * wm
            th4 = th + h * wm
            x += h / 6.0 * (u0 * math.cos(th) + 2 * um * math.cos(th2) + 2 * um * math.cos(th3) + u1 * math.cos(th4))
            y += h / 6.0 * (u0 * math.sin(th) + 2 * um * math.sin(th2) + 2 * um * math.sin(th3) + u1 * math.sin(th4))
            th += h / 6.0 * (w0 + 4 * wm + w1)
            j += 1
        out[i + 1] = th, x, y
    return out


def drift_report(traj: Trajectory, quantities: Mapping[str, Callable] | Iterable[str] | None = None) -> dict[str, float]:
    """``max_t |Q(t) - Q(0)| / max(1, |Q(0)|)`` for each quantity.

    ``quantities`` may name recorded monitors or map names to functions of
    the state; by default every monitor is reported.
    """
    if quantities is None:
        series = traj.monitors
    elif isinstance(quantities, Mapping):
        series = {k: np.array([float(fn(x)) for x in traj.states]) for k, fn in quantities.items()}
    else:
        series = {k: traj.monitors[k] for k in quantities}
    out = {}
    for name, q in series.items():
        q = np.asarray(q, dtype=float)
        out[name] = float(np.max(np.abs(q - q[0])) / max(1.0, abs(q[0])))
    return out
