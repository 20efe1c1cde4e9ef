"""Model assembly for configured runs, trajectory tables and their serialization."""
from __future__ import annotations

import io
import json
import os
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .config import PortraitSpec, RunConfig
from .integrate import IntegratorConfig, Trajectory, first_return, integrate, reconstruct
from .models import (SleighParams, casimir_fbar, chaplygin_lamb_rhs, classify_equilibrium,
                     equilibria_line, full_hamiltonian, heisenberg_rhs, kirchhoff_rhs, reduced_energy,
                     separatrix_energy, sleigh_constrained_rhs, sleigh_reduced_rhs,
                     transverse_eigenvalue, velocity)

CLOSURE_TOL = 1e-4
LINE_TOL = 1e-3


@dataclass(frozen=True)
class Model:
    """Vector field, state column names and recorded monitors of a configured model."""

    rhs: Callable
    state_columns: tuple[str, ...]
    monitors: dict
    reconstruct_from: Callable | None = None  # state -> (omega, v1)


def build_model(cfg: RunConfig) -> Model:
    m = cfg.model
    if m == "heisenberg":
        hp, s = cfg.heisenberg, cfg.heisenberg_sigma
        Minv = np.linalg.inv(hp.mass)
        return Model(lambda p: heisenberg_rhs(p, hp, s), ("p1", "p2"),
                     {"H": lambda p: 0.5 * float(p @ Minv @ p)})
    I, circ = cfg.inertia, cfg.circ
    H = lambda mu: full_hamiltonian(mu[:3], I)  # noqa: E731
    if m == "kirchhoff":
        return Model(lambda mu: kirchhoff_rhs(mu, I), ("k", "p1", "p2"), {"H": H})
    if m == "chaplygin_lamb":
        # stacked (mu, sigma); sigma is carried along and stays constant
        def rhs(z):
            return np.concatenate([chaplygin_lamb_rhs(z[:3], I, circ), np.zeros(3)])
        return Model(rhs, ("k", "p1", "p2", "sigma0", "sigma1", "sigma2"),
                     {"H": H, "Fbar": lambda z: casimir_fbar(z[:3], z[3:])})
    sp = SleighParams(I, circ)
    if m == "sleigh_reduced":
        return Model(lambda x: sleigh_reduced_rhs(x, sp), ("omega", "v1"),
                     {"H": lambda x: reduced_energy(x, sp)}, lambda x: x[:2])
    if m == "sleigh_full":
        def wv(mu):
            return velocity(mu, I)[:2]
        return Model(lambda mu: sleigh_constrained_rhs(mu, sp), ("k", "p1", "p2"),
                     {"omega": lambda mu: velocity(mu, I)[0], "v1": lambda mu: velocity(mu, I)[1],
                      "H": H, "v2": lambda mu: velocity(mu, I)[2]}, wv)
    raise ValueError(f"unknown model {m!r}")


def initial_state(cfg: RunConfig) -> np.ndarray:
    if cfg.model == "chaplygin_lamb":
        return np.concatenate([cfg.state0, cfg.circ.sigma])
    return np.array(cfg.state0, dtype=float)


@dataclass
class Table:
    columns: list[str]
    rows: np.ndarray


def tabulate(model: Model, traj: Trajectory, pose0=(0.0, 0.0, 0.0),
             cfg: IntegratorConfig | None = None) -> Table:
    cols = ["t", *model.state_columns, *model.monitors]
    parts = [traj.times[:, None], traj.states, *(traj.monitors[k][:, None] for k in model.monitors)]
    if model.reconstruct_from is not None:
        drivers = np.array([model.reconstruct_from(x) for x in traj.states])
        g = reconstruct(Trajectory(traj.times, drivers), pose0, cfg)
        cols += ["theta", "x", "y"]
        parts.append(g)
    return Table(cols, np.hstack(parts))


def simulate(cfg: RunConfig) -> Table:
    model = build_model(cfg)
    traj = integrate(model.rhs, initial_state(cfg), cfg.integrator, model.monitors)
    table = tabulate(model, traj, cfg.pose0, cfg.integrator)
    stride = cfg.output.stride
    if stride > 1:
        keep = np.unique(np.r_[np.arange(0, len(table.rows), stride), len(table.rows) - 1])
        table = Table(table.columns, table.rows[keep])
    return table


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def emit_trajectory(table: Table, fmt: str = "csv", dest=None) -> str | None:
    """Write ``table`` as CSV (17 significant digits) or a JSON array of records.

    ``dest`` may be a path, an open text stream, or ``None`` to return the text.
    """
    if fmt == "csv":
        lines = [",".join(table.columns)]
        lines += [",".join(_fmt(v) for v in row) for row in table.rows]
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        records = [dict(zip(table.columns, map(float, row))) for row in table.rows]
        text = json.dumps(records, indent=1) + "\n"
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    if dest is None:
        return text
    if isinstance(dest, (str, os.PathLike)):
        try:
            with open(dest, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write {dest}: {exc.strerror}") from None
    else:
        dest.write(text)
    return None


def read_csv(text: str) -> Table:
    buf = io.StringIO(text)
    cols = buf.readline().strip().split(",")
    rows = np.loadtxt(buf, delimiter=",", ndmin=2)
    return Table(cols, rows)


# -- phase portraits of the reduced sleigh ----------------------------------------------------

@dataclass(frozen=True)
class OrbitResult:
    index: int
    start: np.ndarray
    energy: float
    kind: str  # periodic | heteroclinic | separatrix | equilibrium | unclassified
    period: float | None
    return_distance: float | None
    line_distance: float | None
    table: Table


def portrait_initial_points(spec: PortraitSpec, sp: SleighParams) -> np.ndarray:
    """Grid points, or for each energy level the two ellipse points extremal along the line normal."""
    if spec.grid is not None:
        (w0, w1, nw), (u0, u1, nu) = spec.grid
        W, U = np.meshgrid(np.linspace(w0, w1, nw), np.linspace(u0, u1, nu), indexing="ij")
        return np.column_stack([W.ravel(), U.ravel()])
    I = sp.inertia
    Q = np.array([[I.J, -I.L2], [-I.L2, I.M]])
    line = equilibria_line(sp)
    a = line.normal if line.kind == "line" else np.array([1.0, 0.0])
    d = np.linalg.solve(Q, a)
    pts = []
    for h in spec.energies:
        if h < 0:
            raise ValueError(f"energy level {h} is negative")
        # extremes of a.x on {1/2 x.Qx = h} sit at +-sqrt(2h / a.Q^-1 a) Q^-1 a
        s = np.sqrt(2.0 * h / float(a @ d))
        pts += [s * d, -s * d]
    return np.array(pts)


def reduced_field(sp: SleighParams) -> Callable:
    """``sleigh_reduced_rhs`` with the coefficients bound once, for long orbit runs."""
    I = sp.inertia
    L1, Z, c = I.L1 / I.D, I.Z / I.D, sp.circ.rho * sp.circ.alpha / I.D
    J, L2, M = I.J, I.L2, I.M

    def rhs(x):
        w, v = x
        f = L1 * w + Z * v + c
        return np.array([f * (L2 * w - M * v), f * (J * w - L2 * v)])

    return rhs


def classify_orbit(index: int, x0, sp: SleighParams, t_final: float, h0: float | None,
                   cfg: IntegratorConfig) -> OrbitResult:
    """Classify one reduced orbit; periodic orbits are stored over exactly one period."""
    x0 = np.asarray(x0, dtype=float)
    rhs = reduced_field(sp)
    H = lambda x: reduced_energy(x, sp)  # noqa: E731
    run = IntegratorConfig("rk4", cfg.h, t_final, cfg.stride)
    e = H(x0)
    line = equilibria_line(sp)

    def orbit(t_end):
        traj = integrate(rhs, x0, replace(run, t_final=t_end), {"H": H})
        table = Table(["t", "omega", "v1", "H"], np.column_stack([traj.times, traj.states, traj.monitors["H"]]))
        return table, (line.distance(traj.final) if line.kind == "line" else None)

    if h0 is not None and abs(e - h0) <= 1e-12 * max(1.0, abs(h0)):
        return OrbitResult(index, x0, e, "separatrix", None, None, *reversed(orbit(t_final)))
    if np.linalg.norm(rhs(x0)) <= 1e-14:
        return OrbitResult(index, x0, e, "equilibrium", None, None, *reversed(orbit(t_final)))
    if h0 is not None and e > h0:
        # above the separatrix the orbit should run into the line; test that first
        table, ldist = orbit(t_final)
        if ldist <= LINE_TOL:
            return OrbitResult(index, x0, e, "heteroclinic", None, None, ldist, table)
    ret = first_return(rhs, x0, run)
    if ret is not None and ret.distance <= CLOSURE_TOL:
        table, ldist = orbit(ret.period)
        return OrbitResult(index, x0, e, "periodic", ret.period, ret.distance, ldist, table)
    table, ldist = orbit(t_final)
    kind = "heteroclinic" if ldist is not None and ldist <= LINE_TOL else "unclassified"
    return OrbitResult(index, x0, e, kind, None, None, ldist, table)


def run_portrait(cfg: RunConfig) -> tuple[list[OrbitResult], float | None, list]:
    """Orbits in input order, the separatrix energy and classified equilibria samples."""
    sp = SleighParams(cfg.inertia, cfg.circ)
    spec = cfg.portrait
    h0 = separatrix_energy(sp)
    starts = portrait_initial_points(spec, sp)
    with ThreadPoolExecutor(max_workers=spec.workers) as pool:
        orbits = list(pool.map(lambda ix: classify_orbit(ix[0], ix[1], sp, spec.t_final, h0, cfg.integrator),
                               enumerate(starts)))
    return orbits, h0, equilibria_samples(sp, cfg.equilibria_span)


def equilibria_samples(sp: SleighParams, span=(-2.0, 2.0, 9)) -> list[tuple[float, float, float, str]]:
    """``(omega, v1, eigenvalue, class)`` at evenly spaced points of the line (empty if none)."""
    line = equilibria_line(sp)
    if line.kind != "line":
        return []
    out = []
    for s in np.linspace(*span[:2], int(span[2])):
        pt = line.point(float(s))
        out.append((float(pt[0]), float(pt[1]), transverse_eigenvalue(pt, sp), classify_equilibrium(pt, sp)))
    return out


def write_portrait(outdir, orbits, h0, equilibria, spec: PortraitSpec) -> None:
    os.makedirs(outdir, exist_ok=True)
    width = max(3, len(str(len(orbits) - 1)))
    for o in orbits:
        emit_trajectory(o.table, "csv", os.path.join(outdir, f"orbit_{o.index:0{width}d}.csv"))
    if spec.equilibria:
        lines = ["omega,v1,eigenvalue,class"] + [f"{_fmt(w)},{_fmt(v)},{_fmt(lam)},{c}" for w, v, lam, c in equilibria]
        with open(os.path.join(outdir, "equilibria.csv"), "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    if spec.separatrix:
        with open(os.path.join(outdir, "separatrix.txt"), "w", encoding="utf-8") as fh:
            if h0 is None:
                fh.write("none\n")
            else:
                fh.write(_fmt(h0) + ("  # non-positive\n" if h0 <= 0 else "\n"))
    opt = lambda v: "" if v is None else _fmt(v)  # noqa: E731
    lines = ["index,omega0,v1_0,energy,class,period,return_distance,line_distance"]
    for o in orbits:
        lines.append(f"{o.index},{_fmt(o.start[0])},{_fmt(o.start[1])},{_fmt(o.energy)},{o.kind},"
                     f"{opt(o.period)},{opt(o.return_distance)},{opt(o.line_distance)}")
    with open(os.path.join(outdir, "summary.csv"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
