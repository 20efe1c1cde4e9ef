"""Command-line entry point ``geps``.

Exit codes: 0 success, 1 check failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .algebra import se2_algebra
from .config import ConfigError, RunConfig, load_config
from .eps import measure_criterion, measure_criterion_extended
from .extension import C_CROSS
from .integrate import IntegrationError
from .models import InertiaTensor, SleighParams, equilibria_line, separatrix_energy, tangency_point
from .runner import _fmt, emit_trajectory, equilibria_samples, run_portrait, simulate, write_portrait
from .verify import run_checks

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_GRID = (-1.0, 1.0, -1.0, 1.0, 5)


def _err(msg: str) -> None:
    print(f"geps: {msg}", file=sys.stderr)


def cmd_simulate(cfg: RunConfig, out: str | None) -> int:
    try:
        table = simulate(cfg)
    except IntegrationError as exc:
        _err(f"integration aborted: {exc}")
        return EXIT_FAIL
    dest = out or cfg.output.path
    fmt = cfg.output.format
    if dest is not None and dest.endswith(".json"):
        fmt = "json"
    emit_trajectory(table, fmt, dest if dest is not None else sys.stdout)
    return EXIT_OK


def cmd_portrait(cfg: RunConfig, outdir: str) -> int:
    if cfg.portrait is None:
        raise ConfigError("$: 'portrait' block required for the portrait command")
    orbits, h0, eq = run_portrait(cfg)
    write_portrait(outdir, orbits, h0, eq, cfg.portrait)
    counts: dict[str, int] = {}
    for o in orbits:
        counts[o.kind] = counts.get(o.kind, 0) + 1
    print(f"{len(orbits)} orbits: " + ", ".join(f"{k}={v}" for k, v in sorted(counts.items())))
    print("h0 = " + ("none" if h0 is None else _fmt(h0)))
    return EXIT_OK


def cmd_verify(seed: int, samples: int, corrupt: bool = False) -> int:
    results = run_checks(seed, samples, corrupt)
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"{len(failed)} check(s) failed: {', '.join(failed)}")
        return EXIT_FAIL
    print(f"all {len(results)} checks passed (seed={seed}, samples={samples})")
    return EXIT_OK


def _measure_inertia(base: InertiaTensor, Z: float, L1: float) -> InertiaTensor:
    """``base`` with (Z, L1) replaced; N is raised when needed to stay positive definite."""
    J, L2, M, N = base.J, base.L2, base.M, base.N
    D = J * M - L2 * L2
    # det = N D + rest, linear in N
    rest = -J * Z * Z - 2 * L2 * Z * L1 - M * L1 * L1
    if N * D + rest <= 0:
        N = -rest / D + 1.0
    return InertiaTensor(J, L1, L2, M, Z, N)


def measure_table(cfg: RunConfig, Zs, L1s) -> list[tuple]:
    alg = se2_algebra()
    nu = np.array([0.0, 0.0, 1.0])
    rows = []
    for Z in Zs:
        for L1 in L1s:
            I = _measure_inertia(cfg.inertia, float(Z), float(L1))
            base = measure_criterion(alg, I.matrix, nu)
            ext = measure_criterion_extended(alg, C_CROSS, I.matrix, nu)
            if base.exists != ext.exists:
                raise RuntimeError(f"internal error: base and extended verdicts differ at Z={Z}, L1={L1}")
            rows.append((float(Z), float(L1), base.exists, ext.exists, base.c, base.residual, I.N))
    return rows


def cmd_measure(cfg: RunConfig, grid) -> int:
    if cfg.inertia is None:
        raise ConfigError("$: the measure command needs an inertia block")
    if grid is not None:
        zmin, zmax, lmin, lmax, n = grid
        n = int(n)
        if n < 1:
            raise ConfigError("--grid: n must be at least 1")
        Zs, L1s = np.linspace(zmin, zmax, n), np.linspace(lmin, lmax, n)
    elif cfg.measure is not None:
        Zs, L1s = cfg.measure
    else:
        Zs = L1s = np.linspace(DEFAULT_GRID[0], DEFAULT_GRID[1], DEFAULT_GRID[4])
    try:
        rows = measure_table(cfg, Zs, L1s)
    except RuntimeError as exc:
        _err(str(exc))
        return EXIT_FAIL
    print("Z,L1,exists_base,exists_extended,c,residual,N")
    for Z, L1, eb, ee, c, res, N in rows:
        print(f"{_fmt(Z)},{_fmt(L1)},{str(eb).lower()},{str(ee).lower()},"
              f"{'' if c is None else _fmt(c)},{res:.3e},{_fmt(N)}")
    return EXIT_OK


def cmd_equilibria(cfg: RunConfig) -> int:
    if not cfg.model.startswith("sleigh"):
        raise ConfigError("$.model: the equilibria command needs a sleigh model")
    sp = SleighParams(cfg.inertia, cfg.circ)
    line = equilibria_line(sp)
    print(f"# line: {_fmt(line.L1)}*omega + {_fmt(line.Z)}*v1 + {_fmt(line.c)} = 0 ({line.kind})")
    h0 = separatrix_energy(sp)
    print("# h0: " + ("none" if h0 is None else _fmt(h0) + ("  (non-positive)" if h0 <= 0 else "")))
    tp = tangency_point(sp)
    if tp is not None:
        print(f"# tangency: {_fmt(tp[0])},{_fmt(tp[1])}")
    print("omega,v1,eigenvalue,class")
    for w, v, lam, c in equilibria_samples(sp, cfg.equilibria_span):
        print(f"{_fmt(w)},{_fmt(v)},{_fmt(lam)},{c}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="geps", description="EPS dynamics on SE(2) and its central extensions")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate a configured model and write its trajectory")
    p.add_argument("-c", "--config", required=True)
    p.add_argument("-o", "--output")

    p = sub.add_parser("portrait", help="reduced-sleigh phase portrait as a CSV bundle")
    p.add_argument("-c", "--config", required=True)
    p.add_argument("-d", "--outdir", required=True)

    p = sub.add_parser("verify", help="run the structural self-checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--inject-corrupt", action="store_true", help=argparse.SUPPRESS)

    p = sub.add_parser("measure", help="invariant-measure criterion over a (Z, L1) grid")
    p.add_argument("-c", "--config", required=True)
    p.add_argument("--grid", nargs=5, type=float, metavar=("ZMIN", "ZMAX", "L1MIN", "L1MAX", "N"))

    p = sub.add_parser("equilibria", help="line of equilibria, separatrix energy and stability")
    p.add_argument("-c", "--config", required=True)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            if args.samples < 1:
                raise ConfigError("--samples must be positive")
            return cmd_verify(args.seed, args.samples, args.inject_corrupt)
        cfg = load_config(args.config)
        if args.command == "simulate":
            return cmd_simulate(cfg, args.output)
        if args.command == "portrait":
            return cmd_portrait(cfg, args.outdir)
        if args.command == "measure":
            return cmd_measure(cfg, args.grid)
        return cmd_equilibria(cfg)
    except ConfigError as exc:
        _err(f"config error: {exc}")
        return EXIT_USAGE
    except OSError as exc:
        _err(str(exc))
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
