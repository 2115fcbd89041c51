"""Command-line drivers: ``ktp verify | run | sweep``.

Exit codes: 0 success, 1 numeric failure, 2 configuration error.
"""
from __future__ import annotations

import argparse
import logging
import os
import shutil
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

from . import io, plotting
from .config import AP_EPS, ConfigError, RunSpec, dump_config, load_config, preset_ids, resolve_preset
from .diagnostics import ap_sweep, compare_macro
from .euler import EulerError, run_euler
from .kinetic import NumericalError, run_kinetic
from .moments import DiagnosticError

log = logging.getLogger("ktp")

EXIT_OK, EXIT_NUMERIC, EXIT_CONFIG = 0, 1, 2


def worker_count(jobs: int) -> int:
    raw = os.environ.get("KTP_THREADS")
    if raw is None:
        return max(1, min(jobs, os.cpu_count() or 1))
    try:
        val = int(raw)
    except ValueError as exc:
        raise ConfigError(f"KTP_THREADS must be a positive integer, got {raw!r}") from exc
    if val < 1:
        raise ConfigError(f"KTP_THREADS must be a positive integer, got {raw!r}")
    return min(val, jobs)


class _Staging:
    """Write into a scratch directory and move files into place only on success."""

    def __init__(self, out: Path):
        self.out = out

    def __enter__(self) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        self.tmp = Path(tempfile.mkdtemp(prefix=".partial-", dir=self.out))
        return self.tmp

    def __exit__(self, exc_type, exc, tb):
        try:
            if exc_type is None:
                for p in sorted(self.tmp.iterdir()):
                    os.replace(p, self.out / p.name)
        finally:
            shutil.rmtree(self.tmp, ignore_errors=True)
        return False


def _finish(tmp: Path, spec: RunSpec):
    (tmp / "config.resolved.json").write_text(dump_config(spec))
    (tmp / "plot_figures.py").write_text(Path(plotting.__file__).read_text())
    if spec.plots:
        plotting.render(str(tmp))


def _resolve(args) -> tuple[RunSpec, bool]:
    if args.config:
        spec = load_config(args.config)
        with_euler = args.with_euler
    else:
        spec = resolve_preset(args.preset, args.variant)
        with_euler = args.with_euler or args.preset.startswith("riemann")
    if args.eps is not None:
        if not args.eps > 0:
            raise ConfigError(f"--eps must be positive, got {args.eps}")
        spec = RunSpec(spec.sim.with_eps(args.eps), spec.plots)
    if args.nx is not None:
        if args.nx < 4:
            raise ConfigError(f"--nx must be >= 4, got {args.nx}")
        spec = RunSpec(replace(spec.sim, grid=replace(spec.sim.grid, nx=args.nx)), spec.plots)
    if args.no_plots:
        spec = RunSpec(spec.sim, False)
    return spec, with_euler and not args.no_euler


def cmd_verify(args) -> int:
    from .verify import run_all

    checks = run_all()
    width = max(len(c.name) for c in checks)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name:<{width}}  {c.detail}")
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_NUMERIC


def cmd_run(args) -> int:
    if args.preset == "verify":
        return cmd_verify(args)
    if args.preset == "ap-sweep":
        args.eps_list = ",".join(repr(e) for e in AP_EPS)
        return cmd_sweep(args)
    spec, with_euler = _resolve(args)
    sim = spec.sim
    out = Path(args.out)
    with _Staging(out) as tmp:
        log.info("kinetic run: eps=%g, %d x %d cells, t_end=%g", sim.eps, sim.grid.nx, sim.grid.nv + 1, sim.t_end)
        res = run_kinetic(sim)
        io.write_macro_csv(tmp / "macro_kinetic.csv", sim.grid.x, io.kinetic_frames(res))
        io.write_diagnostics_csv(tmp / "diagnostics.csv", res.diagnostics)
        if with_euler:
            ref = run_euler(sim, dt=sim.dt, flux=args.euler_flux)
            io.write_macro_csv(tmp / "macro_euler.csv", sim.grid.x, io.euler_frames(ref))
            rep = compare_macro(res.final_macro, ref.final, sim.grid, sim.species, eps=sim.eps, time=res.times[-1])
            io.write_compare_csv(tmp / "compare.csv", [rep])
        _finish(tmp, spec)
    print(f"wrote {out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        eps_list = [float(e) for e in args.eps_list.split(",") if e.strip()]
    except ValueError as exc:
        raise ConfigError(f"--eps-list must be comma-separated numbers, got {args.eps_list!r}") from exc
    if not eps_list or any(not e > 0 for e in eps_list):
        raise ConfigError(f"--eps-list needs positive values, got {args.eps_list!r}")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ConfigError(f"--eps-list must be strictly decreasing, got {args.eps_list!r}")
    args.eps = None
    spec, _ = _resolve(args)
    sim = spec.sim
    out = Path(args.out)
    with _Staging(out) as tmp:
        reports, results, ref = ap_sweep(sim, eps_list, workers=worker_count(len(eps_list)), flux=args.euler_flux)
        for e, r in zip(eps_list, results):
            io.write_macro_csv(tmp / f"macro_kinetic_eps{e:g}.csv", sim.grid.x, io.kinetic_frames(r))
        io.write_macro_csv(tmp / "macro_euler.csv", sim.grid.x, io.euler_frames(ref))
        io.write_compare_csv(tmp / "compare.csv", reports)
        _finish(tmp, spec)
    for r in reports:
        print(f"eps={r.eps:g}  L1(n1)={r.l1_n1:.3e}  L1(n2)={r.l1_n2:.3e}  L1(rho u)={r.l1_mom:.3e}  "
              f"rel.entropy={r.rel_entropy:.3e}")
    print(f"wrote {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ktp", description="Two-species BGK mixture solver with truncated Maxwellians.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("verify", help="run the analytic oracle suite")

    def common(sp, with_eps=True):
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--preset", choices=preset_ids())
        src.add_argument("--config", help="flat JSON configuration file")
        sp.add_argument("--out", default="out", help="output directory (default: out)")
        sp.add_argument("--variant", choices=("caption", "text"), default="caption",
                        help="riemann1-case2 only: gamma2 = 5/3 (caption) or 7/5 (text)")
        sp.add_argument("--euler-flux", choices=("lf", "kinetic"), default="lf",
                        help="Euler reference flux (default: lf)")
        sp.add_argument("--no-plots", action="store_true", help="skip PNG rendering")
        sp.add_argument("--nx", type=int, help="override the number of spatial cells")
        if with_eps:
            sp.add_argument("--eps", type=float, help="override the Knudsen number")
            sp.add_argument("--with-euler", action="store_true", help="also run the Euler reference")
            sp.add_argument("--no-euler", action="store_true", help="skip the Euler reference for presets")

    run = sub.add_parser("run", help="run one experiment")
    common(run)
    sweep = sub.add_parser("sweep", help="eps sweep against one Euler reference")
    common(sweep, with_eps=False)
    sweep.add_argument("--eps-list", default=",".join(repr(e) for e in AP_EPS),
                       help="comma-separated, strictly decreasing")
    sweep.set_defaults(with_euler=True, no_euler=False)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    handlers = {"verify": cmd_verify, "run": cmd_run, "sweep": cmd_sweep}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, EulerError, DiagnosticError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
