"""Command-line entry point.

Exit codes: 0 success, 2 invalid configuration or arguments, 3 verification
failure, 4 numerical blow-up.  Files are written only below ``--out``;
without it, results go to stdout.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, kernels
from . import bounds as bd
from . import constants as cn
from .config import build_run, load_config
from .errors import InvalidArgument, NumericalBlowup, UnsupportedOperation

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_BLOWUP = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_CONFIG)


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "" if math.isnan(x) else format(float(x), ".17g")
    return str(x)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default)


class Output:
    """Writes named artifacts under --out, or prints them when no directory is given."""

    def __init__(self, out):
        self.dir = Path(out) if out else None
        if self.dir is not None:
            self.dir.mkdir(parents=True, exist_ok=True)

    def emit(self, name, text, echo=False):
        if self.dir is None or echo:
            sys.stdout.write(text if text.endswith("\n") else text + "\n")
        if self.dir is not None:
            (self.dir / name).write_text(text, encoding="utf-8")

    def manifest(self, command, inputs, seeds, started):
        doc = {"command": command, "inputs": inputs, "seeds": seeds,
               "constants": cn.constant_set().as_dict(), "version": __version__,
               "kernel_backend": kernels.BACKEND,
               "wall_clock_s": time.perf_counter() - started}
        if self.dir is not None:
            (self.dir / "manifest.json").write_text(dumps(doc) + "\n", encoding="utf-8")
        return doc


# --- commands -----------------------------------------------------------------

def cmd_constants(args, out, started):
    cs = cn.constant_set()
    out.emit("constants.txt", cn.format_table(cs), echo=True)
    out.emit("constants.json", dumps(cs.as_dict()), echo=True)
    out.manifest("constants", {}, [], started)
    return EXIT_OK


def cmd_bounds(args, out, started):
    pair = bd.DimensionlessPair(args.G, args.G1)
    reports = bd.all_bounds(args.s, pair)
    if args.all and args.s != 1.0:
        lhs, rhs = bd.small_alpha_gate(pair)
        reports.append(bd.BoundReport("est3", bd.bound_small_alpha(pair).value, False,
                                      f"requires s = 1; G1^3 G^4 = {lhs!r}, rhs = {rhs!r}",
                                      cn.constant_set().as_dict(), "best", 1.0))
    if not args.all:
        reports = [r for r in reports if r.applicable]
    best = bd.best_bound(args.s, pair)
    doc = {"inputs": {"s": args.s, "G": args.G, "G1": args.G1},
           "reports": [r.as_dict() for r in reports], "best": best.as_dict()}
    out.emit("bounds.json", dumps(doc), echo=True)
    out.manifest("bounds", doc["inputs"], [], started)
    return EXIT_OK


def cmd_zeta(args, out, started):
    from .spectral_domain import build_synthetic_basis, build_torus_basis
    from .zeta import zeta_sweep

    if args.spectrum == "torus":
        domain = build_torus_basis(args.side_length, args.kmax)
    else:
        domain = build_synthetic_basis(args.count or args.N, args.volume)
    sw = zeta_sweep(domain, args.alpha, args.s, args.N)
    idx = range(args.N) if args.sweep else [args.N - 1]
    rows = [(sw.n[i], sw.zeta[i], sw.zeta_hat[i], sw.gest_margin[i],
             sw.ggest_margin[i], sw.gest1_margin[i]) for i in idx]
    header = ("N", "zeta", "zeta_hat", "gest_margin", "ggest_margin", "gest1_margin")
    out.emit("zeta.csv", csv_text(header, rows))
    out.manifest("zeta", vars_clean(args), [], started)
    return EXIT_OK


def vars_clean(args):
    return {k: v for k, v in vars(args).items() if k not in ("func",)}


def _simulate_from_config(cfg):
    from .galerkin import GalerkinState, simulate

    domain, params, u0 = build_run(cfg)
    traj = simulate(GalerkinState(0.0, u0), params, domain, cfg.t_final, cfg.dt, cfg.sample_every)
    return domain, params, traj


def cmd_simulate(args, out, started):
    cfg = load_config(args.config)
    _, params, traj = _simulate_from_config(cfg)
    rows = zip(traj.times, traj.energy, traj.voigt_energy, traj.enstrophy, traj.forcing_pairing)
    header = ("t", "energy", "voigt_energy", "enstrophy", "forcing_pairing")
    out.emit("timeseries.csv", csv_text(header, rows))
    out.manifest("simulate", {"config": cfg.as_dict(), "params": params.as_dict()},
                 [cfg.seed], started)
    return EXIT_OK


def cmd_traces(args, out, started):
    from .trace import empirical_dimension, q_curve

    cfg = load_config(args.config)
    domain, params, traj = _simulate_from_config(cfg)
    if not 1 <= args.nmax <= domain.mode_count:
        raise InvalidArgument(f"--nmax must lie in [1, {domain.mode_count}]")
    rep = q_curve(traj, domain, params, args.nmax, cfg.transient_fraction)
    rows = zip(rep.n_values, rep.q_values, rep.q_first_half, rep.q_second_half)
    out.emit("q_curve.csv", csv_text(("N", "q", "q_firsthalf", "q_secondhalf"), rows))
    n_star = empirical_dimension(rep)
    best = bd.best_bound(params.s, bd.grashof_numbers(params, domain))
    ceiling = math.ceil(best.value)
    summary = {"n_star": n_star, "bound_ceiling": ceiling, "bound_theorem": best.theorem_id,
               "consistent": n_star is not None and n_star <= ceiling,
               "split_half_discrepancy": rep.split_half_discrepancy,
               "low_confidence": rep.low_confidence,
               "averaging_window": rep.averaging_window, "samples_used": rep.samples_used}
    out.emit("traces.json", dumps(summary), echo=True)
    out.manifest("traces", {"config": cfg.as_dict(), "nmax": args.nmax}, [cfg.seed], started)
    return EXIT_OK


def cmd_verify(args, out, started):
    from .verify import run_suite

    if args.seed is None:
        raise InvalidArgument("verify needs an explicit --seed")
    reports = run_suite(args.suite, args.trials, args.seed)
    docs = [r.as_dict() for r in reports]
    doc = docs[0] if len(docs) == 1 else {
        "suite": "all", "trials": args.trials, "seed": args.seed,
        "min_margin": min((d["min_margin"] for d in docs if d["min_margin"] is not None),
                          default=None),
        "violations": [dict(v, suite=d["suite"]) for d in docs for v in d["violations"]],
        "suites": docs}
    out.emit("verify.json", dumps(doc), echo=True)
    out.manifest("verify", {"suite": args.suite, "trials": args.trials}, [args.seed], started)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY


def cmd_reproduce(args, out, started):
    from . import acceptance

    selected = set(args.only) if args.only else None
    ctx = cn.injected_fault(args.fault_scale) if args.inject_fault else contextlib.nullcontext()
    with ctx:
        results = acceptance.run_all(selected)
    for r in results:
        print(r.line())
        for name, (header, rows) in r.tables.items():
            if out.dir is not None:
                (out.dir / f"ac{r.number:02d}_{name}.csv").write_text(
                    csv_text(header, rows), encoding="utf-8")
    report = {"criteria": [r.as_dict() for r in results],
              "all_passed": all(r.ok for r in results),
              "fault_injected": bool(args.inject_fault)}
    if out.dir is not None:
        (out.dir / "report.json").write_text(dumps(report) + "\n", encoding="utf-8")
    out.manifest("reproduce", {"only": sorted(selected) if selected else None,
                               "inject_fault": bool(args.inject_fault)}, [], started)
    return EXIT_OK if report["all_passed"] else EXIT_VERIFY


# --- parser -------------------------------------------------------------------

def build_parser():
    p = _Parser(prog="voigtlab", description="Fractional Voigt-regularized flow laboratory.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--out", help="directory for output files")
        sp.set_defaults(func=func)
        return sp

    add("constants", cmd_constants, "print the constant table")

    sp = add("bounds", cmd_bounds, "dimension bounds for (s, G, G1)")
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--G", type=float, required=True)
    sp.add_argument("--G1", type=float, required=True)
    sp.add_argument("--all", action="store_true", help="include non-applicable reports")

    sp = add("zeta", cmd_zeta, "partial spectral sums and their lower-bound margins")
    sp.add_argument("--spectrum", choices=("torus", "synthetic"), required=True)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--sweep", action="store_true", help="one row per N = 1..N")
    sp.add_argument("--kmax", type=int, default=4)
    sp.add_argument("--side-length", type=float, default=2.0 * math.pi)
    sp.add_argument("--volume", type=float, default=1.0)
    sp.add_argument("--count", type=int, default=None, help="synthetic spectrum length")

    sp = add("simulate", cmd_simulate, "integrate a configured run")
    sp.add_argument("--config", required=True)

    sp = add("traces", cmd_traces, "volume-contraction exponents along a configured run")
    sp.add_argument("--config", required=True)
    sp.add_argument("--nmax", type=int, required=True)

    sp = add("verify", cmd_verify, "seeded inequality campaigns")
    sp.add_argument("--suite", choices=("lt", "clr", "minmax", "bly", "zeta", "all"),
                    required=True)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int, default=None)

    sp = add("reproduce", cmd_reproduce, "run the acceptance suite")
    sp.add_argument("--only", type=int, nargs="*", help="criterion numbers to run")
    sp.add_argument("--inject-fault", action="store_true",
                    help="perturb every constant (negative control, expect exit 3)")
    sp.add_argument("--fault-scale", type=float, default=1.01)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    started = time.perf_counter()
    try:
        out = Output(args.out)
        return args.func(args, out, started)
    except NumericalBlowup as exc:
        sys.stderr.write(f"numerical blow-up at t = {exc.time!r}\n")
        return EXIT_BLOWUP
    except (InvalidArgument, UnsupportedOperation) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
