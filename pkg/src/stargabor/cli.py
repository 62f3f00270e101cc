"""Command line front end.

Exit codes: 0 success, 1 bad input or unusable arguments, 2 a numerical
procedure failed to meet its contract.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .errors import (AdmissibilityError, CacheFormatError, ConvergenceError,
                     CorruptHeader, EmptyResult, InvalidLattice,
                     NotConverged, NotInvertible, NotOrderThree,
                     UnsupportedFormat)
from .gabor import (GaborLattice, Window, WINDOW_KINDS, coefficients_to_csv,
                    coefficients_to_svg, dgt, dgt_real, make_window)
from .harness import (DEFAULT_WINDOWS, GRID_DIM, GRID_PAIRS, SignalRecord,
                      denoise_instance, mse, pair_seed, prepare_signal,
                      report_to_csv, report_to_json, report_to_svg,
                      run_lattice_grid, run_sigma_sweep)
from .noise import NOISE_KINDS, gen_noise
from .ringmod import (AdmissibilityMode, check_admissible,
                      enumerate_dimensions, factorize)
from .solver import SolverConfig
from .wavio import load_wav, write_wav
from .zauner import load_window, save_window

USAGE_ERRORS = (AdmissibilityError, InvalidLattice, UnsupportedFormat,
                CorruptHeader, CacheFormatError, EmptyResult, NotInvertible,
                OSError, ValueError)
NUMERIC_ERRORS = (ConvergenceError, NotOrderThree, NotConverged)


class Parser(argparse.ArgumentParser):
    """argparse, but usage problems exit 1 instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _mode(s: str) -> AdmissibilityMode:
    return AdmissibilityMode(s)


def _require(args, *dests) -> None:
    """Options that must arrive either on the command line or via --config."""
    flags = {"infile": "--in", "out": "-o/--out"}
    missing = [flags.get(d, f"--{d.replace('_', '-')}")
               for d in dests if getattr(args, d, None) is None]
    if missing:
        raise ValueError("missing required option(s): " + ", ".join(missing))


def _comma_list(s: str):
    return tuple(p.strip() for p in s.split(",") if p.strip())


def build_parser() -> Parser:
    p = Parser(prog="stargabor",
               description="Gabor analysis and denoising with eigenvector "
                           "windows of the order-three lattice unitary.")
    p.add_argument("--version", action="version",
                   version=f"%(prog)s {__version__}")
    p.add_argument("--config", metavar="JSON",
                   help="JSON file of argument defaults, applied before "
                        "the command line is parsed")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")

    c = sub.add_parser("check", help="admissibility verdict for a dimension")
    c.add_argument("L", type=int)
    c.add_argument("--mode", type=_mode, default=AdmissibilityMode.RELAXED,
                   choices=list(AdmissibilityMode),
                   metavar="{strict,relaxed}")
    c.set_defaults(func=cmd_check)

    d = sub.add_parser("dims", help="usable dimensions at or below a length")
    d.add_argument("T", type=int)
    d.add_argument("--mode", type=_mode, default=AdmissibilityMode.RELAXED,
                   choices=list(AdmissibilityMode),
                   metavar="{strict,relaxed}")
    d.add_argument("--prime-cap", type=int, default=23)
    d.add_argument("--top", type=int, default=10)
    d.set_defaults(func=cmd_dims)

    w = sub.add_parser("window", help="build a window and write it to disk")
    w.add_argument("--kind", choices=WINDOW_KINDS)
    w.add_argument("--L", type=int)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--theta", type=float, default=0.0)
    w.add_argument("-o", "--out")
    w.set_defaults(func=cmd_window)

    t = sub.add_parser("dgt", help="transform a WAV file to a coefficient "
                                   "grid (CSV) or heatmap (SVG)")
    t.add_argument("--in", dest="infile", metavar="WAV")
    t.add_argument("--window",
                   help="window kind, or path to a saved window file")
    t.add_argument("--a", type=int)
    t.add_argument("--b", type=int)
    t.add_argument("--real", action="store_true",
                   help="keep only nonnegative-frequency rows")
    t.add_argument("-o", "--out", metavar="CSV|SVG")
    t.set_defaults(func=cmd_dgt)

    n = sub.add_parser("denoise", help="add seeded noise to a WAV file, "
                                       "denoise it, and report the error")
    n.add_argument("--in", dest="infile", metavar="WAV")
    n.add_argument("--window", default="star", choices=WINDOW_KINDS)
    n.add_argument("--a", type=int)
    n.add_argument("--b", type=int)
    n.add_argument("--noise", default="gaussian", choices=NOISE_KINDS)
    n.add_argument("--sigma", type=float, default=0.001)
    n.add_argument("--eta", type=float, default=None,
                   help="residual budget; defaults to the exact noise norm")
    n.add_argument("--seed", type=int, default=0)
    n.add_argument("--mu-from", default="x", choices=("x", "y"))
    n.add_argument("--max-iter", type=int, default=2000)
    n.add_argument("--tol", type=float, default=1e-6)
    n.add_argument("--cache-dir", default=None)
    n.add_argument("-o", "--out", metavar="WAV")
    n.set_defaults(func=cmd_denoise)

    b = sub.add_parser("bench", help="multi-instance experiment runners")
    bsub = b.add_subparsers(dest="bench_command", metavar="DESIGN")

    def bench_help(_args):
        b.print_help(sys.stderr)
        return 1

    b.set_defaults(func=bench_help)

    s = bsub.add_parser("sweep-sigma",
                        help="MSE against noise level for several windows")
    s.add_argument("--in", dest="infile", metavar="WAV")
    s.add_argument("--a", type=int)
    s.add_argument("--b", type=int)
    s.add_argument("--windows", type=_comma_list, default=DEFAULT_WINDOWS)
    s.add_argument("--noise-kinds", type=_comma_list, default=NOISE_KINDS)
    s.add_argument("--sigma-count", type=int, default=100,
                   help="points on the 0.001..0.01 grid")
    s.add_argument("--trials", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-iter", type=int, default=2000)
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("-o", "--out", metavar="BASE",
                   help="writes BASE.csv, BASE.json, BASE_<noise>.svg")
    s.set_defaults(func=cmd_sweep)

    g = bsub.add_parser("grid",
                        help=f"window-by-lattice grid at the fixed "
                             f"dimension {GRID_DIM}")
    g.add_argument("--in", dest="infile", metavar="WAV")
    g.add_argument("--windows", type=_comma_list, default=DEFAULT_WINDOWS)
    g.add_argument("--noise", default="gaussian", choices=NOISE_KINDS)
    g.add_argument("--sigma", type=float, default=0.001)
    g.add_argument("--trials", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--fast", action="store_true",
                   help="cap the solver at 40 iterations with tol 1e-4 "
                        "for a bounded smoke run")
    # grid solves are large; the default budget targets a couple of
    # hours for the full 4x5 grid on one core
    g.add_argument("--max-iter", type=int, default=300)
    g.add_argument("--tol", type=float, default=1e-6)
    g.add_argument("--cache-dir", default=None)
    g.add_argument("-o", "--out", metavar="BASE")
    g.set_defaults(func=cmd_grid)

    st = sub.add_parser("selftest", help="quick end-to-end sanity checks")
    st.set_defaults(func=cmd_selftest)

    p._subparsers_index = {"check": c, "dims": d, "window": w, "dgt": t,
                           "denoise": n, "sweep-sigma": s, "grid": g,
                           "selftest": st}
    return p


def cmd_check(args) -> int:
    ok, reasons = check_admissible(args.L, args.mode)
    f = factorize(args.L)
    factors = " * ".join(f"{q}^{e}" if e > 1 else str(q)
                         for q, e in sorted(f.factors.items()))
    print(f"L = {args.L} = {factors or args.L}")
    verdict = "admissible" if ok else "not admissible"
    print(f"{verdict} ({args.mode.value} mode)")
    for r in reasons:
        print(f"  - {r}")
    return 0 if ok else 1


def cmd_dims(args) -> int:
    cands = enumerate_dimensions(args.T, args.mode,
                                 prime_cap=args.prime_cap, top=args.top)
    print(f"{'L':>8}  {'strict':>6}  factorization")
    for c in cands:
        factors = " * ".join(f"{q}^{e}" if e > 1 else str(q)
                             for q, e in sorted(c.factorization.factors.items()))
        print(f"{c.L:>8}  {'yes' if c.strict else 'no':>6}  {factors}")
    return 0


def cmd_window(args) -> int:
    _require(args, "kind", "L", "out")
    w = make_window(args.kind, args.L, seed=args.seed, theta=args.theta)
    save_window(args.out, w.values, args.seed)
    print(f"wrote {args.kind} window, L={args.L}, to {args.out}")
    return 0


def _window_from_arg(arg: str, L: int, cache_dir=None) -> Window:
    if arg in WINDOW_KINDS:
        return make_window(arg, L, cache_dir=cache_dir)
    if os.path.exists(arg):
        vec, seed = load_window(arg, expect_L=L)
        return Window(vec, "file", {"path": arg, "seed": seed})
    raise UnsupportedFormat(
        f"{arg!r} is neither a window kind {WINDOW_KINDS} nor a file")


def cmd_dgt(args) -> int:
    _require(args, "infile", "window", "a", "b", "out")
    x, sr = load_wav(args.infile)
    L = x.shape[0]
    lattice = GaborLattice(L, args.a, args.b)
    window = _window_from_arg(args.window, L)
    coef = (dgt_real if args.real else dgt)(x, window, lattice)
    ext = os.path.splitext(args.out)[1].lower()
    if ext == ".csv":
        coefficients_to_csv(coef, args.out)
    elif ext == ".svg":
        coefficients_to_svg(coef, args.out)
    else:
        raise UnsupportedFormat(f"output must be .csv or .svg, got {ext!r}")
    M, N = coef.grid.shape
    print(f"wrote {M}x{N} grid ({sr} Hz input) to {args.out}")
    return 0


def cmd_denoise(args) -> int:
    _require(args, "infile", "a", "b", "out")
    x, sr = load_wav(args.infile)
    rec = prepare_signal(os.path.basename(args.infile), x, sr)
    lattice = GaborLattice(rec.L, args.a, args.b)
    window = make_window(args.window, rec.L, cache_dir=args.cache_dir)
    cfg = SolverConfig(max_iter=args.max_iter, tol=args.tol)
    seed = pair_seed(args.seed, 0, args.noise, 0)
    inst = denoise_instance(rec.x, window, lattice, args.noise, args.sigma,
                            seed, eta=args.eta, mu_from=args.mu_from,
                            config=cfg)
    write_wav(args.out, inst.xhat, sr)
    e = gen_noise(rec.L, args.noise, args.sigma, seed)
    print(f"L={rec.L} (from {rec.true_dim} samples), lattice "
          f"({args.a},{args.b}), window {args.window}")
    print(f"observation mse: {mse(rec.x, rec.x + e):.6e}")
    print(f"denoised mse:    {inst.mse:.6e}")
    print(f"solver: {inst.solver.iterations} iterations, "
          f"converged={inst.solver.converged}")
    return 0


def _emit(report, base: str) -> None:
    report_to_csv(report, base + ".csv")
    report_to_json(report, base + ".json")
    for path in report_to_svg(report, base):
        print(f"wrote {path}")
    print(f"wrote {base}.csv")
    print(f"wrote {base}.json")


def cmd_sweep(args) -> int:
    _require(args, "infile", "a", "b", "out")
    x, sr = load_wav(args.infile)
    rec = prepare_signal(os.path.basename(args.infile), x, sr)
    lattice = GaborLattice(rec.L, args.a, args.b)
    cfg = SolverConfig(max_iter=args.max_iter, tol=args.tol)
    sigmas = np.linspace(0.001, 0.01, args.sigma_count)
    report = run_sigma_sweep(rec, lattice, window_kinds=args.windows,
                             noise_kinds=args.noise_kinds, sigmas=sigmas,
                             trials=args.trials, base_seed=args.seed,
                             config=cfg)
    _emit(report, args.out)
    return 0


def cmd_grid(args) -> int:
    _require(args, "infile", "out")
    x, sr = load_wav(args.infile)
    if x.shape[0] < GRID_DIM:
        raise UnsupportedFormat(
            f"grid input needs at least {GRID_DIM} samples, "
            f"got {x.shape[0]}")
    rec = SignalRecord(os.path.basename(args.infile),
                       np.ascontiguousarray(x[:GRID_DIM]), sr,
                       x.shape[0], GRID_DIM)
    if args.fast:
        cfg = SolverConfig(max_iter=40, tol=1e-4)
    else:
        cfg = SolverConfig(max_iter=args.max_iter, tol=args.tol)
    report = run_lattice_grid(rec, pairs=GRID_PAIRS,
                              window_kinds=args.windows,
                              noise_kind=args.noise, sigma=args.sigma,
                              trials=args.trials, base_seed=args.seed,
                              config=cfg, cache_dir=args.cache_dir)
    _emit(report, args.out)
    return 0


def cmd_selftest(args) -> int:
    from . import _kernels
    from .solver import DenoiseProblem, smoothing_mu, solve_abpdn
    from .zauner import star_window, weil_unitary, zauner_matrix

    failures = 0

    def check(name, ok, detail=""):
        nonlocal failures
        tag = "ok" if ok else "FAIL"
        line = f"{tag:>4}  {name}"
        if detail:
            line += f"  ({detail})"
        print(line)
        failures += 0 if ok else 1

    check("kernel backend", _kernels.BACKEND in ("cython", "numpy"),
          _kernels.BACKEND)
    ok, _ = check_admissible(33915, AdmissibilityMode.STRICT)
    check("33915 strictly admissible", ok)

    U = weil_unitary(zauner_matrix(15))
    dev = float(np.abs(U @ U.conj().T - np.eye(15)).max())
    check("unitarity at L=15", dev < 1e-10, f"dev {dev:.2e}")

    sw = star_window(15)
    check("eigenvector residual at L=15", sw.residual < 1e-8,
          f"res {sw.residual:.2e}")

    rng = np.random.default_rng(0)
    x = rng.standard_normal(39)
    lattice = GaborLattice(39, 3, 3)
    g = make_window("gauss", 39)
    from .gabor import GaborAnalysisOp, dgt_naive
    fast = dgt(x, g, lattice).grid
    slow = dgt_naive(x, g, lattice).grid
    dev = float(np.abs(fast - slow).max())
    check("fast transform matches direct sum", dev < 1e-10, f"dev {dev:.2e}")

    op = GaborAnalysisOp(g, lattice, real_mode=True)
    dev = op.adjoint_probe(seed=1)
    check("adjoint identity (real mode)", dev < 1e-10, f"dev {dev:.2e}")

    # 6 cycles is a multiple of b=3, so the tone sits on the grid
    xs = 0.5 * np.sin(2 * np.pi * 6 * np.arange(39) / 39)
    e = gen_noise(39, "gaussian", 0.05, 7)
    y = xs + e
    prob = DenoiseProblem(op, y, float(np.linalg.norm(e)),
                          smoothing_mu(op, xs))
    res = solve_abpdn(prob, SolverConfig(max_iter=600, tol=1e-6))
    improved = mse(xs, res.x) < mse(xs, y)
    check("denoising beats the observation", improved,
          f"{mse(xs, res.x):.3e} vs {mse(xs, y):.3e}")

    if failures:
        print(f"{failures} check(s) failed")
        return 2
    print("all checks passed")
    return 0


def _apply_config(parser: Parser, argv) -> None:
    path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
    if path is None:
        return
    with open(path) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise UnsupportedFormat(f"{path}: config must be a JSON object")
    clean = {k.replace("-", "_"): v for k, v in cfg.items()
             if k not in ("func", "command", "bench_command")}
    parser.set_defaults(**clean)
    for sp in parser._subparsers_index.values():
        known = {a.dest for a in sp._actions}
        sp.set_defaults(**{k: v for k, v in clean.items() if k in known})


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            parser.print_help()
            return 1
        return args.func(args)
    except SystemExit as exc:
        # argparse help/version exit 0; usage problems exit 1 via Parser
        return int(exc.code or 0)
    except NUMERIC_ERRORS as exc:
        print(f"stargabor: numerical failure: {exc}", file=sys.stderr)
        return 2
    except USAGE_ERRORS as exc:
        print(f"stargabor: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
