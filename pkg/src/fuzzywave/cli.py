"""Command-line driver.

Subcommands: simulate, fit, bf, robust, select-j.  Every results file is a
JSON document echoing the fully resolved configuration; curves also go to a
flat ``x,fit,sd`` CSV.  All outputs are written atomically.

Exit codes: 0 ok, 2 missing input file, 3 malformed input file,
4 invalid configuration, 5 numerical failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .conjugate import DegeneratePosterior, QuadratureConfig, curve, fit_conjugate
from .data import DataFormatError, Dataset, builtin_g0, format_xy, interpolated_g0, read_dataset, read_xy, simulate, simulate_seasonal
from .decomposition import CoefficientVector, _basis_columns
from .io import atomic_write_text, dumps
from .mcmc import ChainConfig, run_chain
from .membership import KINDS, HyperPrior, MembershipSpec
from .model_check import bayes_factor_from_problem, select_resolution
from .problem import build_problem
from .robustness import MCConfig, solve_band

EXIT_OK, EXIT_MISSING, EXIT_PARSE, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3, 4, 5
BUILTIN_G0 = ("cos", "vee", "zero", "seasonal")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    data: str | None = None
    out: str | None = None
    curve_out: str | None = None
    samples_out: str | None = None
    family: str = "daubechies2"
    J: int | None = None
    domain: tuple[float, float] = (0.0, 1.0)
    g0: str = "cos"
    membership: str = "gaussian"
    q: float = 5.0
    delta: float = 1.0
    a: float = 40.0
    b: float = 3.0
    c: float = 2.0
    k: float = 1.5
    kernel: str = "as-printed"
    seed: int | None = None
    n: int = 20
    sigma2: float = 0.1
    signal: str = "cos"
    grid: int = 0
    chain: ChainConfig | None = None
    c1: float = 1.0
    c2: float = 1.0
    mc_samples: int = 20000
    weight: float = 1.0
    J_min: int = 0
    J_max: int | None = None
    quad_nodes: int = 201

    @property
    def stochastic(self) -> bool:
        return self.command in ("simulate", "robust") or (self.command == "fit" and self.membership != "gaussian")

    def validate(self) -> None:
        if self.stochastic and self.seed is None:
            raise UsageError(f"--seed is required for '{self.command}'")
        if self.membership not in KINDS:
            raise UsageError(f"membership must be one of {KINDS}")
        if self.J is not None and self.J < 0:
            raise UsageError("J must be non-negative")
        if self.domain[0] >= self.domain[1]:
            raise UsageError("domain must satisfy lo < hi")
        if self.command == "simulate" and (self.n < 1 or self.sigma2 < 0):
            raise UsageError("simulate needs n >= 1 and sigma2 >= 0")
        if self.grid < 0:
            raise UsageError("grid must be non-negative")
        if self.command == "robust" and not 0 < self.c1 <= self.c2:
            raise UsageError("need 0 < c1 <= c2")
        if self.command != "simulate" and self.data is None:
            raise UsageError("--data is required")
        if self.out is None:
            raise UsageError("--out is required")
        # constructing these runs their own validation
        self.hyper()

    def hyper(self) -> HyperPrior:
        return HyperPrior(self.a, self.b, self.c, self.k, self.kernel)

    def echo(self) -> dict:
        d = asdict(self)
        d["domain"] = list(self.domain)
        return d


def _resolve_g0(spec: str):
    if spec in BUILTIN_G0:
        return builtin_g0(spec)
    path = Path(spec)
    if not path.exists():
        raise FileNotFoundError(f"g0 is neither a builtin {BUILTIN_G0} nor an existing file: {spec}")
    xk, gk = read_xy(path, columns=("x", "g0"))
    return interpolated_g0(xk, gk)


def _problem(cfg: RunConfig, dataset: Dataset):
    return build_problem(dataset, _resolve_g0(cfg.g0), family=cfg.family, J=cfg.J, domain=cfg.domain)


def _plan_info(problem) -> dict:
    plan = problem.plan
    return {"family": plan.family.name, "J": plan.J, "p": plan.p, "k_ranges": [list(r) for r in plan.k_ranges]}


def _curve_x(cfg: RunConfig, dataset: Dataset) -> np.ndarray:
    if cfg.grid > 0:
        return np.linspace(cfg.domain[0], cfg.domain[1], cfg.grid)
    return np.sort(dataset.x)


def _write_curve(path, x, fit, sd) -> None:
    lines = ["x,fit,sd"] + [f"{a!r},{b!r},{c!r}" for a, b, c in zip(x.tolist(), fit.tolist(), sd.tolist())]
    atomic_write_text(path, "\n".join(lines) + "\n")


def cmd_simulate(cfg: RunConfig) -> dict:
    if cfg.signal == "seasonal":
        ds = simulate_seasonal(cfg.n, cfg.sigma2, cfg.seed)
    else:
        ds = simulate(cfg.n, cfg.sigma2, cfg.seed, signal=cfg.signal, domain=cfg.domain)
    atomic_write_text(cfg.out, format_xy(ds.x, ds.y))
    return {"n": ds.n, "data": cfg.out}


def cmd_fit(cfg: RunConfig) -> dict:
    ds = read_dataset(cfg.data)
    problem = _problem(cfg, ds)
    hp = cfg.hyper()
    xs = _curve_x(cfg, ds)
    if cfg.membership == "gaussian":
        post = fit_conjugate(problem, hp, x_out=ds.x, quad=QuadratureConfig(cfg.quad_nodes))
        mean, cov = post.mean, post.cov
        _, fit, sd = curve(mean, cov, problem.table, xs)
        fitted_data = post.fitted
        extra = dict(post.extras)
        theta_sd = post.sd
    else:
        kw = {"q": cfg.q} if cfg.membership == "student-t" else {"delta": cfg.delta}
        spec = MembershipSpec(cfg.membership, problem.theta0, problem.gamma, **kw)
        chain_cfg = cfg.chain or ChainConfig(seed=cfg.seed)
        summary, samples = run_chain(problem, spec, hp, chain_cfg, sample_path=cfg.samples_out)
        p = problem.p
        mean = CoefficientVector(summary.mean[:p], problem.plan)
        rows = _basis_columns(problem.plan, problem.table, xs)
        draws = samples[:, :p] @ rows.T
        fit, sd = rows @ mean.values, draws.std(axis=0, ddof=1)
        fitted_data = _basis_columns(problem.plan, problem.table, ds.x) @ mean.values
        theta_sd = np.sqrt(summary.var[:p])
        extra = {"names": summary.names, "chain_mean": summary.mean, "ess": summary.ess, "mc_se": summary.mc_se,
                 "accept_rate": summary.accept_rate, "n_kept": summary.n_kept}
    if cfg.curve_out:
        _write_curve(cfg.curve_out, xs, fit, sd)
    return {"plan": _plan_info(problem), "theta_mean": mean.values, "theta_sd": theta_sd,
            "theta0": problem.theta0.values, "fitted_at_data": {"x": ds.x, "fit": fitted_data},
            "curve": {"x": xs, "fit": fit, "sd": sd}, "summary": extra}


def cmd_bf(cfg: RunConfig) -> dict:
    problem = _problem(cfg, read_dataset(cfg.data))
    res = bayes_factor_from_problem(problem, cfg.hyper(), QuadratureConfig(cfg.quad_nodes))
    return {"plan": _plan_info(problem), "bayes_factor": {**asdict(res), "B01": res.B01}}


def cmd_robust(cfg: RunConfig) -> dict:
    problem = _problem(cfg, read_dataset(cfg.data))
    band = solve_band(problem, cfg.hyper(), cfg.c1, cfg.c2, MCConfig(cfg.mc_samples, cfg.seed, cfg.weight),
                      QuadratureConfig(cfg.quad_nodes))
    return {"plan": _plan_info(problem), "band": {**asdict(band), "width": band.width}}


def cmd_select_j(cfg: RunConfig) -> dict:
    ds = read_dataset(cfg.data)
    from .problem import scaling_table
    from .wavelets import max_resolution

    fam = scaling_table(cfg.family).family
    j_hi = cfg.J_max if cfg.J_max is not None else max_resolution(fam, cfg.domain[1] - cfg.domain[0], ds.n)
    if j_hi < cfg.J_min:
        raise UsageError("empty resolution range")
    best, scores = select_resolution(ds, _resolve_g0(cfg.g0), cfg.hyper(), range(cfg.J_min, j_hi + 1),
                                     QuadratureConfig(cfg.quad_nodes), family=cfg.family, domain=cfg.domain)
    return {"J_best": best, "log_m1": {str(j): v for j, v in scores.items()}}


COMMANDS = {"simulate": cmd_simulate, "fit": cmd_fit, "bf": cmd_bf, "robust": cmd_robust, "select-j": cmd_select_j}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fuzzywave", description="Wavelet smoothing with fuzzy prior guesses.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, data=True):
        p.add_argument("--out", required=True, help="results file (JSON; CSV for simulate)")
        p.add_argument("--seed", type=int)
        p.add_argument("--domain", type=float, nargs=2, default=(0.0, 1.0), metavar=("LO", "HI"))
        if data:
            p.add_argument("--data", required=True, help="x,y CSV")
            p.add_argument("--g0", default="cos", help=f"builtin {BUILTIN_G0} or an x,g0 CSV")
            p.add_argument("--family", default="daubechies2")
            p.add_argument("--J", type=int, default=None, help="resolution level (default: largest supported)")
            for name, default in (("a", 40.0), ("b", 3.0), ("c", 2.0), ("k", 1.5)):
                p.add_argument(f"--{name}", type=float, default=default)
            p.add_argument("--kernel", choices=("as-printed", "textbook"), default="as-printed")
            p.add_argument("--quad-nodes", type=int, default=201)

    p = sub.add_parser("simulate", help="draw a synthetic dataset")
    common(p, data=False)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--sigma2", type=float, default=0.1)
    p.add_argument("--signal", default="cos", choices=BUILTIN_G0)

    p = sub.add_parser("fit", help="posterior of the curve")
    common(p)
    p.add_argument("--membership", choices=KINDS, default="gaussian")
    p.add_argument("--q", type=float, default=5.0)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--curve-out")
    p.add_argument("--samples-out")
    p.add_argument("--grid", type=int, default=0, help="curve on this many grid points (0: sorted data abscissae)")
    p.add_argument("--iters", type=int, default=20000)
    p.add_argument("--burn-in", type=int, default=5000)
    p.add_argument("--thin", type=int, default=5)

    p = sub.add_parser("bf", help="Bayes factor of g = g0 against g != g0")
    common(p)

    p = sub.add_parser("robust", help="Bayes-factor range over a density-ratio class")
    common(p)
    p.add_argument("--c1", type=float, default=1.0)
    p.add_argument("--c2", type=float, default=1.0)
    p.add_argument("--mc-samples", type=int, default=20000)
    p.add_argument("--weight", type=float, default=1.0, help="Gaussian membership exp(-weight * rho^2)")

    p = sub.add_parser("select-j", help="resolution maximizing the marginal likelihood")
    common(p)
    p.add_argument("--J-min", type=int, default=0)
    p.add_argument("--J-max", type=int, default=None)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    names = {f.name for f in dataclasses.fields(RunConfig)}
    values = {key: val for key, val in vars(args).items() if key in names}
    values["domain"] = tuple(args.domain)
    cfg = RunConfig(**values)
    if args.command == "fit" and cfg.membership != "gaussian" and cfg.seed is not None:
        try:
            cfg.chain = ChainConfig(iters=args.iters, burn_in=args.burn_in, thin=args.thin, seed=cfg.seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if args.command == "robust":
        cfg.mc_samples = args.mc_samples
    return cfg


def run(argv=None) -> int:
    try:
        cfg = config_from_args(build_parser().parse_args(argv))
        cfg.validate()
        result = COMMANDS[cfg.command](cfg)
        # simulate writes its CSV to --out and the config echo beside it
        target = cfg.out + ".json" if cfg.command == "simulate" else cfg.out
        atomic_write_text(target, dumps({"config": cfg.echo(), "version": __version__, **result}))
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except DataFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ArithmeticError, np.linalg.LinAlgError, DegeneratePosterior) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def main() -> None:
    sys.exit(run())
