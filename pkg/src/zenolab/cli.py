"""Command-line front end: ``zenolab {curve,gamma,scan-cutoff,zeno} [options]``.

Options may also come from a ``key = value`` file given with --config (keys
are the long option names without dashes, e.g. ``mi = 1.0`` or
``rel-tol = 1e-9``); command-line flags take precedence.

Exit status: 0 success, 2 some points did not converge, 64 usage error,
65 domain error (closed decay channel).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, model_a, model_b, qm_reference
from .analysis import SHORT_TIME_WINDOW, SurvivalCurve, decay_law_exponent
from .errors import BelowThreshold, InsufficientPoints, NotConverged
from .kinematics import DecayModelSpec, Variant
from .qm_reference import SpectralDensity
from .quadrature import QuadratureSettings

EXIT_OK = 0
EXIT_PARTIAL = 2
EXIT_USAGE = 64
EXIT_DOMAIN = 65

DEFAULT_MASSES = {"a": (1.0, 0.1, 0.3, 0.1), "b": (1.0, 0.2, 0.2, 1.0), "qm": (1.0, 0.1, 0.3, 0.1)}
DEFAULT_CUTOFFS = tuple(float(c) for c in np.logspace(3, 4, 8))
DEFAULTS = {
    "model": "a", "tmin": 0.0, "tmax": 1.0, "points": 11, "time": 1.0, "pi": 0.0,
    "density": "gaussian:0,1", "rel-tol": 1e-10, "abs-tol": 1e-13, "format": "csv", "out": "-",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    model: str = "a"
    m_i: float = 1.0
    m_a: float = 0.1
    m_b: float = 0.3
    lam: float = 0.1
    p_i: float = 0.0
    density: str = "gaussian:0,1"
    t_min: float = 0.0
    t_max: float = 1.0
    n_points: int = 11
    time: float = 1.0
    cutoff: float | None = None
    cutoffs: tuple = DEFAULT_CUTOFFS
    rel_tol: float = 1e-10
    abs_tol: float = 1e-13
    fmt: str = "csv"
    out: str = "-"

    def validate(self) -> None:
        if self.model not in ("a", "b", "qm"):
            raise UsageError(f"unknown model {self.model!r}")
        if not (self.t_min >= 0 and self.t_max > self.t_min and self.n_points >= 2):
            raise UsageError("need 0 <= tmin < tmax and points >= 2")
        if self.fmt not in ("csv", "json"):
            raise UsageError(f"unknown format {self.fmt!r}")
        try:
            self.settings()
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    def settings(self) -> QuadratureSettings:
        return QuadratureSettings(rel_tol=self.rel_tol, abs_tol=self.abs_tol)

    def spec(self, model: str | None = None) -> DecayModelSpec:
        variant = Variant.BOSON_DECAY if (model or self.model) == "b" else Variant.FERMION_DECAY
        try:
            with warnings.catch_warnings():
                # closed channels are reported as exit 65 by the decay-rate commands
                warnings.simplefilter("ignore", UserWarning)
                return DecayModelSpec(self.m_i, self.m_a, self.m_b, self.lam, variant, self.p_i)
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    def density_spec(self) -> SpectralDensity:
        return parse_density(self.density)

    def echo(self) -> dict:
        """Every parameter that influences the output, for provenance."""
        return {
            "model": self.model, "mi": self.m_i, "ma": self.m_a, "mb": self.m_b,
            "lambda": self.lam, "pi": self.p_i, "density": self.density,
            "tmin": self.t_min, "tmax": self.t_max, "points": self.n_points,
            "time": self.time, "cutoff": self.cutoff, "cutoffs": list(self.cutoffs),
            "rel-tol": self.rel_tol, "abs-tol": self.abs_tol, "version": __version__,
        }


def parse_density(text: str) -> SpectralDensity:
    kind, _, rest = text.partition(":")
    try:
        if kind == "file":
            return SpectralDensity.from_file(rest)
        nums = [float(x) for x in rest.split(",") if x.strip()]
        if kind == "gaussian" and len(nums) == 2:
            return SpectralDensity.gaussian(*nums)
        if kind == "point" and len(nums) == 1:
            return SpectralDensity.point_mass(*nums)
        if kind == "twopoint" and len(nums) == 2:
            return SpectralDensity.two_point(*nums)
    except (ValueError, OSError) as exc:
        raise UsageError(f"bad density {text!r}: {exc}") from None
    raise UsageError(
        f"bad density {text!r}; use gaussian:E0,sigma | point:E0 | twopoint:E0,delta | file:PATH"
    )


def read_config_file(path: str) -> dict:
    values = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        values[key.strip().lstrip("-").replace("_", "-")] = value.strip()
    return values


def _float_list(text) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(float(x) for x in text)
    try:
        return tuple(float(x) for x in str(text).split(",") if x.strip())
    except ValueError:
        raise UsageError(f"bad number list {text!r}") from None


def build_config(args: argparse.Namespace) -> RunConfig:
    file_values = read_config_file(args.config) if args.config else {}
    known = {"model", "mi", "ma", "mb", "lambda", "pi", "tmin", "tmax", "points", "time",
             "cutoff", "cutoffs", "density", "rel-tol", "abs-tol", "format", "out"}
    unknown = set(file_values) - known
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")

    def pick(key, cast, fallback=None):
        flag = getattr(args, "lambda_" if key == "lambda" else key.replace("-", "_"))
        raw = flag if flag is not None else file_values.get(key, DEFAULTS.get(key, fallback))
        if raw is None:
            return None
        try:
            return cast(raw)
        except ValueError:
            raise UsageError(f"bad value for {key}: {raw!r}") from None

    model = pick("model", str)
    if model not in DEFAULT_MASSES:
        raise UsageError(f"unknown model {model!r}")
    mi, ma, mb, lam = DEFAULT_MASSES[model]
    cutoffs = pick("cutoffs", _float_list, DEFAULT_CUTOFFS)
    cfg = RunConfig(
        model=model,
        m_i=pick("mi", float, mi),
        m_a=pick("ma", float, ma),
        m_b=pick("mb", float, mb),
        lam=pick("lambda", float, lam),
        p_i=pick("pi", float),
        density=pick("density", str),
        t_min=pick("tmin", float),
        t_max=pick("tmax", float),
        n_points=pick("points", int),
        time=pick("time", float),
        cutoff=pick("cutoff", float),
        cutoffs=cutoffs,
        rel_tol=pick("rel-tol", float),
        abs_tol=pick("abs-tol", float),
        fmt=pick("format", str),
        out=pick("out", str),
    )
    cfg.validate()
    return cfg


def _num(x) -> str:
    return repr(float(x))


def _emit(cfg: RunConfig, command: str, columns: list[str], rows: list[list], summary: dict) -> str:
    if cfg.fmt == "json":
        doc = {
            "command": command,
            "meta": cfg.echo(),
            "summary": summary,
            "samples": {c: [r[i] for r in rows] for i, c in enumerate(columns)},
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    buf.write(f"# zenolab {command}\n")
    for key, value in sorted(cfg.echo().items()):
        buf.write(f"# {key}={json.dumps(value)}\n")
    for key, value in sorted(summary.items()):
        buf.write(f"# result.{key}={json.dumps(value)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_num(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _time_grid(cfg: RunConfig) -> np.ndarray:
    return np.linspace(cfg.t_min, cfg.t_max, cfg.n_points)


def cmd_curve(cfg: RunConfig) -> tuple[str, int]:
    ts = _time_grid(cfg)
    settings = cfg.settings()
    if cfg.model == "qm":
        curve = qm_reference.survival_curve(cfg.density_spec(), ts, settings)
    elif cfg.model == "a":
        curve = model_a.survival_curve(cfg.spec(), ts, settings)
    else:
        if cfg.cutoff is None:
            raise UsageError("model b needs --cutoff (its survival probability is UV divergent)")
        if cfg.p_i != 0.0:
            raise UsageError("model b is rest-frame only (--pi 0)")
        curve = model_b.survival_curve(cfg.spec(), ts, cfg.cutoff, settings)
    rows = [[float(t), float(p), "true" if ok else "false"]
            for t, p, ok in zip(curve.ts, curve.ps, curve.converged)]
    status = EXIT_OK if np.all(curve.converged) else EXIT_PARTIAL
    summary = {"all_converged": bool(np.all(curve.converged))}
    return _emit(cfg, "curve", ["t", "P", "converged"], rows, summary), status


def cmd_gamma(cfg: RunConfig) -> tuple[str, int]:
    if cfg.model == "qm":
        raise UsageError("gamma needs model a or b")
    spec = cfg.spec()
    if cfg.model == "a":
        closed = model_a.decay_rate_closed(spec)
        numeric = model_a.decay_rate_numeric(spec, cfg.settings())
    else:
        closed = model_b.formal_decay_rate(spec)
        numeric = model_b.formal_decay_rate_numeric(spec, cfg.settings())
    discrepancy = abs(closed - numeric) / abs(closed)
    rows = [[cfg.model, closed, numeric, discrepancy]]
    summary = {"gamma_closed": closed, "gamma_numeric": numeric, "rel_discrepancy": discrepancy}
    return _emit(cfg, "gamma", ["model", "gamma_closed", "gamma_numeric", "rel_discrepancy"],
                 rows, summary), EXIT_OK


def cmd_scan_cutoff(cfg: RunConfig) -> tuple[str, int]:
    if cfg.model != "b":
        raise UsageError("scan-cutoff needs --model b")
    try:
        scan = model_b.divergence_scan(cfg.spec(), cfg.time, cfg.cutoffs, cfg.settings())
    except ValueError as exc:
        if isinstance(exc, BelowThreshold):
            raise
        raise UsageError(str(exc)) from None
    rows = [[float(c), float(v), float(d)]
            for c, v, d in zip(scan.cutoffs, scan.values, scan.doubled_values)]
    summary = {"classification": scan.classification.value, "fitted_slope": scan.fitted_slope,
               "asymptotic_slope": model_b.ASYMPTOTIC_CUTOFF_SLOPE}
    return _emit(cfg, "scan-cutoff", ["cutoff", "xi3", "xi3_at_double_cutoff"], rows, summary), EXIT_OK


def _verdict(curve: SurvivalCurve, window, abs_tol: float):
    if np.all(1.0 - curve.ps <= abs_tol):
        return None, "no decay"
    exponent = decay_law_exponent(curve, window)
    if abs(exponent - 1.0) < 0.25:
        return exponent, "linear"
    if abs(exponent - 2.0) < 0.25:
        return exponent, "quadratic"
    return exponent, f"power {exponent:.3f}"


def cmd_zeno_compare(cfg: RunConfig) -> tuple[str, int]:
    settings = cfg.settings()
    spec = cfg.spec("a")
    lo, hi = SHORT_TIME_WINDOW
    n = max(cfg.n_points, 3)
    a_window = (lo / spec.m_i, hi / spec.m_i)
    a_curve = model_a.survival_curve(spec, np.geomspace(*a_window, n), settings)
    density = cfg.density_spec()
    spread = qm_reference.energy_dispersion(density, settings)
    scale = 1.0 / spread if spread > 0 else 1.0
    qm_window = (lo * scale, hi * scale)
    qm_curve = qm_reference.survival_curve(density, np.geomspace(*qm_window, n), settings)
    rows = []
    summary = {}
    for name, curve, window in (("a", a_curve, a_window), ("qm", qm_curve, qm_window)):
        exponent, verdict = _verdict(curve, window, cfg.abs_tol)
        rows.append([name, "nan" if exponent is None else float(exponent), verdict,
                     float(window[0]), float(window[1])])
        summary[f"{name}_verdict"] = verdict
    status = EXIT_OK if np.all(a_curve.converged) else EXIT_PARTIAL
    return _emit(cfg, "zeno", ["model", "exponent", "verdict", "t_lo", "t_hi"], rows, summary), status


COMMANDS = {"curve": cmd_curve, "gamma": cmd_gamma, "scan-cutoff": cmd_scan_cutoff,
            "zeno": cmd_zeno_compare}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model")
    g.add_argument("--model", choices=["a", "b", "qm"], help="a: fermion decay, b: boson decay, "
                   "qm: non-relativistic reference (default a)")
    g.add_argument("--mi", type=float, help="parent mass (default 1)")
    g.add_argument("--ma", type=float, help="scalar/first daughter mass (default 0.1 for a, 0.2 for b)")
    g.add_argument("--mb", type=float, help="fermion/second daughter mass (default 0.3 for a, 0.2 for b)")
    g.add_argument("--lambda", dest="lambda_", type=float,
                   help="coupling (default 0.1 for a, 1 for b)")
    g.add_argument("--pi", type=float, help="parent momentum magnitude, model a only (default 0)")
    g.add_argument("--density", help="QM density: gaussian:E0,sigma | point:E0 | twopoint:E0,delta "
                   "| file:PATH (default gaussian:0,1)")
    g = common.add_argument_group("grid")
    g.add_argument("--tmin", type=float, help="first time (default 0)")
    g.add_argument("--tmax", type=float, help="last time (default 1)")
    g.add_argument("--points", type=int, help="number of times (default 11)")
    g.add_argument("--time", type=float, help="fixed time for scan-cutoff (default 1)")
    g.add_argument("--cutoff", type=float, help="radial momentum cutoff for model b curves")
    g.add_argument("--cutoffs", help="comma list of cutoffs for scan-cutoff "
                   "(default 8 log-spaced in [1e3, 1e4])")
    g = common.add_argument_group("numerics and output")
    g.add_argument("--rel-tol", type=float, help="relative quadrature tolerance (default 1e-10)")
    g.add_argument("--abs-tol", type=float, help="absolute quadrature tolerance (default 1e-13)")
    g.add_argument("--format", choices=["csv", "json"], help="output format (default csv)")
    g.add_argument("--out", help="output path, '-' for stdout (default)")
    g.add_argument("--config", help="key = value file; flags override it")

    parser = _Parser(prog="zenolab", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("curve", parents=[common], help="survival probability on a uniform time grid")
    sub.add_parser("gamma", parents=[common], help="closed-form and numeric decay rate")
    sub.add_parser("scan-cutoff", parents=[common], help="cutoff dependence of model-b Xi_3")
    sub.add_parser("zeno", parents=[common], help="short-time exponent, model a vs QM")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        text, status = COMMANDS[args.command](cfg)
    except (UsageError, InsufficientPoints) as exc:
        print(f"zenolab: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BelowThreshold as exc:
        print(f"zenolab: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NotConverged as exc:
        print(f"zenolab: {exc}", file=sys.stderr)
        return EXIT_PARTIAL
    if cfg.out == "-":
        sys.stdout.write(text)
    else:
        Path(cfg.out).write_text(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
