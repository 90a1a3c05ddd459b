"""qpt-echo command line: run one quench, a sweep, a fit or the oracle checks.

Exit codes: 0 success, 2 usage error, 3 numerical error. Failures print a
one-line JSON record on stderr.
"""

from __future__ import annotations

import argparse
import configparser
import itertools
import json
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import fitscale, gaussian, io, pairprod, semiclassics, smalled
from .spectra import (DickeParams, IsingParams, QuenchSpec, XYParams, dicke_gap_coefficient,
                      dicke_mode_energies)

EXIT_USAGE = 2
EXIT_NUMERICAL = 3

MODELS = ("ising", "xy", "dicke-effective", "dicke-two-mode", "lmg", "semiclassical")
FIT_KINDS = ("none", "m1", "exp", "envelope")
REPORTS = ("none", "epsilon-exponent", "scaling-gamma", "scaling-xi", "delta-trend")


class UsageError(Exception):
    pass


class NumericalError(Exception):
    pass


# -- parsing helpers --------------------------------------------------------

def parse_real(text, name="value") -> float:
    """Plain dimensionless float; anything with a unit suffix is refused."""
    if isinstance(text, (int, float)):
        return float(text)
    try:
        return float(str(text).strip())
    except ValueError:
        raise UsageError(f"{name}: expected a dimensionless number, got {text!r} "
                         "(unit annotations are not accepted)") from None


def parse_int(text, name="value") -> int:
    x = parse_real(text, name)
    if x != int(x):
        raise UsageError(f"{name}: expected an integer, got {text!r}")
    return int(x)


def parse_list(text, name, conv=parse_real) -> list:
    items = [s for s in str(text).replace(";", ",").split(",") if s.strip()]
    return [conv(s, name) for s in items]


@dataclass(frozen=True)
class TimeGrid:
    kind: str
    t_min: float
    t_max: float
    count: int

    @classmethod
    def parse(cls, text: str) -> "TimeGrid":
        parts = str(text).split(":")
        if len(parts) != 4 or parts[0] not in ("lin", "log"):
            raise UsageError(f"--tgrid must be lin:a:b:n or log:a:b:n, got {text!r}")
        grid = cls(parts[0], parse_real(parts[1], "tgrid"), parse_real(parts[2], "tgrid"),
                   parse_int(parts[3], "tgrid count"))
        if grid.count < 2:
            raise UsageError("time grid count must be >= 2")
        if not grid.t_max > grid.t_min or grid.t_min < 0:
            raise UsageError("time grid needs 0 <= t_min < t_max")
        if grid.kind == "log" and grid.t_min <= 0:
            raise UsageError("log time grid needs t_min > 0")
        return grid

    def times(self) -> np.ndarray:
        if self.kind == "lin":
            return np.linspace(self.t_min, self.t_max, self.count)
        return np.logspace(math.log10(self.t_min), math.log10(self.t_max), self.count)

    def __str__(self):
        return f"{self.kind}:{self.t_min!r}:{self.t_max!r}:{self.count}"


def parse_window(text, name="window"):
    if text is None:
        return None
    parts = str(text).split(":")
    if len(parts) != 2:
        raise UsageError(f"{name} must be lo:hi")
    lo, hi = (None if p.strip() in ("", "-") else parse_real(p, name) for p in parts)
    if lo is not None and hi is not None and not lo < hi:
        raise UsageError(f"{name}: lower bound must be below upper bound")
    return (lo, hi)


# -- configuration ----------------------------------------------------------

@dataclass
class ExperimentConfig:
    model: str
    params: dict = field(default_factory=dict)
    quench: dict = field(default_factory=dict)
    tgrid: str | None = None
    sweep: dict = field(default_factory=dict)
    report: str = "none"
    report_t: float | None = None
    report_window: tuple | None = None
    fit: str = "none"
    fit_window: tuple | None = None
    m_range: tuple | None = None
    workers: int | None = None
    chunk_size: int = pairprod.DEFAULT_CHUNK
    parallel_points: bool = False
    out_dir: str = "."

    def reproducible_part(self) -> dict:
        """Everything that determines CSV bodies (output paths excluded)."""
        d = asdict(self)
        for key in ("out_dir", "workers", "parallel_points"):
            d.pop(key)
        return d


def lambda_c_for(model: str, params: dict) -> float:
    if model in ("dicke-effective", "dicke-two-mode", "semiclassical"):
        return 0.5 * math.sqrt(params["omega"] * params["omega0"])
    if model in ("ising", "xy"):
        return params.get("lambda_c", 1.0)
    return 1.0


def make_quench(config: ExperimentConfig) -> QuenchSpec:
    q = config.quench
    lam_c = lambda_c_for(config.model, config.params)
    by_offset = "epsilon" in q or "delta" in q
    by_lambda = "lambda" in q or "lambda_prime" in q
    if by_offset and by_lambda:
        raise UsageError("give either --epsilon/--delta or --lambda/--lambda-prime, not both")
    if by_offset:
        if "epsilon" not in q or "delta" not in q:
            raise UsageError("--epsilon and --delta must be given together")
        return QuenchSpec.from_offsets(q["epsilon"], q["delta"], lam_c)
    if by_lambda:
        if "lambda" not in q or "lambda_prime" not in q:
            raise UsageError("--lambda and --lambda-prime must be given together")
        return QuenchSpec.from_lambdas(q["lambda"], q["lambda_prime"], lam_c)
    raise UsageError("no quench given (use --epsilon/--delta or --lambda/--lambda-prime)")


_PARAM_KEYS = {"n": parse_int, "gamma": parse_real, "omega": parse_real, "omega0": parse_real,
               "lambda_c": parse_real, "cutoff": parse_int, "width_convention": str}
_QUENCH_KEYS = ("epsilon", "delta", "lambda", "lambda_prime")


def read_ini(path) -> dict:
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    known = {"model", "quench", "grid", "sweep"}
    extra = set(parser.sections()) - known
    if extra:
        raise UsageError(f"unknown config sections: {sorted(extra)}")
    return {s: dict(parser[s]) for s in parser.sections()}


def build_config(args, command: str) -> ExperimentConfig:
    ini = read_ini(args.config) if getattr(args, "config", None) else {}
    model_sec = dict(ini.get("model", {}))
    model = command if command in MODELS else (getattr(args, "model", None) or model_sec.get("name"))
    if model not in MODELS:
        raise UsageError(f"model must be one of {', '.join(MODELS)}")

    params = {}
    for key, conv in _PARAM_KEYS.items():
        if key in model_sec:
            params[key] = conv(model_sec[key], key) if conv is not str else model_sec[key]
        flag = getattr(args, key, None)
        if flag is not None:
            params[key] = conv(flag, key) if conv is not str else flag
    quench = {k: parse_real(v, k) for k, v in ini.get("quench", {}).items() if k in _QUENCH_KEYS}
    unknown = set(ini.get("quench", {})) - set(_QUENCH_KEYS)
    if unknown:
        raise UsageError(f"unknown [quench] keys: {sorted(unknown)}")
    flag_quench = {k: getattr(args, k, None) for k in _QUENCH_KEYS}
    flag_quench = {k: parse_real(v, k) for k, v in flag_quench.items() if v is not None}
    if flag_quench:
        # a complete quench on the command line replaces the file's quench
        complete = ({"epsilon", "delta"} <= set(flag_quench)
                    or {"lambda", "lambda_prime"} <= set(flag_quench))
        quench = flag_quench if complete else {**quench, **flag_quench}

    grid = ini.get("grid", {})
    tgrid = getattr(args, "tgrid", None) or grid.get("tgrid")
    workers = getattr(args, "workers", None)
    if workers is None and "workers" in grid:
        workers = parse_int(grid["workers"], "workers")
    if workers is not None and workers < 1:
        raise UsageError("--workers must be >= 1")
    chunk = getattr(args, "chunk_size", None)
    if chunk is None:
        chunk = parse_int(grid.get("chunk_size", pairprod.DEFAULT_CHUNK), "chunk_size")
    if chunk < 1:
        raise UsageError("--chunk-size must be >= 1")

    sweep_sec = ini.get("sweep", {})
    sweep = {}
    for axis, conv in (("epsilon", parse_real), ("delta", parse_real), ("n", parse_int)):
        text = getattr(args, f"sweep_{axis}", None)
        if text is None:
            text = sweep_sec.get(axis)
        if text is not None:
            sweep[axis] = parse_list(text, f"sweep {axis}", conv)
    report = getattr(args, "report", None) or sweep_sec.get("report", "none")
    if report not in REPORTS:
        raise UsageError(f"report must be one of {', '.join(REPORTS)}")
    report_t = getattr(args, "report_t", None) or sweep_sec.get("report_t")
    report_window = getattr(args, "report_window", None) or sweep_sec.get("report_window")

    fit = getattr(args, "fit", None) or "none"
    config = ExperimentConfig(
        model=model, params=params, quench=quench, tgrid=tgrid, sweep=sweep, report=report,
        report_t=None if report_t is None else parse_real(report_t, "report_t"),
        report_window=parse_window(report_window, "report window"),
        fit=fit, fit_window=parse_window(getattr(args, "fit_window", None), "--fit-window"),
        m_range=parse_window(getattr(args, "m_range", None), "--m-range"),
        workers=workers, chunk_size=chunk,
        parallel_points=bool(getattr(args, "parallel_points", False)),
        out_dir=getattr(args, "out_dir", None) or ".")
    validate(config)
    return config


_REQUIRED = {"ising": ("n",), "xy": ("n", "gamma"), "dicke-effective": ("omega", "omega0"),
             "dicke-two-mode": ("omega", "omega0"), "lmg": ("n", "gamma"),
             "semiclassical": ("omega", "omega0")}


def validate(config: ExperimentConfig):
    for key in _REQUIRED[config.model]:
        if key not in config.params:
            raise UsageError(f"model {config.model} needs --{key.replace('_', '-')}")
    if config.tgrid is None:
        raise UsageError("a time grid is required (--tgrid lin:a:b:n or log:a:b:n)")
    TimeGrid.parse(config.tgrid)
    if config.fit not in FIT_KINDS:
        raise UsageError(f"--fit must be one of {', '.join(FIT_KINDS)}")
    if config.model in ("ising", "xy"):
        if config.params.get("lambda_c", 1.0) not in (1.0, -1.0):
            raise UsageError("chain critical point must be +1 or -1")
        sizes = config.sweep.get("n") or [config.params["n"]]
        if any(n < 3 or n % 2 == 0 for n in sizes):
            raise UsageError("chain length must be an odd integer >= 3")
    if config.model == "lmg" and any(n < 2 for n in config.sweep.get("n") or [config.params["n"]]):
        raise UsageError("LMG needs at least 2 spins")


# -- computation ------------------------------------------------------------

def compute_series(config: ExperimentConfig, quench: QuenchSpec):
    """Series for one quench; returns (series, extra summary fields)."""
    times = TimeGrid.parse(config.tgrid).times()
    p = config.params
    model = config.model
    if model in ("ising", "xy"):
        n = p["n"]
        params = IsingParams(n, quench.lambda_) if model == "ising" else \
            XYParams(n, quench.lambda_, p["gamma"])
        fn = pairprod.survival_probability_streamed if n > 4 * config.chunk_size else \
            pairprod.survival_probability
        return fn(params, quench, times, workers=config.workers,
                  chunk_size=config.chunk_size), {}
    if model == "dicke-effective":
        return gaussian.dicke_sp_effective(DickeParams(p["omega"], p["omega0"], quench.lambda_),
                                           quench, times), {}
    if model == "dicke-two-mode":
        return gaussian.dicke_sp_two_mode(DickeParams(p["omega"], p["omega0"], quench.lambda_),
                                          quench, times), {}
    if model == "lmg":
        return smalled.lmg_survival_probability(smalled.LMGParams(p["n"], quench.lambda_,
                                                                  p["gamma"]), quench, times), {}
    if model == "semiclassical":
        return semiclassical_series(p, quench, times)
    raise UsageError(f"unknown model {model}")


def semiclassical_series(p: dict, quench: QuenchSpec, times):
    """m_sc for the Dicke soft mode plus the (Gamma, xi) estimates."""
    omega, omega0 = p["omega"], p["omega0"]
    gaussian._dicke_check(DickeParams(omega, omega0, quench.lambda_), quench, True)
    e_pre, _ = dicke_mode_energies(omega, omega0, quench.delta_lambda)
    mode = semiclassics.ClassicalMode.ground_state(e_pre, p.get("width_convention", "rms"))
    v = semiclassics.dicke_perturbation(e_pre, dicke_gap_coefficient(omega, omega0))
    est = semiclassics.semiclassical_estimates(mode, v, quench.epsilon)
    series = semiclassics.msc(mode, v, quench.epsilon, times)
    series.metadata["quench"] = quench.as_dict()
    return series, {"estimates": {"gamma": est.gamma, "xi": est.xi, "c0": est.c0,
                                  "period": est.period}}


def apply_fit(kind, series, window, m_range=None):
    if kind == "none":
        return None
    if kind == "m1":
        return fitscale.fit_m1(series, window)
    if kind == "exp":
        return fitscale.fit_exponential(series, window, m_range)
    return fitscale.loglog_envelope_slope(series, window)


def describe_fit(report: fitscale.FitReport) -> str:
    params = " ".join(f"{k}={v:.6g}" for k, v in report.parameters.items())
    return (f"{report.model_form}: {params} r2={report.r_squared:.6f} "
            f"window=[{report.window[0]:.6g}, {report.window[1]:.6g}] "
            f"residual_max={report.residual_max:.3g}")


def _summary_base(config: ExperimentConfig, command: str) -> dict:
    return {"command": command, "config": config.reproducible_part(),
            "config_hash": io.config_hash(config.reproducible_part()),
            "versions": io.versions(),
            "workers": config.workers or pairprod.default_workers(),
            "chunk_size": config.chunk_size}


def _one_point(config, quench, csv_path, out):
    series, extra = compute_series(config, quench)
    io.write_series_csv(csv_path, series, {"config_hash": io.config_hash(config.reproducible_part())})
    entry = {"csv": csv_path.name, "quench": quench.as_dict(), **extra}
    if config.fit != "none":
        rep = apply_fit(config.fit, series, config.fit_window, config.m_range)
        entry["fit"] = rep.as_dict()
        print(f"{csv_path.name} {describe_fit(rep)}", file=out)
    return series, entry


def run(config: ExperimentConfig, command: str, out=None) -> int:
    out = out or sys.stdout
    out_dir = Path(config.out_dir)
    quench = make_quench(config)
    summary = _summary_base(config, command)
    csv_path = out_dir / f"{config.model}.csv"
    _, entry = _one_point(config, quench, csv_path, out)
    summary["series"] = [entry]
    io.write_summary(out_dir / f"{config.model}.summary.json", summary)
    print(f"wrote {csv_path}", file=out)
    return 0


def sweep(config: ExperimentConfig, out=None) -> int:
    out = out or sys.stdout
    axes = {k: v for k, v in config.sweep.items() if v}
    if not axes or any(not v for v in config.sweep.values()):
        raise UsageError("sweep needs at least one non-empty axis (epsilon, delta or n)")
    base = make_quench(config)
    out_dir = Path(config.out_dir)
    names = sorted(axes)
    points = list(itertools.product(*(axes[k] for k in names)))

    def point_config(values):
        d = dict(zip(names, values))
        eps = d.get("epsilon", base.epsilon)
        delta = d.get("delta", base.delta)
        cfg = replace(config, quench={"epsilon": eps, "delta": delta},
                      params={**config.params, **({"n": d["n"]} if "n" in d else {})})
        return cfg, make_quench(cfg)

    def job(i_values):
        i, values = i_values
        cfg, q = point_config(values)
        path = out_dir / f"{config.model}_{i:03d}.csv"
        series, entry = _one_point(cfg, q, path, out)
        entry["axes"] = dict(zip(names, values))
        return q, series, entry

    indexed = list(enumerate(points))
    if config.parallel_points and len(points) > 1:
        with ThreadPoolExecutor(max_workers=config.workers or pairprod.default_workers()) as pool:
            results = list(pool.map(job, indexed))
    else:
        results = [job(x) for x in indexed]

    summary = _summary_base(config, "sweep")
    summary["series"] = [r[2] for r in results]
    batches = [(q, s) for q, s, _ in results]
    report = scaling_report(config, batches)
    if report is not None:
        summary["report"] = report
        print(json.dumps({"report": config.report, **_report_headline(report)}), file=out)
    io.write_summary(out_dir / f"{config.model}_sweep.summary.json", summary)
    print(f"wrote {len(results)} series to {out_dir}", file=out)
    return 0


def _report_headline(report: dict) -> dict:
    keys = ("max_deviation", "passed", "slope", "r_squared", "window")
    head = {k: report[k] for k in keys if k in report}
    if report.get("fit"):
        head["slope"] = report["fit"]["parameters"]["slope"]
    return head


def scaling_report(config, batches):
    kind = config.report
    if kind == "none":
        return None
    if kind == "epsilon-exponent":
        rep = fitscale.epsilon_exponent(batches, config.report_t)
        d = rep.as_dict()
        d["slope"] = rep.parameters["slope"]
        return d
    if kind == "scaling-gamma":
        return fitscale.scaling_gamma(batches, config.report_window).as_dict()
    if kind == "scaling-xi":
        return fitscale.scaling_xi(batches, config.report_window,
                                   fit_window=config.fit_window).as_dict()
    if config.report_t is None:
        raise UsageError("delta-trend needs --report-t")
    return fitscale.delta_trend(batches, config.report_t, config.fit_window).as_dict()


def fit_command(args, out=None) -> int:
    out = out or sys.stdout
    kind = args.fit or "m1"
    if kind == "none":
        raise UsageError("fit needs --fit m1|exp|envelope")
    window = parse_window(args.fit_window, "--fit-window")
    m_range = parse_window(args.m_range, "--m-range")
    reports = []
    for path in args.input:
        try:
            series, header = io.read_series_csv(path)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read {path}: {exc}") from None
        rep = apply_fit(kind, series, window, m_range)
        print(f"{path} {describe_fit(rep)}", file=out)
        reports.append({"csv": str(path), "config_hash": header.get("config_hash"),
                        "fit": rep.as_dict()})
    if args.out_dir:
        io.write_summary(Path(args.out_dir) / "fit.summary.json",
                         {"command": "fit", "versions": io.versions(), "fits": reports})
    return 0


def oracle_command(args, out=None) -> int:
    """Cross-check the fast engines against brute-force diagonalisation."""
    out = out or sys.stdout
    rng = np.random.default_rng(args.seed)
    n = args.samples
    ka = rng.uniform(0.0, np.pi, n)
    lam, lamp = rng.uniform(0.0, 2.0, n), rng.uniform(0.0, 2.0, n)
    t = rng.uniform(0.0, 1e3, n)
    from .spectra import ising_bogoliubov_angle, ising_mode_energy
    fast = pairprod.mode_factor(ising_bogoliubov_angle(ka, lam), ising_bogoliubov_angle(ka, lamp),
                                ising_mode_energy(ka, lamp), t)
    mode_err = float(np.max(np.abs(fast - smalled.pair_subspace_oracle(ka, lam, lamp, t))))

    times = np.linspace(0.0, 20.0, 41)
    chain_err = 0.0
    for sites in (5, 7, 9):
        ed = smalled.small_chain_ed_sp(sites, 1.2, 1.1, times)
        q = QuenchSpec.from_lambdas(1.2, 1.1, 1.0)
        prod = np.exp(pairprod.log_survival_for_modes(smalled.antiperiodic_grid(sites), q, times))
        chain_err = max(chain_err, float(np.max(np.abs(ed.m_values - prod))))

    fock_err = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", smalled.ConvergenceWarning)
        for _ in range(5):
            e, e2 = rng.uniform(0.5, 2.0, 2)
            tt = np.sort(rng.uniform(0.0, 50.0, 8))
            g = gaussian.quench_survival(gaussian.oscillator_form(e), gaussian.oscillator_form(e2), tt)
            f = smalled.fock_truncation_sp(gaussian.oscillator_form(e), gaussian.oscillator_form(e2),
                                           256, tt)
            fock_err = max(fock_err, float(np.max(np.abs(g.m_values - f.m_values))))
    checks = {"mode_factor_vs_pair_oracle": (mode_err, 1e-12),
              "chain_product_vs_full_ed": (chain_err, 1e-10),
              "gaussian_vs_fock": (fock_err, 1e-8)}
    ok = True
    for name, (err, tol) in checks.items():
        passed = err <= tol
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'} {name}: max error {err:.3e} (tol {tol:.0e})", file=out)
    if args.out_dir:
        io.write_summary(Path(args.out_dir) / "oracle.summary.json",
                         {"command": "oracle", "versions": io.versions(), "seed": args.seed,
                          "checks": {k: {"max_error": e, "tolerance": t, "passed": e <= t}
                                     for k, (e, t) in checks.items()}})
    if not ok:
        raise NumericalError("oracle cross-check failed")
    return 0


# -- argument parser --------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_common(p, model_opts):
    p.add_argument("--config", help="INI file with [model] [quench] [grid] [sweep] sections")
    p.add_argument("--epsilon", help="lambda' - lambda")
    p.add_argument("--delta", help="lambda' - lambda_c")
    p.add_argument("--lambda", dest="lambda", help="pre-quench coupling")
    p.add_argument("--lambda-prime", dest="lambda_prime", help="post-quench coupling")
    p.add_argument("--tgrid", help="lin:a:b:n or log:a:b:n")
    p.add_argument("--workers", type=int, help="worker threads (default $QPT_ECHO_WORKERS or #cpus)")
    p.add_argument("--chunk-size", type=int, help="modes per chunk (chain models)")
    p.add_argument("--fit", choices=FIT_KINDS, help="fit applied to every series")
    p.add_argument("--fit-window", help="tmin:tmax for the fit")
    p.add_argument("--m-range", help="Mmin:Mmax selecting points for --fit exp")
    p.add_argument("--out-dir", help="output directory (default .)")
    for opt in model_opts:
        if opt == "n":
            p.add_argument("--n", help="chain length / number of spins")
        elif opt == "lambda_c":
            p.add_argument("--lambda-c", dest="lambda_c", help="critical point, +1 or -1")
        elif opt == "width_convention":
            p.add_argument("--width-convention", dest="width_convention",
                           choices=("rms", "gaussian-exponent"))
        else:
            p.add_argument(f"--{opt}")


_MODEL_OPTS = {"ising": ("n", "lambda_c"), "xy": ("n", "gamma", "lambda_c"),
               "dicke-effective": ("omega", "omega0"), "dicke-two-mode": ("omega", "omega0"),
               "lmg": ("n", "gamma"), "semiclassical": ("omega", "omega0", "width_convention")}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qpt-echo", description="Survival probability after quenches near "
                     "quantum critical points.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for model, opts in _MODEL_OPTS.items():
        _add_common(sub.add_parser(model, help=f"{model} survival probability"), opts)
    sw = sub.add_parser("sweep", help="Cartesian sweep over epsilon/delta/n with a scaling report")
    _add_common(sw, ("n", "gamma", "omega", "omega0", "lambda_c", "width_convention"))
    sw.add_argument("--model", choices=MODELS)
    sw.add_argument("--sweep-epsilon", help="comma-separated epsilon values")
    sw.add_argument("--sweep-delta", help="comma-separated delta values")
    sw.add_argument("--sweep-n", help="comma-separated sizes")
    sw.add_argument("--report", choices=REPORTS)
    sw.add_argument("--report-t", help="common time for epsilon-exponent / delta-trend")
    sw.add_argument("--report-window", help="tmin:tmax for scaling-gamma / scaling-xi")
    sw.add_argument("--parallel-points", action="store_true", help="run sweep points concurrently")
    fit = sub.add_parser("fit", help="fit existing CSV series")
    fit.add_argument("input", nargs="+", help="CSV files written by qpt-echo")
    fit.add_argument("--fit", choices=FIT_KINDS[1:])
    fit.add_argument("--fit-window")
    fit.add_argument("--m-range")
    fit.add_argument("--out-dir")
    orc = sub.add_parser("oracle", help="cross-check engines against exact diagonalisation")
    orc.add_argument("--samples", type=int, default=1000)
    orc.add_argument("--seed", type=int, default=0)
    orc.add_argument("--out-dir")
    return parser


def _error_record(kind, exc, code):
    record = {"error": kind, "type": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(json.dumps(record), file=sys.stderr)
    return code


def _attach_negative_values(argv):
    """Rewrite "--opt -1e-5" as "--opt=-1e-5" so negative reals read as values."""
    out = []
    for tok in argv:
        if (out and out[-1].startswith("--") and "=" not in out[-1] and tok.startswith("-")
                and _is_number(tok)):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def _is_number(text) -> bool:
    """True for a real or a comma-separated list of reals."""
    try:
        [float(x) for x in text.split(",")]
    except ValueError:
        return False
    return True


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_attach_negative_values(argv))
        if args.command is None:
            raise UsageError("a subcommand is required")
        if args.command == "fit":
            return fit_command(args)
        if args.command == "oracle":
            return oracle_command(args)
        config = build_config(args, args.command)
        if args.command == "sweep":
            return sweep(config)
        return run(config, args.command)
    except UsageError as exc:
        return _error_record("usage", exc, EXIT_USAGE)
    except (NumericalError, fitscale.FitError, semiclassics.SemiclassicalError,
            gaussian.PhaseBoundaryError, gaussian.DegenerateOverlapError, ValueError,
            ArithmeticError, MemoryError, RuntimeError, np.linalg.LinAlgError) as exc:
        return _error_record("numerical", exc, EXIT_NUMERICAL)


if __name__ == "__main__":
    sys.exit(main())
