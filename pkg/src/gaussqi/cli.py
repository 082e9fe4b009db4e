"""``gaussqi`` command line: figure tables, sweeps, link budget and oracle checks.

Exit codes: 0 success, 1 validation error, 2 tolerance or oracle failure,
3 I/O error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .asymmetric import advantage_ratio, roc_gen, stein_quantities_exact
from .classical import ClassicalRocParams, homodyne_roc, marcum_roc
from .errors import GaussQIError, NumericalError, ValidationError
from .scenario import (
    ChannelSpec,
    LinkBudget,
    SourceSpec,
    c_quantum,
    c_separable,
    correlation_of_p,
    hypothesis_pair_generic,
    link_budget_convert,
    planck_occupation,
    snr,
)
from .symmetric import (
    advantage_threshold,
    appendix_fit,
    closed_form_error_bounds,
    qbb,
    qcb,
    s_overlap,
)

EXIT_OK, EXIT_VALIDATION, EXIT_TOLERANCE, EXIT_IO = 0, 1, 2, 3
FLOAT_FMT = "%.12e"

ROC_PRESETS = {
    "fig2a": {"freq_hz": 1e9, "temp_k": 290.0, "area_m2": 0.1, "range_m": 1.0,
              "n_s": 1.0, "m": 1e8, "p": "0,0.16666666666666666,1"},
    "fig2b": {"freq_hz": 1e9, "temp_k": 290.0, "area_m2": 0.1, "range_m": 0.1,
              "n_s": 0.01, "m": 1e8, "p": "0,0.5,1"},
}
FIT_PRESETS = {"fig3a": (1e-2, 20.0), "fig3b": (1e-4, 200.0)}
ORACLE_GRID = {"n_s": (0.1, 0.3, 0.5), "n_b": (0.3, 1.0), "kappa": (0.05, 0.2)}
ORACLE_TOL = {"c_s": 1e-6, "d": 1e-5, "v": 1e-5, "moments": 1e-8, "certificate": 1e-8}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    """Usage errors are validation errors (exit 1), not argparse's exit 2."""

    def error(self, message):
        raise CliError(f"{self.prog}: {message}", EXIT_VALIDATION)


@dataclass
class Table:
    """Output table with metadata lines; floats are written with ``%.12e``."""

    columns: list[str]
    rows: list[list] = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    record: dict | None = None
    failed: bool = False

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, value in self.meta.items():
            buf.write(f"# {key}: {value}\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {"meta": self.meta}
        if self.record is not None:
            payload["record"] = self.record
        if self.rows:
            payload["columns"] = self.columns
            payload["rows"] = [[_jsonable(v) for v in r] for r in self.rows]
        return json.dumps(payload, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, float, np.floating, np.integer)):
        return FLOAT_FMT % float(value)
    return str(value)


def _jsonable(value):
    if isinstance(value, (np.floating, np.integer)):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def _pool_map(fn, items: list, jobs: int) -> list:
    """Ordered map, in a process pool when ``jobs > 1``."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _echo(args, keys) -> str:
    return "; ".join(f"{k}={getattr(args, k)}" for k in keys)


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError as exc:
        raise ValidationError(f"bad number list {text!r}") from exc


def _pfa_grid(p_min: float, points: int) -> np.ndarray:
    """Log-spaced false-alarm grid on [p_min, 1), excluding 1."""
    if not 0.0 < p_min < 1.0 or points < 2:
        raise ValidationError("need 0 < pfa_min < 1 and at least 2 points")
    return np.logspace(math.log10(p_min), 0.0, points + 1)[:-1]


# --- fig1 ------------------------------------------------------------------

def run_fig1(args) -> Table:
    if not 0 < args.ns_min < args.ns_max or args.points < 2:
        raise ValidationError("need 0 < ns_min < ns_max and points >= 2")
    grid = np.logspace(math.log10(args.ns_min), math.log10(args.ns_max), args.points)
    rows = [[n, advantage_ratio(c_quantum(n), n), advantage_ratio(c_separable(n), n)]
            for n in grid]
    return Table(["n_s", "a_tmsv", "a_separable"], rows,
                 {"command": "fig1", "params": _echo(args, ["ns_min", "ns_max", "points"]),
                  "provenance": "A(C,N_s) = C^2/N_s ln(1+1/N_s); a_tmsv at C_q, a_separable at C_d"})


# --- roc -------------------------------------------------------------------

def _roc_row(task):
    p_fa, m, n_s, kappa, n_b, cs = task
    params = ClassicalRocParams(m, kappa, n_s, n_b)
    row = [p_fa]
    row += [roc_gen(p_fa, m, n_s, c, kappa, n_b).log_p_md for c in cs]
    row.append(homodyne_roc(p_fa, params).log_p_md)
    row.append(marcum_roc(p_fa, m * kappa * n_s / n_b).log_p_md)
    return row


def _roc_setup(args) -> dict:
    values = dict(ROC_PRESETS.get(args.preset, {}))
    for key in ("freq_hz", "temp_k", "area_m2", "range_m", "n_s", "m", "p"):
        if getattr(args, key) is not None:
            values[key] = getattr(args, key)
    missing = [k for k in ("freq_hz", "temp_k", "area_m2", "range_m", "n_s", "m", "p")
               if k not in values]
    if missing:
        raise ValidationError(f"custom preset needs {', '.join(missing)}")
    link = LinkBudget(float(values["freq_hz"]), float(values["temp_k"]),
                      float(values["area_m2"]), float(values["range_m"]))
    values["ps"] = _float_list(values["p"])
    values["n_b"], values["kappa"] = link.n_b, link.kappa
    return values


def run_roc(args) -> Table:
    v = _roc_setup(args)
    n_s, m = float(v["n_s"]), float(v["m"])
    cs = [correlation_of_p(n_s, p) for p in v["ps"]]
    grid = _pfa_grid(args.pfa_min, args.points)
    tasks = [(float(x), m, n_s, v["kappa"], v["n_b"], cs) for x in grid]
    rows = _pool_map(_roc_row, tasks, args.jobs)
    cols = ["p_fa"] + [f"log_p_md_gen[p={p:.6g}]" for p in v["ps"]]
    cols += ["log_p_md_homodyne", "log_p_md_marcum"]
    gamma = snr(v["kappa"], n_s, v["n_b"])
    meta = {
        "command": "roc",
        "preset": args.preset,
        "params": (f"freq_hz={v['freq_hz']}; temp_k={v['temp_k']}; area_m2={v['area_m2']}; "
                   f"range_m={v['range_m']}; n_s={n_s}; m={m}; p={v['p']}; "
                   f"pfa_min={args.pfa_min}; points={args.points}"),
        "derived": (f"n_b={v['n_b']:.12e}; kappa={v['kappa']:.12e}; "
                    f"gamma_db={gamma['gamma_db']:.12e}"),
        "provenance": "gen=roc_gen closed form; homodyne=coherent integration; "
                      "marcum=single-pulse Marcum at total SNR (lower bound); values are ln p_md",
    }
    return Table(cols, rows, meta)


# --- appendix-fit ----------------------------------------------------------

def _fit_task(task):
    n_s, n_b, c_grid = task
    return appendix_fit(n_s, n_b, c_grid)


def run_appendix_fit(args) -> Table:
    names = list(FIT_PRESETS) if args.preset == "both" else [args.preset]
    if args.c_points < 10:
        raise ValidationError("the C grid needs at least 10 points")
    tasks = []
    for name in names:
        n_s, n_b = FIT_PRESETS[name]
        cq = c_quantum(n_s)
        tasks.append((n_s, n_b, list(np.linspace(0.0, cq, args.c_points))))
    results = _pool_map(_fit_task, tasks, args.jobs)
    rows = []
    for name, (n_s, n_b, _), fit in zip(names, tasks, results):
        for r in fit:
            rel = (r.g_fitted - r.g_model) / r.g_model if r.g_model > 0 else r.g_fitted
            rows.append([name, n_s, n_b, r.c, r.g_fitted, r.g_raw, r.g_model, rel])
    meta = {
        "command": "appendix-fit",
        "params": _echo(args, ["preset", "c_points"]),
        "provenance": "g_fitted = x(C)/x(C_q) from exact QBB slope on kappa in [1e-5, 1e-3]; "
                      "g_raw = x N_b/N_s; g_predicted = C^2/C_q^2; rel_dev absolute at C=0",
    }
    return Table(["preset", "n_s", "n_b", "c", "g_fitted", "g_raw", "g_predicted", "rel_dev"],
                 rows, meta)


# --- link ------------------------------------------------------------------

def run_link(args) -> Table:
    if (args.range_m is None) == (args.kappa is None):
        raise ValidationError("give exactly one of --range-m and --kappa")
    n_b = planck_occupation(args.freq_hz, args.temp_k)
    conv = link_budget_convert(args.area_m2, range_m=args.range_m, kappa=args.kappa)
    gamma = snr(conv["kappa"], args.n_s, n_b)
    record = {
        "freq_hz": args.freq_hz, "temp_k": args.temp_k, "area_m2": args.area_m2,
        "range_m": conv["range_m"], "n_s": args.n_s, "m": args.m,
        "n_b": n_b, "kappa": conv["kappa"], "gamma": gamma["gamma"],
        "gamma_db": gamma["gamma_db"], "gain": conv["gain"],
        "gain_times_sigma_m2": conv["gain_times_sigma_m2"],
    }
    meta = {"command": "link",
            "provenance": "n_b Planck occupation; kappa = A_R/(4 pi R)^2; gamma = kappa N_s/N_b"}
    cols = list(record)
    return Table(cols, [[record[k] for k in cols]], meta, record)


# --- bounds ----------------------------------------------------------------

def run_bounds(args) -> Table:
    if args.c is not None and args.p is not None:
        raise ValidationError("give at most one of --c and --p")
    if args.c is not None:
        c = args.c
    else:
        c = correlation_of_p(args.n_s, 0.0 if args.p is None else args.p)
    bounds = closed_form_error_bounds(args.n_s, args.n_b, args.kappa, args.m, c)
    thr = advantage_threshold(args.n_s)
    rows = [[name, b.formula, b.exponent_per_copy, b.log_p_err_bound]
            for name, b in bounds.items()]
    record = {name: {"exponent_per_copy": b.exponent_per_copy,
                     "log_p_err_bound": b.log_p_err_bound} for name, b in bounds.items()}
    record["advantage_threshold"] = thr
    meta = {"command": "bounds", "params": _echo(args, ["n_s", "n_b", "kappa", "m"]) + f"; c={c}",
            "c_min": FLOAT_FMT % thr["c_min"],
            "separable_feasible": str(thr["separable_feasible"]).lower(),
            "provenance": "low-brightness high-noise closed forms; ln P_err <= -M exponent - ln 2"}
    return Table(["source", "formula", "exponent_per_copy", "log_p_err_bound"], rows, meta, record)


# --- oracle-check ----------------------------------------------------------

def _oracle_instance(task) -> dict:
    from . import oracle

    n_s, n_b, kappa, c_name, cutoff = task
    c = {"0": 0.0, "c_d": c_separable(n_s), "c_q": c_quantum(n_s)}[c_name]
    pair = hypothesis_pair_generic(SourceSpec.generic(n_s, c), ChannelSpec(kappa, n_b))
    cut = (oracle.default_cutoffs(n_s, kappa, n_b) if cutoff is None
           else oracle.OracleCutoffs(cutoff, cutoff, cutoff))
    report = {"n_s": n_s, "n_b": n_b, "kappa": kappa, "c": c_name,
              "cutoffs": [cut.signal, cut.idler, cut.env]}
    try:
        cert = oracle.certify(lambda cc: oracle.generic_pair(n_s, c, kappa, n_b, cc), cut)
        rho0, rho1 = cert.states
    except oracle.CutoffTooSmall as exc:
        report.update(error=f"CutoffTooSmall: {exc}", passed=False)
        return report
    brute = cert.base
    gauss_c = s_overlap(pair.rho0, pair.rho1, 0.5).c_s
    stein = stein_quantities_exact(pair)
    moment_dev = 0.0
    for fock, gauss in ((rho0, pair.rho0), (rho1, pair.rho1)):
        mean, cov = oracle.moments(fock)
        moment_dev = max(moment_dev, float(np.max(np.abs(mean - gauss.mean))),
                         float(np.max(np.abs(cov - gauss.cov))))
    p_qcb = qcb(pair).p_err_bound
    p_qbb = qbb(pair).p_err_bound
    dev = {"c_s": abs(gauss_c - brute["c_s"]), "d": abs(stein.d - brute["d"]),
           "v": abs(stein.v - brute["v"]), "moments": moment_dev,
           "certificate": cert.max_change}
    ordered = brute["helstrom"] <= p_qcb + 1e-12 and p_qcb <= p_qbb + 1e-12
    report.update(
        deviations=dev,
        helstrom=brute["helstrom"], qcb=p_qcb, qbb=p_qbb, ordering_ok=bool(ordered),
        tail_mass={"rho0": rho0.tail_mass, "rho1": rho1.tail_mass},
        passed=bool(ordered and all(dev[k] < ORACLE_TOL[k] for k in dev)),
    )
    return report


def oracle_tasks(n_s_list, n_b_list, kappa_list, cutoff=None) -> list[tuple]:
    for n in list(n_s_list) + list(n_b_list):
        if not 0 < n <= 2.0:
            raise ValidationError("oracle checks run in the small-occupation regime 0 < N <= 2")
    for k in kappa_list:
        if not 0 < k < 1:
            raise ValidationError("kappa must lie in (0, 1)")
    if cutoff is not None and cutoff < 2:
        raise ValidationError("cutoff must be >= 2")
    return [(n_s, n_b, k, c, cutoff) for n_s in n_s_list for n_b in n_b_list
            for k in kappa_list for c in ("0", "c_d", "c_q")]


def run_oracle_check(args) -> Table:
    tasks = oracle_tasks(_float_list(args.n_s_list), _float_list(args.n_b_list),
                         _float_list(args.kappa_list), args.cutoff)
    reports = _pool_map(_oracle_instance, tasks, args.jobs)
    worst = {k: max((r["deviations"][k] for r in reports if "deviations" in r), default=math.nan)
             for k in ORACLE_TOL}
    passed = all(r["passed"] for r in reports)
    record = {"tolerances": ORACLE_TOL, "max_deviation": worst, "passed": passed,
              "instances": reports}
    cols = ["n_s", "n_b", "kappa", "c", "dev_c_s", "dev_d", "dev_v", "dev_moments",
            "certificate", "helstrom", "qcb", "qbb", "tail_mass_rho1", "passed"]
    rows = []
    for r in reports:
        if "deviations" not in r:
            rows.append([r["n_s"], r["n_b"], r["kappa"], r["c"]] + ["nan"] * 9 + [False])
            continue
        d = r["deviations"]
        rows.append([r["n_s"], r["n_b"], r["kappa"], r["c"], d["c_s"], d["d"], d["v"],
                     d["moments"], d["certificate"], r["helstrom"], r["qcb"], r["qbb"],
                     r["tail_mass"]["rho1"], r["passed"]])
    meta = {"command": "oracle-check",
            "params": _echo(args, ["n_s_list", "n_b_list", "kappa_list", "cutoff"]),
            "passed": str(passed).lower(),
            "provenance": "Gaussian formulas vs charge-sector truncated Fock brute force"}
    return Table(cols, rows, meta, record, failed=not passed)


# --- plumbing --------------------------------------------------------------

def gnuplot_script(table: Table, csv_path: str) -> str:
    """A gnuplot script plotting every numeric column against the first."""
    numeric = [i for i, name in enumerate(table.columns)
               if table.rows and isinstance(table.rows[0][i], (int, float, np.floating))]
    if len(numeric) < 2:
        raise ValidationError("table has nothing to plot")
    x = numeric[0] + 1
    lines = ["set datafile separator ','", "set datafile commentschars '#'",
             "set key autotitle columnhead", f"set xlabel '{table.columns[x - 1]}'"]
    if table.columns[0] == "p_fa":
        lines += ["set logscale x", "set ylabel 'p_md'", "set logscale y"]
        series = [f"'{csv_path}' using {x}:(exp(${i + 1})) with lines" for i in numeric[1:]]
    else:
        series = [f"'{csv_path}' using {x}:{i + 1} with lines" for i in numeric[1:]]
    lines.append("plot " + ", \\\n     ".join(series))
    return "\n".join(lines) + "\n"


def read_config(path: str) -> dict[str, str]:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}", EXIT_IO) from exc
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ValidationError(f"{path}:{lineno}: expected 'key = value'")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="output file (default stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes")
    parser.add_argument("--config", help="flat key = value file; flags override it")
    parser.add_argument("--gnuplot", metavar="PATH", help="also write a gnuplot script")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gaussqi", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fig1", help="advantage ratio A(N_s) for TMSV and just-separable")
    p.add_argument("--ns-min", type=float, default=1e-2)
    p.add_argument("--ns-max", type=float, default=1e2)
    p.add_argument("--points", type=int, default=200)
    p.set_defaults(handler=run_fig1)

    p = sub.add_parser("roc", help="generic-source, homodyne and Marcum ROC curves")
    p.add_argument("--preset", choices=("fig2a", "fig2b", "custom"), default="fig2a")
    p.add_argument("--freq-hz", type=float)
    p.add_argument("--temp-k", type=float)
    p.add_argument("--area-m2", type=float)
    p.add_argument("--range-m", type=float)
    p.add_argument("--n-s", type=float)
    p.add_argument("--m", type=float)
    p.add_argument("--p", help="comma-separated correlation parameters in [0, 1]")
    p.add_argument("--pfa-min", type=float, default=1e-6)
    p.add_argument("--points", type=int, default=400)
    p.set_defaults(handler=run_roc)

    p = sub.add_parser("appendix-fit", help="exact-QBB fit of g_C against C^2/C_q^2")
    p.add_argument("--preset", choices=("fig3a", "fig3b", "both"), default="both")
    p.add_argument("--c-points", type=int, default=11)
    p.set_defaults(handler=run_appendix_fit)

    p = sub.add_parser("link", help="radar-equation link budget")
    p.add_argument("--freq-hz", type=float, default=1e9)
    p.add_argument("--temp-k", type=float, default=290.0)
    p.add_argument("--area-m2", type=float, default=0.1)
    p.add_argument("--range-m", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--n-s", type=float, default=1.0)
    p.add_argument("--m", type=float, default=1e8)
    p.set_defaults(handler=run_link)

    p = sub.add_parser("oracle-check", help="Gaussian formulas against Fock brute force")
    p.add_argument("--n-s-list", default="0.1,0.3,0.5")
    p.add_argument("--n-b-list", default="0.3,1")
    p.add_argument("--kappa-list", default="0.05,0.2")
    p.add_argument("--cutoff", type=int, help="force one cutoff for every mode")
    p.set_defaults(handler=run_oracle_check)

    p = sub.add_parser("bounds", help="closed-form error bounds and advantage threshold")
    p.add_argument("--n-s", type=float, default=1e-3)
    p.add_argument("--n-b", type=float, default=1e3)
    p.add_argument("--kappa", type=float, default=1e-4)
    p.add_argument("--m", type=float, default=1e6)
    p.add_argument("--c", type=float, help="correlation (default C_q)")
    p.add_argument("--p", type=float)
    p.set_defaults(handler=run_bounds)

    for action in sub.choices.values():
        _common(action)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    values = read_config(args.config)
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    actions = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, raw in values.items():
        if key in ("config", "help", "command") or key not in actions:
            raise ValidationError(f"unknown config key {key!r} for {args.command}")
        action = actions[key]
        try:
            value = action.type(raw) if action.type else raw
        except ValueError as exc:
            raise ValidationError(f"config key {key}: bad value {raw!r}") from exc
        if action.choices and value not in action.choices:
            raise ValidationError(f"config key {key}: {value!r} not in {action.choices}")
        defaults[key] = value
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def _emit(table: Table, args) -> None:
    text = table.to_json() if args.format == "json" else table.to_csv()
    try:
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        if args.gnuplot:
            if not args.out or args.format != "csv":
                raise ValidationError("--gnuplot needs --out with --format csv")
            Path(args.gnuplot).write_text(gnuplot_script(table, args.out))
    except OSError as exc:
        raise CliError(f"cannot write output: {exc}", EXIT_IO) from exc


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = _apply_config(build_parser(), argv)
        if args.jobs < 1:
            raise ValidationError("--jobs must be >= 1")
        table = args.handler(args)
        _emit(table, args)
        return EXIT_TOLERANCE if table.failed else EXIT_OK
    except CliError as exc:
        print(exc, file=sys.stderr)
        return exc.code
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except GaussQIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
