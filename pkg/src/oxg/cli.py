"""Command-line front end.

Results are written as JSON (numbers with 17 significant digits) and grids
or samples as CSV.  Errors go to standard error as a JSON object; the exit
status is 0 on success, 2 for usage errors, 3 for data errors and 4 for
numerical non-convergence (including a fit whose optimiser did not converge).
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from typing import Sequence

import numpy as np
from scipy import stats

from . import core, series
from .baselines import Baseline
from .core import OxgParams
from .datasets import BUILTIN_DATASETS, builtin, ingest
from .errors import DataError, NonConvergenceError, OxgError
from .mle import fit, log_likelihood
from .series import OrderStatSpec, ReliabilityInputs, TruncationPolicy

__all__ = ["main", "build_parser", "dumps"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NONCONVERGENCE = 4

PLOT_GRID_POINTS = 512
PLOT_TAIL = 1e-4

_PARAM_FLAGS = {
    "uniform": ("theta",),
    "exponential": ("theta",),
    "burr_xii": ("alpha", "theta"),
    "normal": ("mu", "sigma"),
}


class UsageError(Exception):
    pass


# ----------------------------------------------------------- serialisation
def _num(v: float, json: bool = True) -> str:
    """17 significant digits; non-finite values become ``null`` in JSON."""
    v = float(v)
    if not math.isfinite(v):
        return "null" if json else repr(v)
    return format(v + 0.0, ".17g")  # + 0.0 folds -0 into 0


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON with 17-significant-digit floats and sorted keys."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}{_string(str(k))}: {dumps(obj[k], indent, _level + 1)}' for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    return _string(str(obj))


def _string(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch in '"\\':
            out.append("\\" + ch)
        elif ch == "\n":
            out.append("\\n")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def _csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_num(v, json=False) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


# ----------------------------------------------------------------- parser
class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_model_flags(p: argparse.ArgumentParser):
    p.add_argument("--baseline", default="exponential",
                   choices=["uniform", "exponential", "burr-xii", "burr_xii", "normal"])
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--sigma", type=float)


def _add_policy_flags(p: argparse.ArgumentParser):
    p.add_argument("--method", choices=["series", "quadrature"], default="quadrature")
    p.add_argument("--max-index", type=int, default=series.DEFAULT_POLICY.max_index_per_sum)
    p.add_argument("--tail-tol", type=float, default=series.DEFAULT_POLICY.tail_tolerance)


def _add_io_flags(p: argparse.ArgumentParser, default_format="json"):
    p.add_argument("--out", help="output file (default: standard output)")
    p.add_argument("--format", choices=["json", "csv"], default=default_format)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="oxg", description="Odds xgamma-G distribution toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="maximum-likelihood fit to a dataset")
    p.add_argument("--data", required=True, help="file path or built-in dataset name")
    p.add_argument("--baseline", default="exponential",
                   choices=["uniform", "exponential", "burr-xii", "burr_xii", "normal"])
    _add_io_flags(p)

    p = sub.add_parser("eval", help="pdf, cdf, survival and hazards at points")
    _add_model_flags(p)
    p.add_argument("--x", type=float, nargs="+", required=True)
    _add_io_flags(p)

    p = sub.add_parser("sample", help="seeded random draws")
    _add_model_flags(p)
    p.add_argument("--n", type=int, required=True)
    _add_io_flags(p, default_format="csv")

    p = sub.add_parser("quantile", help="quantile function")
    _add_model_flags(p)
    p.add_argument("--u", type=float, nargs="+", required=True)
    _add_io_flags(p)

    p = sub.add_parser("moments", help="raw moments and shape summaries")
    _add_model_flags(p)
    _add_policy_flags(p)
    p.add_argument("--r", type=int, help="order of an incomplete moment (with --t)")
    p.add_argument("--t", type=float, help="upper limit of an incomplete moment")
    _add_io_flags(p)

    p = sub.add_parser("entropy", help="Renyi entropy")
    _add_model_flags(p)
    _add_policy_flags(p)
    p.add_argument("--beta", type=float, required=True)
    _add_io_flags(p)

    p = sub.add_parser("reliability", help="stress-strength reliability P(X2 < X1)")
    _add_model_flags(p)
    _add_policy_flags(p)
    p.add_argument("--lambda1", type=float, required=True)
    p.add_argument("--lambda2", type=float, required=True)
    _add_io_flags(p)

    p = sub.add_parser("order-stat", help="density of the r-th of n order statistics")
    _add_model_flags(p)
    _add_policy_flags(p)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=float, nargs="+", required=True)
    _add_io_flags(p)

    p = sub.add_parser("residual", help="residual and reversed residual moments")
    _add_model_flags(p)
    _add_policy_flags(p)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    _add_io_flags(p)

    p = sub.add_parser("gof", help="log-likelihood, AIC and Kolmogorov-Smirnov statistic")
    _add_model_flags(p)
    p.add_argument("--data", required=True)
    _add_io_flags(p)

    p = sub.add_parser("plot-data", help="pdf/cdf/hazard grids and histogram overlay")
    _add_model_flags(p)
    p.add_argument("--data", help="overlay a histogram of this dataset (fits if no --lambda)")
    _add_io_flags(p, default_format="csv")

    p = sub.add_parser("datasets", help="list or dump the built-in datasets")
    p.add_argument("--data", help="dump this built-in dataset")
    _add_io_flags(p)
    return parser


# ---------------------------------------------------------------- helpers
def _kind(args) -> str:
    return "burr_xii" if args.baseline == "burr-xii" else args.baseline


def _params(args, required: bool = True) -> OxgParams | None:
    kind = _kind(args)
    names = _PARAM_FLAGS[kind]
    values = [getattr(args, name) for name in names]
    if args.lam is None or any(v is None for v in values):
        if not required:
            return None
        missing = (["--lambda"] if args.lam is None else []) + [
            f"--{n}" for n, v in zip(names, values) if v is None
        ]
        raise UsageError(f"{args.command} with the {kind} baseline needs {' '.join(missing)}")
    return OxgParams(args.lam, Baseline(kind, tuple(values)))


def _policy(args) -> TruncationPolicy:
    try:
        return TruncationPolicy(max_index_per_sum=args.max_index, tail_tolerance=args.tail_tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _json_or_csv(args, payload: dict, header=None, rows=None) -> str:
    if args.format == "csv":
        if header is None:
            raise UsageError(f"{args.command} has no CSV form; use --format json")
        return _csv_text(header, rows)
    return dumps(payload) + "\n"


# --------------------------------------------------------------- commands
def cmd_fit(args):
    data = ingest(args.data)
    result = fit(data, _kind(args))
    payload = result.to_dict()
    payload["n"] = len(data)
    status = EXIT_OK if result.converged else EXIT_NONCONVERGENCE
    return _json_or_csv(args, payload), status


def cmd_eval(args):
    params = _params(args)
    x = np.asarray(args.x, dtype=float)
    cols = {
        "x": x,
        "pdf": core.pdf(params, x),
        "cdf": core.cdf(params, x),
        "survival": core.survival(params, x),
        "hazard": _safe(core.hazard, params, x),
        "reversed_hazard": _safe(core.reversed_hazard, params, x),
    }
    header = list(cols)
    rows = list(zip(*(np.atleast_1d(cols[k]).astype(float) for k in header)))
    payload = {"params": params.to_dict(), **{k: np.atleast_1d(v).tolist() for k, v in cols.items()}}
    return _json_or_csv(args, payload, header, rows), EXIT_OK


def _safe(fn, params, x):
    """Evaluate pointwise, with NaN where the quantity is undefined."""
    out = np.empty(x.shape)
    for i, xi in enumerate(x):
        try:
            out[i] = fn(params, float(xi))
        except OxgError:
            out[i] = math.nan
    return out


def cmd_sample(args):
    params = _params(args)
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    draws = core.sample(params, args.n, seed=args.seed)
    payload = {"params": params.to_dict(), "seed": args.seed, "n": args.n, "sample": draws.tolist()}
    return _json_or_csv(args, payload, ["x"], ((float(v),) for v in draws)), EXIT_OK


def cmd_quantile(args):
    params = _params(args)
    u = np.asarray(args.u, dtype=float)
    x = np.atleast_1d(core.quantile(params, u))
    check = np.atleast_1d(core.cdf(params, x))
    payload = {"params": params.to_dict(), "u": u.tolist(), "x": x.tolist(), "check": check.tolist()}
    rows = zip(u.tolist(), x.tolist(), check.tolist())
    return _json_or_csv(args, payload, ["u", "x", "check"], rows), EXIT_OK


def cmd_moments(args):
    params = _params(args)
    policy = _policy(args)
    ms = series.moment_set(params, method=args.method, policy=policy)
    payload = {"params": params.to_dict(), **ms.to_dict()}
    if args.t is not None:
        r = 1 if args.r is None else args.r
        payload["incomplete_moment"] = {
            "r": r,
            "t": args.t,
            "value": series.incomplete_moment(params, r, args.t, method=args.method, policy=policy),
        }
    return _json_or_csv(args, payload), EXIT_OK


def cmd_entropy(args):
    params = _params(args)
    value = series.renyi_entropy(params, args.beta, method=args.method, policy=_policy(args))
    payload = {"params": params.to_dict(), "beta": args.beta, "method": args.method, "renyi_entropy": value}
    return _json_or_csv(args, payload), EXIT_OK


def cmd_reliability(args):
    kind = _kind(args)
    names = _PARAM_FLAGS[kind]
    values = [getattr(args, n) for n in names]
    if any(v is None for v in values):
        raise UsageError(f"reliability with the {kind} baseline needs " + " ".join(f"--{n}" for n in names))
    base = Baseline(kind, tuple(values))
    inputs = ReliabilityInputs(args.lambda1, args.lambda2, base)
    value = series.stress_strength_R(inputs, method=args.method, policy=_policy(args))
    payload = {
        "lambda1": args.lambda1,
        "lambda2": args.lambda2,
        "baseline": base.to_dict(),
        "method": args.method,
        "R": value,
    }
    return _json_or_csv(args, payload), EXIT_OK


def cmd_order_stat(args):
    params = _params(args)
    spec = OrderStatSpec(args.r, args.n)
    x = np.asarray(args.x, dtype=float)
    if args.method == "series":
        policy = _policy(args)
        dens = np.array([series.order_stat_pdf_series(params, spec, float(v), policy) for v in x])
    else:
        dens = np.atleast_1d(series.order_stat_pdf(params, spec, x))
    payload = {"params": params.to_dict(), "r": args.r, "n": args.n, "method": args.method,
               "x": x.tolist(), "pdf": dens.tolist()}
    return _json_or_csv(args, payload, ["x", "pdf"], zip(x.tolist(), dens.tolist())), EXIT_OK


def cmd_residual(args):
    params = _params(args)
    policy = _policy(args)
    payload = {
        "params": params.to_dict(),
        "r": args.r,
        "t": args.t,
        "method": args.method,
        "residual_moment": series.residual_moment(params, args.r, args.t, method=args.method, policy=policy),
        "reversed_residual_moment": series.reversed_residual_moment(
            params, args.r, args.t, method=args.method, policy=policy
        ),
    }
    return _json_or_csv(args, payload), EXIT_OK


def _fit_or_params(args, data):
    params = _params(args, required=False)
    fitted = None
    if params is None:
        fitted = fit(data, _kind(args))
        params = fitted.params
    return params, fitted


def cmd_gof(args):
    data = ingest(args.data)
    params, fitted = _fit_or_params(args, data)
    ll = log_likelihood(params, data)
    k = 1 + len(params.baseline.params)
    ks = stats.kstest(data.values, lambda x: core.cdf(params, x))
    payload = {
        "params": params.to_dict(),
        "log_likelihood": ll,
        "aic": 2.0 * k - 2.0 * ll,
        "n": len(data),
        "ks_statistic": float(ks.statistic),
        "ks_pvalue": float(ks.pvalue),
        "fitted": fitted is not None,
    }
    status = EXIT_OK
    if fitted is not None:
        payload["converged"] = fitted.converged
        if not fitted.converged:
            status = EXIT_NONCONVERGENCE
    return _json_or_csv(args, payload), status


def plot_grid(params: OxgParams, points: int = PLOT_GRID_POINTS) -> dict[str, np.ndarray]:
    """Grid from the ``1e-4`` to the ``1 - 1e-4`` quantile with every curve."""
    lo, hi = core.quantile(params, np.array([PLOT_TAIL, 1.0 - PLOT_TAIL]))
    x = np.linspace(float(lo), float(hi), points)
    return {
        "x": x,
        "pdf": core.pdf(params, x),
        "cdf": core.cdf(params, x),
        "survival": core.survival(params, x),
        "hazard": _safe(core.hazard, params, x),
        "reversed_hazard": _safe(core.reversed_hazard, params, x),
    }


def histogram(values: np.ndarray) -> dict[str, np.ndarray]:
    edges = np.histogram_bin_edges(values, bins="sturges")
    counts, _ = np.histogram(values, bins=edges)
    density = counts / (counts.sum() * np.diff(edges))
    return {"bin_left": edges[:-1], "bin_right": edges[1:], "count": counts, "density": density}


def cmd_plot_data(args):
    data = ingest(args.data) if args.data else None
    if data is None:
        params, fitted = _params(args), None
    else:
        params, fitted = _fit_or_params(args, data)
    grid = plot_grid(params)
    hist = histogram(data.values) if data is not None else None
    if args.format == "json":
        payload = {"params": params.to_dict(), "grid": {k: v.tolist() for k, v in grid.items()}}
        if hist is not None:
            payload["histogram"] = {k: v.tolist() for k, v in hist.items()}
        text = dumps(payload) + "\n"
    else:
        header = list(grid)
        text = _csv_text(header, zip(*(grid[k].astype(float) for k in header)))
        if hist is not None:
            hist_text = _csv_text(
                list(hist),
                zip(hist["bin_left"].astype(float), hist["bin_right"].astype(float),
                    hist["count"].tolist(), hist["density"].astype(float)),
            )
            if args.out:
                _write(_hist_path(args.out), hist_text)
            else:
                text = text + "\n" + hist_text
    status = EXIT_NONCONVERGENCE if fitted is not None and not fitted.converged else EXIT_OK
    return text, status


def _hist_path(out: str) -> str:
    stem, dot, ext = out.rpartition(".")
    return f"{stem}.hist.{ext}" if dot and stem else f"{out}.hist.csv"


def cmd_datasets(args):
    if args.data:
        data = builtin(args.data)
        payload = {"name": data.name, "n": len(data), "observations": list(data.observations)}
        return _json_or_csv(args, payload, ["x"], ((v,) for v in data.observations)), EXIT_OK
    summary = []
    for name in sorted(BUILTIN_DATASETS):
        v = builtin(name).values
        summary.append({"name": name, "n": int(v.size), "min": float(v.min()), "max": float(v.max())})
    rows = ((d["name"], d["n"], d["min"], d["max"]) for d in summary)
    return _json_or_csv(args, {"datasets": summary}, ["name", "n", "min", "max"], rows), EXIT_OK


COMMANDS = {
    "fit": cmd_fit,
    "eval": cmd_eval,
    "sample": cmd_sample,
    "quantile": cmd_quantile,
    "moments": cmd_moments,
    "entropy": cmd_entropy,
    "reliability": cmd_reliability,
    "order-stat": cmd_order_stat,
    "residual": cmd_residual,
    "gof": cmd_gof,
    "plot-data": cmd_plot_data,
    "datasets": cmd_datasets,
}


# ------------------------------------------------------------------ entry
def _write(path: str, text: str):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _report(kind: str, exc: Exception, code: int, **extra) -> int:
    body = {"error": kind, "message": str(exc), "exit_code": code, **extra}
    sys.stderr.write(dumps(body) + "\n")
    return code


def run(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _report("usage", exc, EXIT_USAGE)
    try:
        text, status = COMMANDS[args.command](args)
    except UsageError as exc:
        return _report("usage", exc, EXIT_USAGE)
    except DataError as exc:
        extra = {} if exc.index is None else {"index": exc.index}
        return _report(type(exc).__name__, exc, EXIT_DATA, **extra)
    except NonConvergenceError as exc:
        return _report(type(exc).__name__, exc, EXIT_NONCONVERGENCE, value=exc.value, terms=exc.terms)
    except (OxgError, ValueError) as exc:
        return _report(type(exc).__name__, exc, EXIT_USAGE)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return status


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
