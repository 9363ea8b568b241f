"""Command-line interface: ``heatcontent <command> [options]``.

Exit codes: 0 success, 1 verification failure or numerical error, 2 usage
error (bad flags, or values outside the domain of the requested operation).
"""

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import asymptotics as asy
from . import heat_content as hc
from .errors import DomainError, HeatContentError, PoleError
from .invariants import ball_geometry, beta_boundary, epsilon_table, interval_geometry, solve_epsilon
from .special_fns import AlphaPair, c_coef

EPSILON_REPORT_LIMIT = 1e-12

DEFAULTS = {
    "radius": 1.0,
    "tmin": 1e-4,
    "tmax": 1e-2,
    "pts": 20,
    "tol": 1e-10,
    "J": 2,
    "N": 1,
    "template": "auto",
    "suite": "all",
    "method": "continuation",
}

CSV_HELP = """\
Q(t) CSV (ball-q, interval-q): comment lines '# key=value' record the run
parameters, then a header and one row per t:
  t    time
  Q    heat content at t
  err  quadrature error estimate of Q
All numbers are written with 17 significant digits, so `fit` reads back
exactly what was computed.
"""


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    ap: AlphaPair = None
    a: float = 1.0
    eps_in: float = None
    eps_out: float = None
    tmin: float = 1e-4
    tmax: float = 1e-2
    pts: int = 20
    tol: float = 1e-10
    output: str = None
    fmt: str = "csv"

    def t_grid(self):
        return np.logspace(math.log10(self.tmin), math.log10(self.tmax), self.pts)


def fmt_num(x):
    return format(float(x), ".16e")


def read_config(path):
    """key=value lines; '#' starts a comment.  Keys are option names."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = val
    return out


def _parent():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="key=value file overriding built-in defaults")
    p.add_argument("--output", "-o", help="write to this file instead of stdout")
    p.add_argument("--format", dest="fmt", choices=("csv", "json"), help="output format")
    return p


def _alpha_args(p, required=True):
    p.add_argument("--a1", type=float, help="exponent alpha1 < 2")
    p.add_argument("--a2", type=float, help="exponent alpha2 < 2")


def _grid_args(p):
    p.add_argument("--radius", type=float, help="radius (ball) or length (interval), default 1")
    p.add_argument("--tmin", type=float, help="smallest t (default 1e-4)")
    p.add_argument("--tmax", type=float, help="largest t (default 1e-2)")
    p.add_argument("--pts", type=int, help="number of log-spaced t values (default 20)")
    p.add_argument("--tol", type=float, help="absolute quadrature tolerance (default 1e-10)")


def build_parser():
    parent = _parent()
    ap = argparse.ArgumentParser(
        prog="heatcontent",
        description="Heat content with singular boundary data: coefficients, Q(t), fits.",
        epilog="HC_THREADS caps the threads used for t-grids (0 = one per CPU).")
    sub = ap.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("c-coef", parents=[parent], help="the boundary coefficient c(a1, a2)",
                       description="Print c(a1, a2).  CSV: a single column 'c'.")
    _alpha_args(p)
    p.add_argument("--method", choices=("continuation", "direct"))

    fmt = argparse.RawDescriptionHelpFormatter
    p = sub.add_parser("ball-q", parents=[parent], help="Q(t) on the ball in R^3",
                       description="Heat content of B_a with weights delta**-a_i.\n\n" + CSV_HELP,
                       formatter_class=fmt)
    _alpha_args(p)
    _grid_args(p)

    p = sub.add_parser("interval-q", parents=[parent], help="Q(t) on [0, a] with cutoffs",
                       description="Interval heat content with weights chi(delta) delta**-a_i;"
                                   " omit --eps-in/--eps-out for no cutoff.\n\n" + CSV_HELP,
                       formatter_class=fmt)
    _alpha_args(p)
    _grid_args(p)
    p.add_argument("--eps-in", type=float, help="cutoff equals 1 on [0, eps-in]")
    p.add_argument("--eps-out", type=float, help="cutoff vanishes beyond eps-out (< a/2)")

    p = sub.add_parser("fit", parents=[parent], help="fit a Q(t) CSV against a series template",
                       description="Weighted least squares of a Q(t) CSV.  JSON (default) holds"
                                   " coefficients keyed by column label, standard errors and"
                                   " diagnostics; CSV has columns term,coefficient,stderr.\n\n"
                                   + CSV_HELP, formatter_class=fmt)
    p.add_argument("--input", required=True, help="CSV written by ball-q or interval-q")
    p.add_argument("--template", choices=("auto", "log"))
    p.add_argument("--J", type=int, help="boundary orders j <= J (auto template)")
    p.add_argument("--N", type=int, help="interior orders (auto) or half-power order (log)")
    p.add_argument("--guard", type=float, nargs="*", default=(),
                   help="extra exponents fitted and reported but not compared")
    _alpha_args(p)
    p.add_argument("--figure", help="render data and fit residuals to this image file")

    p = sub.add_parser("predict", parents=[parent], help="beta_0, beta_1, beta_2 from invariants",
                       description="Boundary coefficients beta_j at t^((1+j-s)/2).  CSV columns:"
                                   " j,exponent,beta.")
    p.add_argument("--geometry", required=True, choices=("ball", "interval"))
    _alpha_args(p)
    p.add_argument("--radius", type=float)

    p = sub.add_parser("verify-epsilon", parents=[parent], help="residuals of the eps relations",
                       description="Re-derive eps^0..eps^14 from their linear relations and"
                                   " report every residual.  Exit 1 if any exceeds 1e-12.")
    _alpha_args(p)

    p = sub.add_parser("verify", parents=[parent], help="run acceptance checks",
                       description="Run an acceptance suite; exit 1 if any check fails.")
    p.add_argument("--suite", choices=("all", "kernels", "coeffs", "ball", "logcase"))
    p.add_argument("--figures", help="directory for figures of the fitted suites")
    return ap


def _merged(args):
    """Explicit flags win over the config file, which wins over DEFAULTS."""
    conf = read_config(args.config) if getattr(args, "config", None) else {}
    vals = dict(vars(args))
    for key, default in DEFAULTS.items():
        if key in vals and vals[key] is None:
            vals[key] = default
    for key, raw in conf.items():
        if key not in vals:
            raise UsageError(f"config key {key!r} is not an option of {args.command}")
        if getattr(args, key) is None:
            vals[key] = raw
    return vals


def _float(vals, key, required=True):
    v = vals.get(key)
    if v is None:
        if required:
            raise UsageError(f"--{key.replace('_', '-')} is required")
        return None
    try:
        return float(v)
    except ValueError:
        raise UsageError(f"--{key} expects a number, got {v!r}") from None


def _int(vals, key):
    v = vals.get(key)
    try:
        return int(v)
    except (TypeError, ValueError):
        raise UsageError(f"--{key} expects an integer, got {v!r}") from None


def _alpha(vals, required=True):
    a1, a2 = _float(vals, "a1", required), _float(vals, "a2", required)
    if a1 is None or a2 is None:
        return None
    try:
        return AlphaPair(a1, a2)
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def make_config(vals):
    cmd = vals["command"]
    kw = {"command": cmd, "output": vals.get("output"), "fmt": vals.get("fmt") or "csv"}
    if cmd in ("ball-q", "interval-q"):
        kw["ap"] = _alpha(vals)
        kw["a"] = _float(vals, "radius")
        kw["tmin"] = _float(vals, "tmin")
        kw["tmax"] = _float(vals, "tmax")
        kw["pts"] = _int(vals, "pts")
        kw["tol"] = _float(vals, "tol")
        if not kw["a"] > 0:
            raise UsageError("--radius must be positive")
        if not 0 < kw["tmin"] < kw["tmax"] or not math.isfinite(kw["tmax"]):
            raise UsageError("need 0 < tmin < tmax")
        if kw["pts"] < 2:
            raise UsageError("--pts must be at least 2")
        if not kw["tol"] > 0:
            raise UsageError("--tol must be positive")
        if cmd == "interval-q":
            kw["eps_in"] = _float(vals, "eps_in", False)
            kw["eps_out"] = _float(vals, "eps_out", False)
            if (kw["eps_in"] is None) != (kw["eps_out"] is None):
                raise UsageError("give both --eps-in and --eps-out or neither")
            if kw["eps_in"] is not None:
                if not 0 < kw["eps_in"] < kw["eps_out"] < kw["a"] / 2:
                    raise UsageError("need 0 < eps-in < eps-out < radius/2")
            elif kw["ap"].s >= 1:
                raise UsageError("without cutoffs the interval needs a1 + a2 < 1")
    return RunConfig(**kw)


# -- output helpers ------------------------------------------------------------

def _emit(text, output):
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def samples_csv(samples, meta):
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}={v}\n")
    buf.write("t,Q,err\n")
    for s in samples:
        buf.write(f"{fmt_num(s.t)},{fmt_num(s.value)},{fmt_num(s.err)}\n")
    return buf.getvalue()


def read_samples_csv(path):
    """(samples, metadata) from a Q(t) CSV."""
    meta, rows = {}, []
    header = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    k, v = body.split("=", 1)
                    meta[k.strip()] = v.strip()
                continue
            if header is None:
                header = [h.strip() for h in line.split(",")]
                if header[:2] != ["t", "Q"]:
                    raise UsageError(f"{path}: header must start with t,Q")
                continue
            parts = line.split(",")
            try:
                nums = [float(p) for p in parts]
            except ValueError:
                raise UsageError(f"{path}:{lineno}: non-numeric field") from None
            err = nums[2] if len(nums) > 2 else 0.0
            rows.append(hc.QSample(nums[0], nums[1], err))
    if not rows:
        raise UsageError(f"{path}: no samples")
    return rows, meta


# -- commands ------------------------------------------------------------------

def cmd_c_coef(vals):
    ap = _alpha(vals)
    try:
        val = c_coef(ap, method=vals["method"])
    except PoleError as exc:
        raise UsageError(str(exc)) from None
    if vals.get("fmt") == "json":
        return _json({"c": val}), 0
    return f"c\n{fmt_num(val)}\n", 0


def _grid_output(cfg, samples, meta):
    if cfg.fmt == "json":
        return _json({"meta": meta, "samples": [
            {"t": s.t, "Q": s.value, "err": s.err} for s in samples]})
    return samples_csv(samples, meta)


def cmd_ball_q(vals):
    cfg = make_config(vals)
    samples = hc.q_grid(lambda t: hc.q_ball(cfg.ap, cfg.a, t, cfg.tol), cfg.t_grid())
    meta = {"geometry": "ball", "a1": repr(cfg.ap.alpha1), "a2": repr(cfg.ap.alpha2),
            "radius": repr(cfg.a)}
    return _grid_output(cfg, samples, meta), 0


def cmd_interval_q(vals):
    cfg = make_config(vals)
    chi = None if cfg.eps_in is None else hc.bump_cutoff(cfg.eps_in, cfg.eps_out)
    samples = hc.q_grid(lambda t: hc.q_interval(cfg.ap, chi, chi, cfg.a, t, cfg.tol),
                        cfg.t_grid())
    meta = {"geometry": "interval", "a1": repr(cfg.ap.alpha1), "a2": repr(cfg.ap.alpha2),
            "radius": repr(cfg.a)}
    if chi is not None:
        meta.update({"eps_in": repr(cfg.eps_in), "eps_out": repr(cfg.eps_out)})
    return _grid_output(cfg, samples, meta), 0


def _fit_prediction(meta, ap, template):
    """Predicted coefficients for the geometry recorded in the CSV, if known."""
    geom = meta.get("geometry")
    a = float(meta.get("radius", 1.0))
    if template == "log":
        if geom == "interval" and "eps_in" in meta and ap.is_log_case:
            chi = hc.bump_cutoff(float(meta["eps_in"]), float(meta["eps_out"]))
            slope, const = hc.log_case_prediction(ap, chi, chi, a)
            return {asy.column_label(0.0, 1): slope, asy.column_label(0.0): const}
        return None
    if geom == "ball":
        return asy.ball_prediction(ap, a)
    if geom == "interval":
        s = ap.s
        b = beta_boundary(interval_geometry(), epsilon_table(ap))
        return {asy.column_label((1.0 - s) / 2.0): b.beta0}
    return None


def cmd_fit(vals):
    samples, meta = read_samples_csv(vals["input"])
    for key in ("a1", "a2"):
        if vals.get(key) is None and key in meta:
            vals[key] = meta[key]
    kind = vals["template"]
    J, N = _int(vals, "J"), _int(vals, "N")
    ap = _alpha(vals, required=(kind == "auto"))
    try:
        if kind == "log":
            tmpl = asy.build_log_template(N)
        else:
            tmpl = asy.build_template(ap, J, N)
        if vals.get("guard"):
            tmpl = tmpl.with_guard(vals["guard"])
        fit = asy.fit_series(samples, tmpl)
    except (asy.TemplateError, asy.FitError) as exc:
        raise UsageError(str(exc)) from None
    out = fit.to_dict()
    out["template"] = kind
    pred = _fit_prediction(meta, ap, kind) if ap is not None else None
    if pred:
        rep = asy.compare(fit, pred)
        out["comparison"] = [{"term": r.label, "fitted": r.fitted, "predicted": r.predicted,
                              "rel_err": r.rel_err} for r in rep.rows]
    if vals.get("figure"):
        from .plotting import plot_fit
        plot_fit(samples, fit, vals["figure"], title=f"{meta.get('geometry', 'Q(t)')} fit")
    if vals.get("fmt") == "csv":
        lines = ["term,coefficient,stderr"]
        for lab, c, e in zip(fit.template.labels, fit.coef, fit.stderr):
            lines.append(f"{lab},{fmt_num(c)},{fmt_num(e)}")
        return "\n".join(lines) + "\n", 0
    return _json(out), 0


def cmd_predict(vals):
    ap = _alpha(vals)
    try:
        tab = epsilon_table(ap)
        if vals["geometry"] == "ball":
            a = _float(vals, "radius")
            if not a > 0:
                raise UsageError("--radius must be positive")
            geom = ball_geometry(a)
        else:
            geom = interval_geometry()
        beta = beta_boundary(geom, tab)
    except PoleError as exc:
        raise UsageError(str(exc)) from None
    if vals.get("fmt") == "json":
        return _json({"geometry": vals["geometry"], **beta.to_dict()}), 0
    lines = ["j,exponent,beta"]
    for j, (e, b) in enumerate(zip(beta.exponents, (beta.beta0, beta.beta1, beta.beta2))):
        lines.append(f"{j},{fmt_num(e)},{fmt_num(b)}")
    return "\n".join(lines) + "\n", 0


def cmd_verify_epsilon(vals):
    ap = _alpha(vals)
    try:
        tab, rep = solve_epsilon(ap)
    except PoleError as exc:
        raise UsageError(str(exc)) from None
    ok = rep.rank == rep.n_unknowns and rep.max_residual <= EPSILON_REPORT_LIMIT
    if vals.get("fmt") == "json":
        text = _json({"eps": tab.to_dict(), "residuals": rep.residuals,
                      "max_residual": rep.max_residual, "rank": rep.rank, "passed": ok})
    else:
        text = rep.as_text() + f"\n{'PASS' if ok else 'FAIL'} (limit {EPSILON_REPORT_LIMIT:g})\n"
    return text, 0 if ok else 1


def cmd_verify(vals):
    from .verify import run_suite
    rep = run_suite(vals["suite"])
    if vals.get("figures"):
        from .plotting import plot_report
        plot_report(rep, vals["figures"])
    text = _json(rep.to_dict()) if vals.get("fmt") == "json" else rep.as_text()
    return text, 0 if rep.passed else 1


COMMANDS = {
    "c-coef": cmd_c_coef,
    "ball-q": cmd_ball_q,
    "interval-q": cmd_interval_q,
    "fit": cmd_fit,
    "predict": cmd_predict,
    "verify-epsilon": cmd_verify_epsilon,
    "verify": cmd_verify,
}


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        vals = _merged(args)
        text, code = COMMANDS[args.command](vals)
    except (UsageError, OSError) as exc:
        print(f"heatcontent {args.command}: {exc}", file=sys.stderr)
        return 2
    except HeatContentError as exc:
        print(f"heatcontent {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    _emit(text, vals.get("output"))
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
