"""Command-line front end: configured runs emitting deterministic CSV/SVG.

Each subcommand reads an optional INI config (``--config``), writes its
table to stdout or ``<out>/<command>.csv``, and exits 0 on success, 1 when
a quantitative contract fails, 2 on usage or config errors.  Tables are
fixed-order and formatted to 12 significant digits, so identical configs
produce identical bytes.  ``--svg`` adds a log-log plot next to the CSV
for the commands that have one (lt-check, weak-coupling, heat,
failure-demo, counterexample).
"""

from __future__ import annotations

import argparse
import configparser
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import __version__
from .field import FieldProfile, flux_alpha, tabulate_h
from .operators import assemble_mode, make_grid
from .spectral import eigen_negative, heat_diag_origin
from . import greenkernel
from . import verify

__all__ = ["main"]


class ConfigError(Exception):
    """A config value failed to parse or an unknown field was given."""


# ------------------------------------------------------------- configuration

# every recognised section/key with its default; doubles as the --help text
_DEFAULTS = {
    "profile": {
        "kind": "ac-circle",      # gaussian | compact-bump | power-tail | ac-circle
        "amplitude": "0.5",       # for ac-circle this is the flux alpha
        "radius": "1.0",
        "decay": "",              # power-tail exponent rho (> 2)
    },
    "potential": {
        "shape": "gaussian",      # gaussian | disc
        "depth": "2.0",
        "radius": "1.0",
    },
    "grid": {
        "r_max": "600.0",
        "n": "2400",
        "grading": "1.004",
    },
    "spectrum": {
        "modes": "-3:3",          # a:b range or comma list
        "k_max": "64",
    },
    "lt-check": {
        "alphas": "0.2,0.5,0.8",
        "depths": "0.01,0.3,3.0,30.0,1000.0",
        "gammas": "critical,1.0",  # numbers, or 'critical' for gamma = alpha
        "certify_tol": "1e-8",
    },
    "kernel": {
        "alpha": "0.5",
        "kappa_min": "1e-2",
        "kappa_max": "10.0",
        "kappa_count": "7",
        "r_min": "0.05",
        "r_max": "20.0",
        "r_count": "9",
    },
    "hardy": {
        "alphas": "0.5,0.9",
        "modes": "-2,-1,0,1",
        "tol": "2e-3",
        "r_max": "400.0",         # the dense generalized solve wants a
        "n": "1200",              # smaller grid than the battery default
        "grading": "1.005",
    },
    "weak-coupling": {
        "lam_min": "1e-4",
        "lam_max": "1e-2",
        "count": "13",
    },
    "heat": {
        "alpha": "0.5",
        "count": "24",
    },
    "failure-demo": {
        "alpha": "0.5",
        "which": "both",          # semiclassical | weak | both
        "eps_min": "1e-6",
        "eps_max": "1e-3",
        "spread_min": "1e2",
        "spread_max": "1e5",
        "count": "19",
        "tol": "0.15",
    },
    "counterexample": {
        "alpha": "1.5",
        "r_min": "1e2",
        "r_max": "1e4",
        "count": "13",
    },
    "ac-check": {
        "kinds": "ac-circle,gaussian",
        "alphas": "0.25,0.5,0.9",
    },
}


def _load_config(path: str | None) -> dict[str, dict[str, str]]:
    cfg = {sec: dict(keys) for sec, keys in _DEFAULTS.items()}
    if path is None:
        return cfg
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    for sec in parser.sections():
        if sec not in cfg:
            raise ConfigError(f"unknown section [{sec}]")
        for key, val in parser.items(sec):
            if key not in cfg[sec]:
                raise ConfigError(f"unknown field [{sec}] {key}")
            cfg[sec][key] = val
    return cfg


def _get_float(cfg, sec, key) -> float:
    raw = cfg[sec][key]
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"[{sec}] {key}: invalid number {raw!r}") from exc


def _get_int(cfg, sec, key) -> int:
    raw = cfg[sec][key]
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"[{sec}] {key}: invalid integer {raw!r}") from exc


def _get_floats(cfg, sec, key) -> list[float]:
    raw = cfg[sec][key].strip()
    if not raw:
        return []
    try:
        return [float(tok) for tok in raw.split(",")]
    except ValueError as exc:
        raise ConfigError(f"[{sec}] {key}: invalid number list {raw!r}") from exc


def _get_modes(cfg, sec, key) -> list[int]:
    raw = cfg[sec][key].strip()
    try:
        if ":" in raw:
            lo, hi = raw.split(":")
            return list(range(int(lo), int(hi) + 1))
        return [int(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"[{sec}] {key}: invalid mode list {raw!r}") from exc


def _profile(cfg) -> FieldProfile:
    kind = cfg["profile"]["kind"]
    decay_raw = cfg["profile"]["decay"].strip()
    try:
        return FieldProfile(kind, _get_float(cfg, "profile", "amplitude"),
                            _get_float(cfg, "profile", "radius"),
                            float(decay_raw) if decay_raw else None)
    except ValueError as exc:
        raise ConfigError(f"[profile] {exc}") from exc


def _potential(cfg):
    shape = cfg["potential"]["shape"]
    depth = _get_float(cfg, "potential", "depth")
    rad = _get_float(cfg, "potential", "radius")
    if shape == "gaussian":
        return lambda r: -depth * np.exp(-((r / rad) ** 2))
    if shape == "disc":
        return lambda r: np.where(r <= rad, -depth, 0.0)
    raise ConfigError(f"[potential] shape: unknown shape {shape!r}")


def _grid(cfg, sec="grid"):
    try:
        return make_grid(_get_float(cfg, sec, "r_max"), _get_int(cfg, sec, "n"),
                         _get_float(cfg, sec, "grading"))
    except ValueError as exc:
        raise ConfigError(f"[{sec}] {exc}") from exc


def _fit_points(cfg, sec, lo_key, hi_key, count_key) -> np.ndarray:
    """Log-spaced fit abscissae; sparser than six per decade is refused."""
    lo = _get_float(cfg, sec, lo_key)
    hi = _get_float(cfg, sec, hi_key)
    count = _get_int(cfg, sec, count_key)
    if not 0.0 < lo < hi:
        raise ConfigError(f"[{sec}] {lo_key}/{hi_key}: need 0 < min < max")
    decades = math.log10(hi / lo)
    if count < 6.0 * decades:
        raise ConfigError(f"[{sec}] {count_key}: {count} points over "
                          f"{decades:.2g} decades is under six per decade")
    return np.geomspace(lo, hi, count)


# ------------------------------------------------------------------- output

def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{x:.12g}"


def _table(header: str, rows) -> str:
    lines = [header]
    lines.extend(",".join(_fmt(x) for x in row) for row in rows)
    return "\n".join(lines) + "\n"


def _emit(args, text: str) -> None:
    if args.out:
        path = Path(args.out) / f"{args.command}.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        print(f"wrote {path}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def _emit_svg(args, series, *, xlabel, ylabel, title, annotation=None) -> None:
    """Log-log plot of (label, x, y) series as a self-contained SVG file."""
    if not args.svg:
        return
    import matplotlib
    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for label, xs, ys in series:
        ax.loglog(xs, ys, marker="o", markersize=3, linewidth=1.0, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, which="both", linewidth=0.3, alpha=0.5)
    if len(series) > 1 or annotation:
        ax.legend(fontsize=8)
    if annotation:
        ax.text(0.02, 0.02, annotation, transform=ax.transAxes, fontsize=8)
    path = Path(args.out or ".") / f"{args.command}.svg"
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg")
    plt.close(fig)
    print(f"wrote {path}", file=sys.stderr)


def _map_cases(fn, cases, jobs: int) -> list:
    if jobs <= 1 or len(cases) <= 1:
        return [fn(c) for c in cases]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, cases))


# ----------------------------------------------------------------- commands

def cmd_spectrum(args, cfg) -> int:
    profile = _profile(cfg)
    alpha = flux_alpha(profile)
    pot = tabulate_h(profile)
    grid = _grid(cfg)
    v = _potential(cfg)
    k_max = _get_int(cfg, "spectrum", "k_max")
    rows = []
    for sign in ("+", "-"):
        for m in _get_modes(cfg, "spectrum", "modes"):
            op = assemble_mode(grid, "exact-h", alpha, sign, m, v,
                               chiral=True, potential=pot)
            # mass-symmetrized tridiagonal of the public pencil
            d = op.diag / op.mass
            e = op.off / np.sqrt(op.mass[:-1] * op.mass[1:])
            scale = float(np.max(np.abs(d)) + 2.0 * np.max(np.abs(e)))
            floor = 32.0 * np.finfo(float).eps * scale
            lam, vecs = eigh_tridiagonal(d, e, select="v",
                                         select_range=(-scale - 1.0, -floor))
            for k in range(min(lam.size, k_max)):
                u = vecs[:, k]
                resid = d * u
                resid[:-1] += e * u[1:]
                resid[1:] += e * u[:-1]
                resid -= lam[k] * u
                rows.append((sign, m, k, lam[k],
                             float(np.max(np.abs(resid))) / scale))
    _emit(args, _table("spin,m,index,eigenvalue,residual", rows))
    return 0


def cmd_lt_check(args, cfg) -> int:
    grid = _grid(cfg)
    alphas = _get_floats(cfg, "lt-check", "alphas")
    depths = _get_floats(cfg, "lt-check", "depths")
    gammas = [g.strip() for g in cfg["lt-check"]["gammas"].split(",") if g.strip()]
    tol = _get_float(cfg, "lt-check", "certify_tol")
    if args.seed is not None:
        rng = np.random.default_rng(args.seed)
        depths = sorted(depths + list(10.0 ** rng.uniform(-2.0, 3.0, size=2)))

    cases = []
    for alpha in alphas:
        for gam in gammas:
            try:
                g = alpha if gam == "critical" else float(gam)
            except ValueError as exc:
                raise ConfigError(f"[lt-check] gammas: invalid entry {gam!r}") from exc
            for depth in depths:
                cases.append((alpha, g, depth))

    def run(case):
        alpha, g, depth = case
        profile = FieldProfile("ac-circle", amplitude=alpha, radius=1.0)
        return verify.lt_report(profile, grid,
                                lambda r: -depth * np.exp(-r * r), g)

    reports = _map_cases(run, cases, args.jobs)
    constants = {}
    for alpha in alphas:
        group = [rep for (a, _, _), rep in zip(cases, reports) if a == alpha]
        if group:
            constants[alpha] = verify.fit_lt_constants(group)

    rows, bad = [], []
    for (alpha, g, depth), rep in zip(cases, reports):
        l1, l2 = constants[alpha]
        rows.append((alpha, g, depth, rep.lhs, rep.term1, rep.term2,
                     rep.ratio, l1, l2))
        if rep.lhs > l1 * rep.term1 + l2 * rep.term2 + tol:
            bad.append((alpha, g, depth))
    _emit(args, _table(
        "alpha,gamma,lambda,lhs,term1,term2,ratio,empirical_L1,empirical_L2",
        rows))

    series = []
    for alpha in alphas:
        for gam in sorted({g for (a, g, _) in cases if a == alpha}):
            pts = [(d, rep.lhs) for (a, g, d), rep in zip(cases, reports)
                   if a == alpha and g == gam and rep.lhs > 0.0]
            if len(pts) >= 2:
                series.append((f"alpha={alpha:g} gamma={gam:g}",
                               [p[0] for p in pts], [p[1] for p in pts]))
    note = None
    if series:
        xs, ys = series[0][1], series[0][2]
        lo = math.log(ys[1] / ys[0]) / math.log(xs[1] / xs[0])
        hi = math.log(ys[-1] / ys[-2]) / math.log(xs[-1] / xs[-2])
        note = f"end slopes {lo:.2f} (shallow) / {hi:.2f} (deep)"
    _emit_svg(args, series, xlabel="well depth", ylabel="trace power sum",
              title="two-term bound battery", annotation=note)

    if bad:
        print("certification failed for (alpha, gamma, depth): "
              + ", ".join(f"({a:g}, {g:g}, {d:g})" for a, g, d in bad),
              file=sys.stderr)
        return 1
    return 0


def cmd_kernel(args, cfg) -> int:
    alpha = _get_float(cfg, "kernel", "alpha")
    kappas = np.geomspace(_get_float(cfg, "kernel", "kappa_min"),
                          _get_float(cfg, "kernel", "kappa_max"),
                          _get_int(cfg, "kernel", "kappa_count"))
    radii = np.geomspace(_get_float(cfg, "kernel", "r_min"),
                         _get_float(cfg, "kernel", "r_max"),
                         _get_int(cfg, "kernel", "r_count"))
    rows = greenkernel.sweep_rows(alpha, kappas, radii)
    text = _table("kappa,r,rprime,kernel,gamma,ratio", rows)
    best = greenkernel.max_bound_ratio(alpha, kappas, radii)
    text += "\n" + _table("alpha,max_ratio", [(alpha, best)])
    _emit(args, text)
    return 0


def cmd_hardy(args, cfg) -> int:
    grid = _grid(cfg, sec="hardy")
    tol = _get_float(cfg, "hardy", "tol")
    cases = [(alpha, sign, m)
             for alpha in _get_floats(cfg, "hardy", "alphas")
             for sign in ("+", "-")
             for m in _get_modes(cfg, "hardy", "modes")]

    def run(case):
        alpha, sign, m = case
        return verify.hardy_q_estimate(alpha, sign, m, grid)

    estimates = _map_cases(run, cases, args.jobs)
    rows, bad = [], 0
    for (alpha, sign, m), est in zip(cases, estimates):
        bound = verify.hardy_q_bound(alpha)
        ok = est >= bound - tol
        bad += not ok
        rows.append((alpha, sign, m, est, bound, ok))
    _emit(args, _table("alpha,sign,m,estimate,bound,passed", rows))
    return 1 if bad else 0


def cmd_weak_coupling(args, cfg) -> int:
    profile = _profile(cfg)
    grid = _grid(cfg)
    lams = _fit_points(cfg, "weak-coupling", "lam_min", "lam_max", "count")
    fit = verify.weak_coupling_fit(profile, grid, _potential(cfg), lams)
    _emit(args, verify.fit_csv([fit]))
    energies = (fit.prefactor * lams) ** fit.exponent
    _emit_svg(args, [("fitted law", lams, energies)],
              xlabel="coupling", ylabel="|ground energy|",
              title="weak-coupling ground state",
              annotation=f"exponent {fit.exponent:.4g}, "
                         f"prefactor {fit.prefactor:.4g} "
                         f"(expected {fit.expected:.4g})")
    return 0


def cmd_heat(args, cfg) -> int:
    alpha = _get_float(cfg, "heat", "alpha")
    grid = _grid(cfg)
    op = assemble_mode(grid, "model", alpha, "-", 0, None)
    # the trusted window opens just above the resolution scale of the mesh
    t_probe = 25.0 * float(np.max(np.diff(grid.r))) ** 2 * 1.05
    _, (t_lo, t_hi) = heat_diag_origin(op, t_probe)
    ts = np.geomspace(t_lo * 1.01, t_hi * 0.99, _get_int(cfg, "heat", "count"))
    rows = []
    envelope = 0.0
    for t in ts:
        p, _ = heat_diag_origin(op, t)
        shape = p / (1.0 / t + t ** (alpha - 1.0))
        envelope = max(envelope, shape)
        rows.append((t, p, 1.0 / (4.0 * math.pi * t), shape))
    text = _table("t,p,free_p,shape_ratio", rows)
    text += "\n" + _table("alpha,envelope_constant", [(alpha, envelope)])
    _emit(args, text)
    _emit_svg(args, [("diagonal", ts, [r[1] for r in rows]),
                     ("free", ts, [r[2] for r in rows])],
              xlabel="time", ylabel="heat diagonal at the origin",
              title="heat kernel diagonal",
              annotation=f"envelope constant {envelope:.4g}")
    return 0


def cmd_failure_demo(args, cfg) -> int:
    alpha = _get_float(cfg, "failure-demo", "alpha")
    which = cfg["failure-demo"]["which"]
    if which not in ("semiclassical", "weak", "both"):
        raise ConfigError(f"[failure-demo] which: unknown value {which!r}")
    tol = _get_float(cfg, "failure-demo", "tol")
    families = []
    if which in ("semiclassical", "both"):
        families.append(("semiclassical",
                         _fit_points(cfg, "failure-demo", "eps_min",
                                     "eps_max", "count")))
    if which in ("weak", "both"):
        families.append(("weak",
                         _fit_points(cfg, "failure-demo", "spread_min",
                                     "spread_max", "count")))

    sections, series, fit_rows, bad = [], [], [], 0
    for name, params in families:
        qs = verify.one_term_quotients(alpha, name, params)
        fit = verify.one_term_failure(alpha, name, params)
        sections.append(_table(f"{name}_param,quotient", zip(params, qs)))
        series.append((f"{name} (rate {fit.exponent:.3f}, "
                       f"expected {fit.expected:.3f})", params, qs))
        fit_rows.append((name, fit.exponent, fit.prefactor, fit.residual,
                         fit.expected))
        bad += abs(fit.exponent / fit.expected - 1.0) > tol
    sections.append(_table("family,exponent,prefactor,residual,expected",
                           fit_rows))
    _emit(args, "\n".join(sections))
    _emit_svg(args, series, xlabel="family parameter", ylabel="quotient",
              title="single-term bounds fail along scaled families")
    return 1 if bad else 0


def cmd_counterexample(args, cfg) -> int:
    alpha = _get_float(cfg, "counterexample", "alpha")
    rs = _fit_points(cfg, "counterexample", "r_min", "r_max", "count")
    fit = verify.counterexample_ratio(alpha, rs)  # refuses alpha < 1
    ratios = [verify.counterexample_value(alpha, R) for R in rs]
    text = _table("R,ratio", zip(rs, ratios))
    text += "\n" + verify.fit_csv([fit])
    _emit(args, text)
    _emit_svg(args, [("matched pair", rs, ratios)],
              xlabel="matching radius", ylabel="chiral/gradient ratio",
              title="no uniform chiral lower bound at this flux",
              annotation=f"decay rate {fit.exponent:.4g}")
    if any(b >= a for a, b in zip(ratios, ratios[1:])):
        print("contract violated: ratio not strictly decreasing",
              file=sys.stderr)
        return 1
    return 0


def cmd_ac_check(args, cfg) -> int:
    rows, bad = [], 0
    for kind in (k.strip() for k in cfg["ac-check"]["kinds"].split(",")):
        for alpha in _get_floats(cfg, "ac-check", "alphas"):
            amplitude = alpha if kind == "ac-circle" else 2.0 * alpha
            profile = FieldProfile(kind, amplitude=amplitude, radius=1.0)
            chk = verify.ac_check(profile)
            bad += not chk.passed
            rows.append((kind, chk.alpha, chk.min_eigenvalue,
                         chk.resonance_residual, chk.passed))
    _emit(args, _table("kind,alpha,min_eigenvalue,resonance_residual,passed",
                       rows))
    return 1 if bad else 0


# --------------------------------------------------------------- entry point

def _config_help() -> str:
    lines = ["config file sections and defaults:"]
    for sec, keys in _DEFAULTS.items():
        lines.append(f"  [{sec}]")
        lines.extend(f"    {key} = {val}" for key, val in keys.items())
    return "\n".join(lines)


_HANDLERS = {
    "spectrum": (cmd_spectrum, "negative eigenvalues per spin and mode"),
    "lt-check": (cmd_lt_check, "two-term bound battery with fitted constants"),
    "kernel": (cmd_kernel, "resolvent/difference kernel sweep and max ratio"),
    "hardy": (cmd_hardy, "chiral-to-expanded quotient estimates vs bounds"),
    "weak-coupling": (cmd_weak_coupling, "ground-energy power-law fit"),
    "heat": (cmd_heat, "heat diagonal at the origin and its envelope"),
    "failure-demo": (cmd_failure_demo, "decay of the single-term quotients"),
    "counterexample": (cmd_counterexample, "matched-pair ratio decay, flux >= 1"),
    "ac-check": (cmd_ac_check, "zero-mode absence and resonance flatness"),
}


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="INI config file (see section list below)")
    common.add_argument("--out", metavar="DIR",
                        help="write <command>.csv (and .svg) here instead of stdout")
    common.add_argument("--svg", action="store_true",
                        help="also write a log-log plot where supported")
    common.add_argument("--jobs", type=int, default=1, metavar="N",
                        help="parallel workers for independent cases (default 1)")
    common.add_argument("--seed", type=int, default=None, metavar="N",
                        help="sample two extra battery depths (lt-check only)")

    parser = argparse.ArgumentParser(
        prog="paulilt",
        description="spectral checks for radial-field Pauli operators",
        epilog=_config_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (handler, blurb) in _HANDLERS.items():
        p = sub.add_parser(name, help=blurb, parents=[common],
                           epilog=_config_help(),
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.set_defaults(handler=handler)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args.config)
        return args.handler(args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
