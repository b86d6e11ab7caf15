"""Command-line front end.

Single-point queries print one JSON object; sweeps print CSV; the region
map can additionally be rendered as SVG (a presentation layer on top of
the CSV, never a substitute for it).  All outputs are deterministic:
identical flags produce byte-identical files regardless of the worker
count, because sweep results are collected in input order before any
byte is written.  Library errors surface as single-line JSON on stderr
with exit code 2.

Commands where a quantity with two circulating conventions is computed
(the threshold-curve sign, the closed-form inner exponent) also write a
``discrepancies.json`` artifact recording the printed and the adopted
variant with freshly computed example values.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Tuple

from .errors import CknLabError, ResolutionTooLarge
from .params import (
    CknParams,
    Region,
    b_fs,
    b_fs_printed,
    del_direct_bound,
    dualize_params,
    make_params,
    region_label,
)
from .profiles import (
    dualize_profile,
    extremal_form,
    read_profile_csv,
    sample_extremal,
    sample_radial_form,
    write_profile_csv,
)
from .radial import residual_autonomous, shoot_homoclinic
from .spectrum import build_mode_operator, find_fs_threshold, mode_eigenvalues
from .energy import energy_report, hardy_check, verify_dual_energy

__all__ = ["RunConfig", "main", "run"]

MAX_MAP_NODES = 2000

_REGION_COLORS = [
    (Region.INVALID.value, "#dddddd"),
    (Region.CRITICAL_A.value, "#9467bd"),
    (Region.HARDY_ENDPOINT.value, "#8c564b"),
    (Region.SYMMETRY_RADIAL.value, "#1f77b4"),
    (Region.SYMMETRY_BREAKING.value, "#d62728"),
    (Region.BOUNDARY_BA.value, "#ff7f0e"),
    (Region.DUAL_REGIME.value, "#2ca02c"),
]


@dataclass(frozen=True)
class RunConfig:
    """Validated invocation: command, point, grid, and output routing."""

    command: str
    params: Optional[Tuple[int, float, float]] = None
    grid: Tuple[float, float] = (40.0, 0.01)
    tol: float = 1e-6
    output_path: Optional[str] = None
    format: Optional[str] = None
    extras: dict = field(default_factory=dict)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse would print its own message and exit; route through the
    # single-line JSON channel instead
    def error(self, message):
        raise _UsageError(message)


def _g(x) -> str:
    return format(float(x), ".17g")


def _thread_count() -> int:
    raw = os.environ.get("CKN_LAB_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise _UsageError(
            f"CKN_LAB_THREADS must be a positive integer, got {raw!r}")
    return n


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _print_json(obj: dict) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True, default=str) + "\n")


def _params_dict(p: CknParams) -> dict:
    return {"N": p.N, "a": p.a, "b": p.b, "p": p.p, "a_c": p.a_c,
            "lam": p.lam, "n_prime": p.n_prime, "tau": p.tau}


def _require_point(cfg: RunConfig) -> CknParams:
    if cfg.params is None:
        raise _UsageError(f"{cfg.command} requires --N, --a and --b")
    N, a, b = cfg.params
    return make_params(N, a, b)


def _auto_T_energy(params: CknParams) -> float:
    # end the grid where the tails sink below the 1e-12 gate of the
    # energy integrals: w(T) ~ A 2^beta e^{-|lam| T}
    form = extremal_form(params)
    log_tail = math.log(form.amplitude) + form.sech_power * math.log(2.0)
    return max(40.0, math.ceil((log_tail + 28.5) / abs(params.lam)))


def _auto_T_spectrum(params: CknParams) -> float:
    # end the grid where the potential reaches its asymptote to 1e-10:
    # the well term is (p-1) w^{p-2} with (A 2^beta)^{p-2} = 2 p lam^2
    p, lam = params.p, abs(params.lam)
    log_dev = math.log(p - 1.0) + math.log(2.0 * p * lam * lam)
    return max(40.0, math.ceil((log_dev + 24.5) / (lam * (p - 2.0))))


def _write_discrepancies(output_path: Optional[str]) -> None:
    """Record both circulating conventions with fresh example values."""
    if output_path:
        directory = os.path.dirname(os.path.abspath(output_path))
    else:
        directory = os.getcwd()
    params = make_params(3, -1.0, -0.2)
    good = sample_extremal(extremal_form(params), -20.0, 0.01, 4001)
    bad = sample_radial_form(params, (params.p - 1.0) * params.lam,
                             -20.0, 0.01, 4001)
    doc = {
        "threshold_curve_sign": {
            "printed": "b(a) = N (a - a_c) / (2 sqrt((a - a_c)^2 + N - 1))"
                       " + a - a_c",
            "adopted": "b(a) = N (a_c - a) / (2 sqrt((a_c - a)^2 + N - 1))"
                       " + a - a_c",
            "reason": "for a < 0 the printed numerator places the curve "
                      "below b = a, outside the admissible band; the sign "
                      "change of the k=1 principal eigenvalue confirms the "
                      "adopted convention",
            "example": {"N": 3, "a": -1.0,
                        "printed_value": b_fs_printed(3, -1.0),
                        "adopted_value": b_fs(3, -1.0)},
        },
        "extremal_inner_exponent": {
            "printed": "u(r) = C (1 + r^((p-1) lam))^(-2/(p-2))",
            "adopted": "u(r) = C (1 + r^((p-2) lam))^(-2/(p-2))",
            "reason": "only the (p-2) lam inner exponent solves the reduced "
                      "autonomous equation; the residual of the (p-1) lam "
                      "variant stays far above the acceptance gate",
            "example": {"N": 3, "a": -1.0, "b": -0.2,
                        "adopted_residual": residual_autonomous(good),
                        "printed_residual": residual_autonomous(bad)},
        },
    }
    target = os.path.join(directory, "discrepancies.json")
    with open(target, "w", newline="") as fh:
        fh.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _cmd_classify(cfg: RunConfig) -> int:
    if cfg.params is None:
        raise _UsageError("classify requires --N, --a and --b")
    N, a, b = cfg.params
    label = region_label(N, a, b)
    out = {"N": N, "a": a, "b": b, "region": label.variant.value}
    if label.variant is not Region.INVALID:
        out.update(_params_dict(make_params(N, a, b)))
    if a < 0:
        try:
            out["b_fs"] = b_fs(N, a)
            out["del_direct_bound"] = del_direct_bound(N, a)
            _write_discrepancies(cfg.output_path)
        except CknLabError:
            pass  # curves undefined (e.g. invalid N); the label stands
    if label.dual is not None:
        out["dual"] = _params_dict(label.dual)
    _print_json(out)
    return 0


def _cmd_extremal(cfg: RunConfig) -> int:
    params = _require_point(cfg)
    form = extremal_form(params)
    T, dt = cfg.grid
    n = int(round(2.0 * T / dt)) + 1
    profile = sample_extremal(form, -T, dt, n)
    variant = sample_radial_form(params, (params.p - 1.0) * params.lam,
                                 -T, dt, n)
    out = dict(_params_dict(params))
    out.update({
        "amplitude": form.amplitude,
        "sech_power": form.sech_power,
        "rate": form.rate,
        "center": form.center,
        "residual_adopted": residual_autonomous(profile),
        "residual_printed_variant": residual_autonomous(variant),
    })
    if cfg.output_path:
        write_profile_csv(profile, cfg.output_path)
        out["profile_csv"] = cfg.output_path
    _write_discrepancies(cfg.output_path)
    _print_json(out)
    return 0


def _cmd_shoot(cfg: RunConfig) -> int:
    params = _require_point(cfg)
    T, dt = cfg.grid
    profile = shoot_homoclinic(params, t_max=T, tol=cfg.tol, dt=dt)
    A = extremal_form(params).amplitude
    peak = float(profile.values.max())
    out = dict(_params_dict(params))
    out.update({
        "amplitude": peak,
        "closed_form_amplitude": A,
        "rel_err": abs(peak - A) / A,
        "t_max": T,
        "tol": cfg.tol,
    })
    if cfg.output_path:
        write_profile_csv(profile, cfg.output_path)
        out["profile_csv"] = cfg.output_path
    _print_json(out)
    return 0


def _cmd_fs_curve(cfg: RunConfig) -> int:
    if cfg.params is None:
        raise _UsageError("fs-curve requires --N")
    N = cfg.params[0]
    a_min = cfg.extras.get("a_min")
    a_max = cfg.extras.get("a_max")
    steps = cfg.extras["steps"]
    if a_min is None or a_max is None:
        raise _UsageError("fs-curve requires --a-min and --a-max")
    if steps < 1:
        raise _UsageError(f"--steps must be >= 1, got {steps}")
    if a_max < a_min:
        raise _UsageError("--a-max must be >= --a-min")
    T, dx = cfg.grid
    a_values = _nodes(a_min, a_max, steps)

    def one(a):
        closed = b_fs(N, a)
        numeric = find_fs_threshold(N, a, cfg.tol, T=T, dx=dx)
        return a, closed, numeric, abs(numeric - closed)

    with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
        rows = list(pool.map(one, a_values))
    rows.sort(key=lambda row: row[0])
    lines = ["a,b_fs_closed,b_fs_numeric,abs_err"]
    for row in rows:
        lines.append(",".join(_g(x) for x in row))
    _emit("\n".join(lines) + "\n", cfg.output_path)
    _write_discrepancies(cfg.output_path)
    return 0


def _cmd_spectrum(cfg: RunConfig) -> int:
    params = _require_point(cfg)
    form = extremal_form(params)
    T, dx = cfg.grid
    if not cfg.extras.get("T_given"):
        T = _auto_T_spectrum(params)
    kmax = cfg.extras.get("kmax", 3)
    if kmax < 0:
        raise _UsageError(f"--kmax must be >= 0, got {kmax}")
    n = int(round(2.0 * T / dx)) + 1
    profile = sample_extremal(form, -T, dx, n)
    lines = ["k,lambda_k,mu1,mu2"]
    for k in range(kmax + 1):
        op = build_mode_operator(profile, k)
        evs = mode_eigenvalues(op, count=2)
        lines.append(",".join([str(k), _g(op.lambda_k),
                               _g(evs[0].mu), _g(evs[1].mu)]))
    _emit("\n".join(lines) + "\n", cfg.output_path)
    return 0


def _cmd_dualize(cfg: RunConfig) -> int:
    params = _require_point(cfg)
    dual = dualize_params(params)
    out = {"params": _params_dict(params), "dual": _params_dict(dual)}
    in_path = cfg.extras.get("in_path")
    if in_path:
        if not cfg.output_path:
            raise _UsageError("dualize with --in requires --out")
        profile = read_profile_csv(in_path, params)
        write_profile_csv(dualize_profile(profile), cfg.output_path)
        out["profile_csv"] = cfg.output_path
    _print_json(out)
    return 0


def _cmd_energy(cfg: RunConfig) -> int:
    params = _require_point(cfg)
    form = extremal_form(params)
    T, dt = cfg.grid
    if not cfg.extras.get("T_given"):
        T = _auto_T_energy(params)
    n = int(round(2.0 * T / dt)) + 1
    profile = sample_extremal(form, -T, dt, n)
    rep = energy_report(profile)
    fmt = cfg.format or "csv"
    if fmt == "csv":
        lines = ["N,a,b,grad_sq,lp,hardy_lhs,quotient",
                 ",".join([str(params.N), _g(params.a), _g(params.b),
                           _g(rep.grad_sq), _g(rep.lp), _g(rep.hardy_lhs),
                           _g(rep.quotient)])]
        _emit("\n".join(lines) + "\n", cfg.output_path)
    elif fmt == "json":
        lhs, rhs = hardy_check(profile)
        lp1, lp2 = verify_dual_energy(profile)
        out = dict(_params_dict(params))
        out.update({
            "grad_sq": rep.grad_sq, "lp": rep.lp,
            "hardy_lhs": rep.hardy_lhs, "quotient": rep.quotient,
            "omega_n": rep.omega_n,
            "hardy_pair": [lhs, rhs],
            "hardy_ratio": lhs / rep.grad_sq,
            "dual_lp_pair": [lp1, lp2],
        })
        text = json.dumps(out, sort_keys=True) + "\n"
        _emit(text, cfg.output_path)
    else:
        raise _UsageError(f"energy supports csv or json, not {fmt}")
    return 0


def _nodes(lo: float, hi: float, n: int):
    if n == 1:
        return [lo]
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n - 1)] + [hi]


def _curve_runs(fn, a_lo, a_hi, n, b_min, b_max):
    """Sample fn over [a_lo, a_hi], split into runs inside the b-window."""
    runs, cur = [], []
    if a_hi <= a_lo:
        return runs
    for i in range(n + 1):
        a = a_lo + (a_hi - a_lo) * i / n
        try:
            b = fn(a)
        except CknLabError:
            b = None
        if b is None or not (b_min <= b <= b_max):
            if len(cur) >= 2:
                runs.append(cur)
            cur = []
        else:
            cur.append((a, b))
    if len(cur) >= 2:
        runs.append(cur)
    return runs


def _svg_regionmap(N, a_nodes, b_nodes, labels) -> str:
    W = H = 640.0
    LEG = 210.0
    na, nb = len(a_nodes), len(b_nodes)
    a0, a1 = a_nodes[0], a_nodes[-1]
    b0, b1 = b_nodes[0], b_nodes[-1]
    cw, ch = W / na, H / nb

    def x_of(a):
        return (a - a0) / (a1 - a0) * W if a1 > a0 else 0.0

    def y_of(b):
        return H - (b - b0) / (b1 - b0) * H if b1 > b0 else H

    colors = dict(_REGION_COLORS)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{W + LEG:.0f}" height="{H:.0f}" '
        f'viewBox="0 0 {W + LEG:.0f} {H:.0f}">',
        f'<rect x="0" y="0" width="{W + LEG:.0f}" height="{H:.0f}" '
        f'fill="#ffffff"/>',
    ]
    # cells, run-length merged along b within each a-column
    for i in range(na):
        x = i * cw
        j = 0
        while j < nb:
            j2 = j
            while j2 + 1 < nb and labels[i][j2 + 1] == labels[i][j]:
                j2 += 1
            y = H - (j2 + 1) * ch
            parts.append(
                f'<rect x="{x:.3f}" y="{y:.3f}" width="{cw + 0.35:.3f}" '
                f'height="{(j2 - j + 1) * ch + 0.35:.3f}" '
                f'fill="{colors[labels[i][j]]}"/>')
            j = j2 + 1
    # overlay curves
    curves = [
        ("b = a", "#000000", "", lambda a: a, a0, a1),
        ("b = a + 1", "#000000", "6 3", lambda a: a + 1.0, a0, a1),
        ("direct symmetry bound", "#333333", "2 3",
         lambda a: del_direct_bound(N, a), a0, min(a1, -1e-12)),
        ("threshold curve", "#ffffff", "",
         lambda a: b_fs(N, a), a0, min(a1, -1e-12)),
    ]
    for (_, color, dash, fn, lo, hi) in curves:
        for run in _curve_runs(fn, lo, hi, 512, b0, b1):
            pts = " ".join(f"{x_of(a):.2f},{y_of(b):.2f}" for (a, b) in run)
            dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
            parts.append(f'<polyline points="{pts}" fill="none" '
                         f'stroke="{color}" stroke-width="1.5"{dash_attr}/>')
    # legend
    parts.append(f'<text x="{W + 14:.0f}" y="20" font-size="13" '
                 f'font-family="monospace">regions (N = {N})</text>')
    y = 36.0
    for (label, color) in _REGION_COLORS:
        parts.append(f'<rect x="{W + 14:.0f}" y="{y - 11:.0f}" width="13" '
                     f'height="13" fill="{color}" stroke="#000000" '
                     f'stroke-width="0.5"/>')
        parts.append(f'<text x="{W + 33:.0f}" y="{y:.0f}" font-size="12" '
                     f'font-family="monospace">{label}</text>')
        y += 20.0
    y += 8.0
    for (name, color, dash, _fn, _lo, _hi) in curves:
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        edge = (f'<line x1="{W + 14:.0f}" y1="{y - 5:.0f}" '
                f'x2="{W + 27:.0f}" y2="{y - 5:.0f}" stroke="{color}" '
                f'stroke-width="1.5"{dash_attr}/>')
        if color == "#ffffff":
            parts.append(f'<rect x="{W + 13:.0f}" y="{y - 9:.0f}" width="15" '
                         f'height="8" fill="#888888"/>')
        parts.append(edge)
        parts.append(f'<text x="{W + 33:.0f}" y="{y:.0f}" font-size="12" '
                     f'font-family="monospace">{name}</text>')
        y += 20.0
    # window corners
    parts.append(f'<text x="2" y="{H - 4:.0f}" font-size="11" '
                 f'font-family="monospace">({_g(a0)}, {_g(b0)})</text>')
    parts.append(f'<text x="2" y="12" font-size="11" '
                 f'font-family="monospace">({_g(a0)}, {_g(b1)})</text>')
    parts.append(f'<text x="{W - 120:.0f}" y="{H - 4:.0f}" font-size="11" '
                 f'font-family="monospace">({_g(a1)}, {_g(b0)})</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _cmd_regionmap(cfg: RunConfig) -> int:
    N = cfg.params[0] if cfg.params else 3
    ex = cfg.extras
    a_min = ex.get("a_min", -3.0)
    a_max = ex.get("a_max", 1.4)
    b_min = ex.get("b_min", -3.0)
    b_max = ex.get("b_max", 2.5)
    na = ex.get("na", 200)
    nb = ex.get("nb", 200)
    if na > MAX_MAP_NODES or nb > MAX_MAP_NODES:
        raise ResolutionTooLarge(
            f"region map limited to {MAX_MAP_NODES} nodes per axis",
            na=na, nb=nb, limit=MAX_MAP_NODES)
    if na < 1 or nb < 1:
        raise _UsageError("--na and --nb must be >= 1")
    if a_max < a_min or b_max < b_min:
        raise _UsageError("window must satisfy a_min <= a_max, "
                          "b_min <= b_max")
    a_nodes = _nodes(a_min, a_max, na)
    b_nodes = _nodes(b_min, b_max, nb)

    def one_column(a):
        return [region_label(N, a, b).variant.value for b in b_nodes]

    with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
        labels = list(pool.map(one_column, a_nodes))

    fmt = cfg.format or "csv"
    if fmt == "csv":
        lines = ["a,b,label"]
        for i, a in enumerate(a_nodes):
            for j, b in enumerate(b_nodes):
                lines.append(f"{_g(a)},{_g(b)},{labels[i][j]}")
        _emit("\n".join(lines) + "\n", cfg.output_path)
    elif fmt == "svg":
        _emit(_svg_regionmap(N, a_nodes, b_nodes, labels), cfg.output_path)
    else:
        raise _UsageError(f"regionmap supports csv or svg, not {fmt}")
    return 0


def _cmd_selftest(cfg: RunConfig) -> int:
    from . import acceptance
    _write_discrepancies(cfg.output_path)
    ok = acceptance.run_all()
    return 0 if ok else 2


_COMMANDS = {
    "classify": _cmd_classify,
    "extremal": _cmd_extremal,
    "shoot": _cmd_shoot,
    "fs-curve": _cmd_fs_curve,
    "spectrum": _cmd_spectrum,
    "dualize": _cmd_dualize,
    "energy": _cmd_energy,
    "regionmap": _cmd_regionmap,
    "selftest": _cmd_selftest,
}


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--N", type=int)
    common.add_argument("--a", type=float)
    common.add_argument("--b", type=float)
    common.add_argument("--T", type=float, default=None)
    common.add_argument("--dt", type=float, default=0.01)
    common.add_argument("--tol", type=float, default=1e-6)
    common.add_argument("--out", default=None)
    common.add_argument("--format", choices=["csv", "svg", "json"],
                        default=None)

    parser = _Parser(prog="ckn-lab",
                     description="weighted elliptic equation workbench")
    sub = parser.add_subparsers(dest="command")
    sub.add_parser("classify", parents=[common])
    sub.add_parser("extremal", parents=[common])
    sub.add_parser("shoot", parents=[common])
    fs = sub.add_parser("fs-curve", parents=[common])
    fs.add_argument("--a-min", type=float, dest="a_min")
    fs.add_argument("--a-max", type=float, dest="a_max")
    fs.add_argument("--steps", type=int, default=30)
    sp = sub.add_parser("spectrum", parents=[common])
    sp.add_argument("--kmax", type=int, default=3)
    du = sub.add_parser("dualize", parents=[common])
    du.add_argument("--in", dest="in_path", default=None)
    sub.add_parser("energy", parents=[common])
    rm = sub.add_parser("regionmap", parents=[common])
    rm.add_argument("--a-min", type=float, dest="a_min", default=-3.0)
    rm.add_argument("--a-max", type=float, dest="a_max", default=1.4)
    rm.add_argument("--b-min", type=float, dest="b_min", default=-3.0)
    rm.add_argument("--b-max", type=float, dest="b_max", default=2.5)
    rm.add_argument("--na", type=int, default=200)
    rm.add_argument("--nb", type=int, default=200)
    sub.add_parser("selftest", parents=[common])
    return parser


def _config_from_args(args) -> RunConfig:
    if args.command is None:
        raise _UsageError("a command is required: " +
                          ", ".join(sorted(_COMMANDS)))
    point = None
    if args.N is not None:
        if args.command in ("regionmap", "fs-curve", "selftest"):
            point = (args.N, 0.0, 0.0)
        elif args.a is None or args.b is None:
            raise _UsageError(f"{args.command} requires --a and --b with --N")
        else:
            point = (args.N, args.a, args.b)
    T_given = args.T is not None
    T = args.T if T_given else 40.0
    if not (T > 0):
        raise _UsageError(f"--T must be positive, got {T}")
    if not (args.dt > 0):
        raise _UsageError(f"--dt must be positive, got {args.dt}")
    if not (args.tol > 0):
        raise _UsageError(f"--tol must be positive, got {args.tol}")
    extras = {"T_given": T_given}
    for key in ("a_min", "a_max", "b_min", "b_max", "na", "nb",
                "steps", "kmax", "in_path"):
        if hasattr(args, key):
            extras[key] = getattr(args, key)
    return RunConfig(command=args.command, params=point, grid=(T, args.dt),
                     tol=args.tol, output_path=args.out, format=args.format,
                     extras=extras)


def run(config: RunConfig) -> int:
    """Execute a validated config; returns the process exit code."""
    try:
        return _COMMANDS[config.command](config)
    except _UsageError as exc:
        sys.stderr.write(json.dumps(
            {"code": "usage_error", "message": str(exc)},
            sort_keys=True) + "\n")
        return 2
    except CknLabError as exc:
        sys.stderr.write(json.dumps(exc.payload(), sort_keys=True,
                                    default=str) + "\n")
        return 2


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        config = _config_from_args(args)
    except _UsageError as exc:
        sys.stderr.write(json.dumps(
            {"code": "usage_error", "message": str(exc)},
            sort_keys=True) + "\n")
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
