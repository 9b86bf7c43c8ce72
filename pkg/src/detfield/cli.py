"""Batch command-line front end.

Usage: detfield <command> --config <path> [--out <path>] [--format csv|json]
                [--plot [path]]

Commands: phi, gramian, det, gap, counts, recover, evolve, tw2, verify.
The JSON config supplies the system descriptor, evaluation grid and
command-specific parameters; output is a deterministic CSV or JSON table.
Exit codes: 0 success, 1 verification failure, 2 usage/config error,
3 hypothesis violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from detfield import fredholm, glsolver, kernels, pointfield, verify
from detfield.descriptors import load_system
from detfield.flows import kdv_evolve, kdv_potential
from detfield.gramian import ctrl_gramian, lyapunov_residual, obs_gramian
from detfield.realization import ScatteringData, phi

COMMANDS = ("phi", "gramian", "det", "gap", "counts", "recover", "evolve", "tw2", "verify")
_NEEDS_SYSTEM = {"phi", "gramian", "det", "gap", "counts", "recover", "evolve"}
_NEEDS_GRID = {"phi", "gramian", "det", "gap", "recover", "evolve", "tw2"}


class UsageError(ValueError):
    pass


def _fmt(value):
    if isinstance(value, (bool,)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _write_csv(columns, rows, stream):
    stream.write(",".join(columns) + "\n")
    for row in rows:
        stream.write(",".join(_fmt(v) for v in row) + "\n")


def _json_token(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return json.dumps(str(value))


def _write_json(command, columns, rows, stream):
    # floats carry 17 significant digits, so the table is written by hand
    lines = [f'{{"version": 1, "command": {json.dumps(command)},']
    lines.append(f' "columns": {json.dumps(columns)},')
    body = ",\n  ".join("[" + ", ".join(_json_token(v) for v in row) + "]" for row in rows)
    lines.append(' "rows": [\n  ' + body + "\n ]}")
    stream.write("\n".join(lines) + "\n")


def _grid(config):
    grid = config.get("grid")
    if not isinstance(grid, dict) or not {"start", "stop", "steps"} <= set(grid):
        raise UsageError("config needs grid: {start, stop, steps}")
    start, stop, steps = float(grid["start"]), float(grid["stop"]), int(grid["steps"])
    if steps < 1:
        raise UsageError("grid.steps must be >= 1")
    if not start < stop:
        raise UsageError("grid.start must be < grid.stop")
    return np.linspace(start, stop, steps)


def _params(config):
    params = config.get("params", {})
    if not isinstance(params, dict):
        raise UsageError("params must be an object")
    return params


def _coupling(params, name="lam", default=1.0):
    raw = params.get(name, default)
    if isinstance(raw, (list, tuple)):
        if len(raw) != 2:
            raise UsageError(f"{name} must be a number or [re, im]")
        return complex(raw[0], raw[1])
    return complex(raw)


# ---------------------------------------------------------------------------
# command implementations returning (columns, rows)


def _run_phi(config):
    sys_ = load_system(config["system"])
    xs = _grid(config)
    rows = []
    for x in xs:
        val = phi(sys_, x)
        rows.append((x, val.real, val.imag))
    return ["x", "phi_re", "phi_im"], rows


def _run_gramian(config):
    sys_ = load_system(config["system"])
    xs = _grid(config)
    rows = []
    for x in xs:
        Q = obs_gramian(sys_, x)
        L = ctrl_gramian(sys_, x)
        rows.append(
            (
                x,
                float(np.linalg.norm(Q, 2)),
                float(np.linalg.norm(L, 2)),
                float(np.trace(Q).real),
                lyapunov_residual(sys_, x, Q=Q, L=L),
            )
        )
    return ["x", "norm_Q", "norm_L", "trace_Q", "lyapunov_residual"], rows


def _run_det(config):
    sys_ = load_system(config["system"])
    xs = _grid(config)
    params = _params(config)
    kind = params.get("kind", "gap")
    rows = []
    for x in xs:
        if kind == "gap":
            val = complex(fredholm.det_gap(sys_, x))
        elif kind == "hankel":
            val = fredholm.det_hankel_via_R(sys_, x, _coupling(params))
        elif kind == "square":
            val = fredholm.det_square(sys_, x, _coupling(params))
        elif kind == "zs":
            val = fredholm.det_zs(sys_, x, _coupling(params, "z", 0.5))
        else:
            raise UsageError(f"params.kind must be gap|hankel|square|zs, got {kind!r}")
        rows.append((x, val.real, val.imag))
    return ["x", "det_re", "det_im"], rows


def _run_gap(config):
    sys_ = load_system(config["system"])
    xs = _grid(config)
    rows = []
    for x in xs:
        rows.append((x, fredholm.det_gap(sys_, x), pointfield.density_ratio(sys_, x)))
    return ["x", "F", "dlogF"], rows


def _run_counts(config):
    sys_ = load_system(config["system"])
    params = _params(config)
    x = float(params.get("x", 0.0))
    case = str(params.get("case", "i"))
    eigs = pointfield.spectrum_for_case(sys_, x, case)
    cd = pointfield.count_distribution(eigs)
    samples = int(params.get("samples", 0))
    columns = ["n", "p_n"]
    freq = None
    if samples > 0:
        rng = np.random.default_rng(int(params.get("seed", 0)))
        draws = np.array([pointfield.sample_count(cd, rng) for _ in range(samples)])
        freq = [float(np.mean(draws == n)) for n in range(len(cd.probabilities))]
        columns.append("empirical_freq")
    rows = []
    for n, p in enumerate(cd.probabilities):
        row = [n, float(p)]
        if freq is not None:
            row.append(freq[n])
        rows.append(tuple(row))
    return columns, rows


def _run_recover(config):
    sys_ = load_system(config["system"])
    xs = _grid(config)
    params = _params(config)
    kind = str(params.get("kind", "scalar"))
    lam = _coupling(params)
    sol = glsolver.GLSolution(sys=sys_, lam=lam, kind=kind)
    rows = []
    if kind == "scalar":
        for x in xs:
            diag = glsolver.gl_T(sol, x, x)
            rows.append((x, diag.real, glsolver.potential_q(sol, x, method="analytic")))
        return ["x", "T_diag", "q"], rows
    for x in xs:
        diag = glsolver.zs_U(sol, x, x)
        rows.append((x, diag.real, glsolver.nls_potential_sq(sol, x)))
    return ["x", "T_diag", "q_abs_sq"], rows


def _run_evolve(config):
    sys_obj = config["system"]
    if isinstance(sys_obj, str):
        with open(sys_obj, encoding="utf-8") as fh:
            sys_obj = json.load(fh)
    if not isinstance(sys_obj, dict) or "bound_states" not in sys_obj:
        raise UsageError("evolve needs a bound_states system descriptor")
    data = ScatteringData(
        bound_states=tuple((float(r["kappa"]), float(r["c"])) for r in sys_obj["bound_states"])
    )
    params = _params(config)
    tlist = params.get("t", [0.0])
    if not isinstance(tlist, (list, tuple)) or not tlist:
        raise UsageError("params.t must be a nonempty list of times")
    tlist = [float(t) for t in tlist]
    lam = _coupling(params)
    xs = _grid(config)
    columns = ["x"] + [f"u_t{j}" for j in range(len(tlist))]
    rows = []
    for x in xs:
        rows.append(tuple([x] + [kdv_potential(data, x, t, lam=lam) for t in tlist]))
    return columns, rows


def _run_tw2(config):
    ss = _grid(config)
    params = _params(config)
    n_nodes = int(params.get("N", 240))
    rows = [(s, kernels.tw_gap(s, n_nodes, check=False)) for s in ss]
    return ["s", "gap"], rows


def _run_verify(config, stream):
    results = verify.run_verification()
    width = max(len(r.name) for r in results)
    for kind in ("identity", "property"):
        stream.write(f"{kind} checks:\n")
        for r in results:
            if r.kind != kind:
                continue
            status = "PASS" if r.passed else "FAIL"
            line = f"  {status}  {r.name:<{width}}  max_error={r.max_error:.3e}  tol={r.tolerance:.1e}"
            if r.detail:
                line += f"  ({r.detail})"
            stream.write(line + "\n")
    n_pass = sum(r.passed for r in results)
    stream.write(f"{len(results)} checks: {n_pass} passed, {len(results) - n_pass} failed\n")
    columns = ["check", "kind", "max_error", "tolerance", "status"]
    rows = [
        (r.name, r.kind, r.max_error, r.tolerance, "PASS" if r.passed else "FAIL")
        for r in results
    ]
    ok = n_pass == len(results)
    return columns, rows, ok


# ---------------------------------------------------------------------------


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            config = json.load(fh)
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed config JSON: {exc}") from None
    if not isinstance(config, dict):
        raise UsageError("config must be a JSON object")
    version = config.get("version", 1)
    if version != 1:
        raise UsageError(f"unsupported config version {version!r}")
    return config


def _dispatch(command, config, stream):
    if command in _NEEDS_SYSTEM and "system" not in config:
        raise UsageError(f"command {command!r} needs a system descriptor")
    runner = {
        "phi": _run_phi,
        "gramian": _run_gramian,
        "det": _run_det,
        "gap": _run_gap,
        "counts": _run_counts,
        "recover": _run_recover,
        "evolve": _run_evolve,
        "tw2": _run_tw2,
    }[command]
    return runner(config)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="detfield",
        description="determinantal point fields from finite-dimensional linear systems",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=False, help="path to the JSON run configuration")
    parser.add_argument("--out", default=None, help="output file (default: stdout)")
    parser.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None)
    parser.add_argument(
        "--plot",
        nargs="?",
        const="",
        default=None,
        help="also render a figure (optional path; defaults to the output stem + .png)",
    )
    try:
        args = parser.parse_args(argv)
    except SystemExit:
        return 2

    try:
        if args.command == "verify":
            config = _load_config(args.config) if args.config else {}
        else:
            if not args.config:
                raise UsageError("--config is required")
            config = _load_config(args.config)
        declared = config.get("command")
        if declared is not None and declared != args.command:
            raise UsageError(f"config command {declared!r} does not match {args.command!r}")
        out_path = args.out or config.get("output")
        fmt = args.fmt or config.get("format", "csv")
        if fmt not in ("csv", "json"):
            raise UsageError(f"format must be csv or json, got {fmt!r}")

        ok = True
        if args.command == "verify":
            columns, rows, ok = _run_verify(config, sys.stdout)
        else:
            columns, rows = _dispatch(args.command, config, sys.stdout)

        if out_path:
            with open(out_path, "w", encoding="utf-8") as fh:
                if fmt == "csv":
                    _write_csv(columns, rows, fh)
                else:
                    _write_json(args.command, columns, rows, fh)
        elif args.command != "verify":
            if fmt == "csv":
                _write_csv(columns, rows, sys.stdout)
            else:
                _write_json(args.command, columns, rows, sys.stdout)

        if args.plot is not None:
            from detfield.plotting import render_table

            if args.plot:
                plot_path = args.plot
            elif out_path:
                plot_path = str(Path(out_path).with_suffix(".png"))
            else:
                raise UsageError("--plot without a path needs --out to derive the figure name")
            render_table(args.command, columns, rows, plot_path)

        return 0 if ok else 1
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except fredholm.HypothesisError as exc:
        print(f"hypothesis violation: {exc}", file=sys.stderr)
        return 3
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
