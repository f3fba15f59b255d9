"""Command-line entry point.

Exit codes:
    0  success
    1  allocation infeasible (allocate, budget) or violations found (verify)
    2  bad flags or configuration
    3  I/O error writing outputs
    4  fidelity target unreachable at every swept pump amplitude (budget)
"""

import argparse
import json
import math
import sys

import numpy as np

from . import allocation as alloc
from .dynamics import simulate_gate
from .params import ConfigError, SpectatorModel, load_config, to_mapping
from .sweep import (
    default_axes,
    emit_grid_csv,
    emit_heatmap_svg,
    fidelity_grid,
    min_delta_for_target,
)

EXIT_OK, EXIT_INFEASIBLE, EXIT_USAGE, EXIT_IO, EXIT_UNREACHABLE = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _fail(code, msg):
    print(f"snailbudget: {msg}", file=sys.stderr)
    return code


def _band(text):
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI in Hz, got {text!r}") from None
    if not lo < hi:
        raise argparse.ArgumentTypeError("bandwidth inverted")
    return lo, hi


def _positive(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _write_json(path, obj):
    text = json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load(path):
    try:
        return load_config(path)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None


def _problem_from_config(cfg):
    dev, seps = cfg.device, cfg.separations
    snail = None
    if dev.snail_freq is not None and (seps.delta_S is not None or seps.deltaS_conv is not None):
        snail = alloc.SnailConstraints(dev.snail_freq, seps.delta_S, seps.deltaS_conv)
    return alloc.AllocationProblem(dev.n_qubits, dev.band_lo, dev.band_hi, seps.delta_Q, snail)


def cmd_sweep(args):
    try:
        cfg = _load(args.config)
    except ConfigError as exc:
        return _fail(EXIT_USAGE, str(exc))
    s = cfg.sweep
    overrides = {
        "eta_min": args.eta_min,
        "eta_max": args.eta_max,
        "eta_points": args.eta_points,
        "delta_min_hz": args.delta_min,
        "delta_max_hz": args.delta_max,
        "delta_points": args.delta_points,
    }
    try:
        s = type(s)(**{**s.__dict__, **{k: v for k, v in overrides.items() if v is not None}})
    except ConfigError as exc:
        return _fail(EXIT_USAGE, str(exc))
    eta, delta = default_axes(s)
    grid = fidelity_grid(cfg, eta, delta, threshold=args.threshold, workers=args.workers)
    try:
        emit_grid_csv(grid, args.out_csv)
        if args.out_svg:
            emit_heatmap_svg(grid, args.out_svg)
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot write output: {exc}")
    return EXIT_OK


def cmd_allocate(args):
    lo, hi = args.band
    snail = None
    if args.snail_freq is not None:
        if args.snail_sep is None and args.snail_conv_sep is None:
            return _fail(EXIT_USAGE, "--snail-freq needs --snail-sep and/or --snail-conv-sep")
        snail = alloc.SnailConstraints(args.snail_freq, args.snail_sep, args.snail_conv_sep)
    try:
        problem = alloc.AllocationProblem(args.n, lo, hi, args.min_qubit_sep, snail)
    except ValueError as exc:
        return _fail(EXIT_USAGE, str(exc))
    result = alloc.maximize_delta(problem, args.resolution)
    rec = alloc.result_record(result, problem, args.resolution)
    try:
        _write_json(args.out, rec)
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot write output: {exc}")
    if not result.feasible:
        return _fail(EXIT_INFEASIBLE, f"{problem.n} qubits do not fit in the band at the requested separation")
    return EXIT_OK


def _expectations(path):
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ConfigError("expectation file must hold a JSON object")
    return data


def cmd_budget(args):
    try:
        cfg = _load(args.config)
        expected = _expectations(args.expect) if args.expect else {}
    except (ConfigError, OSError, ValueError) as exc:
        return _fail(EXIT_USAGE, str(exc))
    s = cfg.sweep
    target = cfg.gate.target_fidelity

    # 1. T1-limited optimum: spectator off, scan eta
    eta_axis, _ = default_axes(s)
    floor = [simulate_gate(cfg, e, s.delta_max_hz, SpectatorModel.OFF).avg_fidelity for e in eta_axis]
    k = int(np.argmax(floor))
    eta = float(eta_axis[k])
    best = simulate_gate(cfg, eta, s.delta_max_hz, SpectatorModel.OFF)
    if floor[k] < target:
        return _fail(EXIT_UNREACHABLE, f"best spectator-free fidelity {floor[k]:.6f} is below target {target}")

    # 2. smallest conversion separation meeting the target at that eta
    delta_fid = min_delta_for_target(cfg, eta, target, s.delta_min_hz, s.delta_max_hz, s.tol_hz)
    if delta_fid is None:
        return _fail(
            EXIT_UNREACHABLE,
            f"target {target} not met at eta={eta:.4g} even at {s.delta_max_hz:.4g} Hz separation",
        )
    required = cfg.separations.delta2_Q if cfg.separations.delta2_Q is not None else delta_fid

    # 3. allocation
    try:
        problem = _problem_from_config(cfg)
    except ValueError as exc:
        return _fail(EXIT_USAGE, str(exc))
    result = alloc.maximize_delta(problem, s.resolution_hz)
    alloc_rec = alloc.result_record(result, problem, s.resolution_hz)
    meets = result.feasible and result.achieved_delta >= required - 1.0
    check = None
    if result.feasible:
        own = alloc.verify_allocation(result.freqs, problem, min(result.achieved_delta, problem.width))
        if not own.ok:
            raise RuntimeError(f"allocation failed its own verification: {own.violations}")
        at_req = alloc.verify_allocation(result.freqs, problem, required)
        check = {
            "delta_q_hz": problem.delta_Q,
            "delta2_hz": required,
            "ok": at_req.ok,
            "violations": [v.__dict__ for v in at_req.violations],
        }

    summary = {
        "eta": eta,
        "t_f_s": best.t_f,
        "spectator_free_fidelity": best.avg_fidelity,
        "min_delta2_for_target_hz": delta_fid,
        "required_delta2_hz": required,
        "achieved_delta_hz": alloc_rec["achieved_delta_hz"],
        "meets_requirement": bool(meets),
    }
    comparison = []
    for key in sorted(expected):
        if key not in summary and key != "freqs_hz":
            comparison.append({"quantity": key, "expected": expected[key], "obtained": None, "ok": False})
            continue
        got = result.freqs if key == "freqs_hz" else summary[key]
        exp = expected[key]
        if isinstance(exp, list):
            ok = got is not None and len(got) == len(exp) and all(
                math.isclose(a, b, rel_tol=0, abs_tol=args.expect_tol_hz) for a, b in zip(got, exp)
            )
        elif key == "achieved_delta_hz":
            ok = got is not None and got >= exp - args.expect_tol_hz
        elif isinstance(exp, bool):
            ok = got == exp
        else:
            ok = got is not None and math.isclose(got, exp, rel_tol=1e-3)
        comparison.append({"quantity": key, "expected": exp, "obtained": got, "ok": bool(ok)})

    report = {
        "config": {k: (None if isinstance(v, float) and math.isinf(v) else v) for k, v in to_mapping(cfg).items()},
        "summary": summary,
        "allocation": alloc_rec,
        "verification": check,
        "comparison": comparison,
    }
    try:
        _write_json(args.out, report)
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot write output: {exc}")
    if not meets:
        return _fail(EXIT_INFEASIBLE, f"allocation cannot reach the required separation {required:.6g} Hz")
    return EXIT_OK


def cmd_verify(args):
    try:
        with open(args.result, encoding="utf-8") as fh:
            rec = json.load(fh)
    except (OSError, ValueError) as exc:
        return _fail(EXIT_USAGE, f"cannot read result file: {exc}")
    if "allocation" in rec:
        rec = rec["allocation"]
    try:
        freqs = rec["freqs_hz"]
        band = args.band or tuple(rec["band_hz"])
        dq = args.min_qubit_sep or rec["min_qubit_sep_hz"]
        n = rec.get("n", len(freqs))
    except (KeyError, TypeError) as exc:
        return _fail(EXIT_USAGE, f"result file lacks field {exc}")
    if args.delta is not None:
        delta = args.delta
    elif rec.get("achieved_delta_hz") is not None:
        delta = rec["achieved_delta_hz"]
    else:
        delta = 0.0
    if not rec.get("feasible", True) or not freqs:
        return _fail(EXIT_INFEASIBLE, "record holds no feasible allocation")
    snail = None
    if rec.get("snail"):
        sn = rec["snail"]
        snail = alloc.SnailConstraints(sn["snail_freq_hz"], sn.get("delta_s_hz"), sn.get("delta_s_conv_hz"))
    try:
        problem = alloc.AllocationProblem(n, band[0], band[1], dq, snail)
    except ValueError as exc:
        return _fail(EXIT_USAGE, str(exc))
    rep = alloc.verify_allocation(freqs, problem, delta)
    out = {
        "ok": rep.ok,
        "delta2_hz": delta,
        "min_qubit_gap_hz": rep.min_qubit_gap,
        "min_conversion_gap_hz": None if math.isinf(rep.min_conversion_gap) else rep.min_conversion_gap,
        "violations": [v.__dict__ for v in rep.violations],
    }
    _write_json("-", out)
    return EXIT_OK if rep.ok else EXIT_INFEASIBLE


def build_parser():
    p = _Parser(prog="snailbudget", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sw = sub.add_parser("sweep", help="fidelity grid over pump amplitude and conversion separation")
    sw.add_argument("config")
    sw.add_argument("--out-csv", required=True)
    sw.add_argument("--out-svg")
    sw.add_argument("--eta-min", type=_positive)
    sw.add_argument("--eta-max", type=_positive)
    sw.add_argument("--eta-points", type=int)
    sw.add_argument("--delta-min", type=_positive, help="Hz")
    sw.add_argument("--delta-max", type=_positive, help="Hz")
    sw.add_argument("--delta-points", type=int)
    sw.add_argument("--threshold", type=float, help="contour level (default: target_fidelity)")
    sw.add_argument("--workers", type=int, default=1)
    sw.set_defaults(func=cmd_sweep)

    al = sub.add_parser("allocate", help="maximise conversion separation for n qubits in a band")
    al.add_argument("--n", type=int, required=True)
    al.add_argument("--band", type=_band, required=True, help="LO:HI in Hz")
    al.add_argument("--min-qubit-sep", type=_positive, required=True, help="Hz")
    al.add_argument("--snail-freq", type=_positive, help="Hz")
    al.add_argument("--snail-sep", type=_positive, help="min qubit-SNAIL separation, Hz")
    al.add_argument("--snail-conv-sep", type=_positive, help="min SNAIL-qubit vs qubit-qubit conversion separation, Hz")
    al.add_argument("--resolution", type=_positive, default=1e6, help="Hz (default 1e6)")
    al.add_argument("--out", default="-")
    al.set_defaults(func=cmd_allocate)

    bu = sub.add_parser("budget", help="end-to-end error budget: eta, min separation, allocation")
    bu.add_argument("config")
    bu.add_argument("--out", default="-")
    bu.add_argument("--expect", help="JSON object of expected summary values to compare against")
    bu.add_argument("--expect-tol-hz", type=_positive, default=5e6)
    bu.set_defaults(func=cmd_budget)

    ve = sub.add_parser("verify", help="re-check an allocation or budget record")
    ve.add_argument("result")
    ve.add_argument("--delta", type=float, help="conversion separation to check, Hz")
    ve.add_argument("--band", type=_band)
    ve.add_argument("--min-qubit-sep", type=_positive)
    ve.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
