"""``mixchan`` command line: analyze, verify, tensor, bosonic.

Reports are JSON on stdout.  Exit codes: 0 all checks passed, 1 a check
failed, 2 parse error or invalid parameters, 3 invariant violation,
4 dimension limit exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import bosonic
from .channel import (
    MixedUnitaryChannel,
    ProductChannel,
    compose_as_stages,
    random_density_matrix,
    random_pure_states,
)
from .functionals import ConvexFunction, power, product_closed_form, profile_from_marginal, xlogx
from .group import DimensionLimitError
from .majorization import channel_majorized_report, majorization_condition, marginal
from .optimize import OptimizerConfig, additivity_report, maximize_lp, minimize_convex_trace
from .specfile import SpecInvariantError, SpecParseError, load_channel_spec

EXIT_OK, EXIT_CHECK_FAILED, EXIT_PARSE, EXIT_INVARIANT, EXIT_DIMENSION = 0, 1, 2, 3, 4


class UsageError(ValueError):
    pass


def _base(args) -> float:
    return np.e if args.log_base == "e" else 2.0


def _parse_function(text: str, base: float) -> ConvexFunction:
    if text == "entropy":
        return xlogx(base)
    if text.startswith("power:"):
        try:
            return power(float(text.split(":", 1)[1]))
        except ValueError as exc:
            raise UsageError(f"invalid --function {text!r}: {exc}") from exc
    raise UsageError(f"--function must be 'entropy' or 'power:p', got {text!r}")


def _check(value: float, tol: float, passed: bool) -> dict:
    return {"value": float(value), "tol": tol, "passed": bool(passed)}


def codimension_residual(channel: MixedUnitaryChannel, chunk: int = 256) -> float:
    """max |E(E_ij) - delta_ij I/n| over all matrix units; E(rho) = Tr(rho) I/n follows by linearity."""
    n = channel.n
    avg = MixedUnitaryChannel.uniform(channel.orders)
    eye = np.eye(n) / n
    worst = 0.0
    units = [(i, j) for i in range(n) for j in range(n)]
    for start in range(0, len(units), chunk):
        block = units[start:start + chunk]
        x = np.zeros((len(block), n, n), dtype=complex)
        for r, (i, j) in enumerate(block):
            x[r, i, j] = 1.0
        out = avg.apply_stack(x)
        for r, (i, j) in enumerate(block):
            if i == j:
                out[r] -= eye
        worst = max(worst, float(np.max(np.abs(out))))
    return worst


def _condition_dict(channel) -> dict:
    cond = majorization_condition(channel)
    out = {"satisfied": cond.satisfied, "clause": cond.clause}
    out["witness"] = None if cond.witness is None else [
        {"a": list(lab.a), "b": list(lab.b)} for lab in cond.witness
    ]
    return out


def _analysis(spec, args) -> tuple[dict, dict]:
    channel = spec.channel
    base = _base(args)
    profile = profile_from_marginal(marginal(channel), args.p, base, majorization_condition(channel).satisfied)
    codim = codimension_residual(channel)
    forcor = abs(profile.capacity + profile.s_min - np.log(channel.n) / np.log(base))
    results = {
        "orders": list(channel.orders.orders),
        "dimension": channel.n,
        "marginal": profile.marginal.tolist(),
        "condition": _condition_dict(channel),
        "closed_form": profile.to_dict(),
        "codimension_residual": codim,
    }
    checks = {
        "codimension": _check(codim, args.codim_tol, codim <= args.codim_tol),
        "capacity_identity": _check(forcor, 1e-12, forcor <= 1e-12),
    }
    return results, checks


def _config(args) -> OptimizerConfig:
    return OptimizerConfig(restarts=args.restarts, max_iters=args.max_iters, step=args.step,
                           grad_tol=args.grad_tol, seed=args.seed)


def cmd_analyze(args) -> dict:
    spec = load_channel_spec(args.spec)
    results, checks = _analysis(spec, args)
    return {"inputs": [spec.describe()], "results": results, "checks": checks}


def _numeric_block(res, func: ConvexFunction, closed: float, cond: bool, tol: float) -> tuple[dict, dict]:
    gap = res.best_value - closed
    block = {"function": func.name, "closed_form_value": closed, "gap": gap, **res.to_dict()}
    if func.name.startswith(("entropy", "xlogx")):
        block["numeric_s_min"] = -res.best_value
    checks = {}
    if cond:
        checks["closed_form_gap"] = _check(abs(gap), tol, abs(gap) <= tol)
    else:
        block["advisory"] = "majorization condition fails; closed form is not guaranteed"
    return block, checks


def cmd_verify(args) -> dict:
    spec = load_channel_spec(args.spec)
    channel = spec.channel
    base = _base(args)
    func = _parse_function(args.function, base)
    results, checks = _analysis(spec, args)
    cond = results["condition"]["satisfied"]
    cfg = _config(args)
    res = minimize_convex_trace(channel, func, cfg)
    closed = float(np.sum(func(marginal(channel))))
    block, extra = _numeric_block(res, func, closed, cond, args.gap_tol)
    results["numeric"] = block
    checks.update(extra)
    states = random_pure_states(channel.n, args.samples, np.random.default_rng(args.seed))
    rep = channel_majorized_report(channel, marginal(channel), states, tol=args.margin_tol)
    results["sampled_majorization"] = {"samples": args.samples, **rep.to_dict()}
    if cond:
        checks["sampled_margin"] = _check(rep.worst_margin, args.margin_tol, rep.satisfied)
    return {"inputs": [spec.describe()], "results": results, "checks": checks, "_per_restart": res.values}


def cmd_tensor(args) -> dict:
    specs = [load_channel_spec(path) for path in args.specs]
    if len(specs) == 1:
        args.spec = args.specs[0]
        return cmd_verify(args)
    channels = [s.channel for s in specs]
    product = ProductChannel(channels)
    base = _base(args)
    func = _parse_function(args.function, base)
    cfg = _config(args)
    closed = product_closed_form(channels, args.p, base)
    cond = closed.condition_satisfied
    report = additivity_report(channels, func, cfg)
    results = {
        "dims": list(product.dims),
        "dimension": product.n,
        "factor_conditions": [_condition_dict(c) for c in channels],
        "factor_marginals": [marginal(c).tolist() for c in channels],
        "star_marginal": closed.marginal.tolist(),
        "closed_form": closed.to_dict(),
        "additivity": report.to_dict(),
    }
    checks = {}
    if cond:
        checks["additivity_gap"] = _check(abs(report.gap), args.gap_tol, abs(report.gap) <= args.gap_tol)
    p = float(args.p[0])
    lp = maximize_lp(product, p, cfg)
    lp_resid = abs(lp.best_value - closed.lp[p])
    results["lp"] = {"p": p, "numeric": lp.best_value, "closed_form_product": closed.lp[p], "residual": lp_resid}
    if cond:
        checks["lp_multiplicativity"] = _check(lp_resid, args.gap_tol, lp_resid <= args.gap_tol)
    rng = np.random.default_rng(args.seed)
    rho = random_density_matrix(product.n, rng)
    stage_resid = float(np.max(np.abs(compose_as_stages(product, rho) - product.apply(rho))))
    results["stagewise_residual"] = stage_resid
    checks["stagewise_equals_joint"] = _check(stage_resid, 1e-12, stage_resid <= 1e-12)
    states = random_pure_states(product.n, args.samples, rng)
    rep = channel_majorized_report(product, closed.marginal, states, tol=args.margin_tol)
    results["sampled_majorization"] = {"samples": args.samples, **rep.to_dict()}
    if cond:
        checks["sampled_margin"] = _check(rep.worst_margin, args.margin_tol, rep.satisfied)
    return {"inputs": [s.describe() for s in specs], "results": results, "checks": checks,
            "_per_restart": report.joint.values}


def _load_constellation(path):
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read constellation {path}: {exc}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("points"), list) or not data["points"]:
        raise UsageError("constellation must be an object with a non-empty 'points' list")
    points = []
    for pt in data["points"]:
        if isinstance(pt, (int, float)) and not isinstance(pt, bool):
            points.append(complex(pt))
        elif isinstance(pt, list) and len(pt) == 2:
            points.append(complex(float(pt[0]), float(pt[1])))
        else:
            raise UsageError(f"constellation point must be a number or [re, im], got {pt!r}")
    prior = data.get("prior")
    prior = np.full(len(points), 1.0 / len(points)) if prior is None else np.asarray(prior, dtype=float)
    if prior.shape != (len(points),) or np.any(prior < 0) or abs(prior.sum() - 1) > 1e-9:
        raise UsageError("constellation prior must be a probability vector matching the points")
    return prior, np.array(points)


def cmd_bosonic(args) -> dict:
    base = _base(args)
    try:
        params = bosonic.AmplifierParams(args.k, args.nc, args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    vac = bosonic.amplifier_transform(params, bosonic.GaussianState.vacuum())
    results = {
        "params": {"k": params.k, "nc": params.nc, "n": params.n},
        "capacity": bosonic.amplifier_capacity(params, base),
        "vacuum_output": vac.to_dict(),
        "vacuum_output_entropy": bosonic.gaussian_entropy(vac, base),
    }
    checks = {}
    inputs = []
    if args.constellation:
        prior, points = _load_constellation(args.constellation)
        energy = bosonic.constellation_energy(prior, points)
        bound = bosonic.energy_bound(params.n)
        results["constellation"] = {
            "points": [[z.real, z.imag] for z in points],
            "prior": prior.tolist(),
            "energy": energy,
            "bound": bound,
            "violation": energy > bound + 1e-12,
            "coherent_outputs": [
                bosonic.amplifier_transform(params, bosonic.GaussianState.coherent(z)).to_dict() for z in points
            ],
        }
        checks["energy_constraint"] = _check(energy, bound, energy <= bound + 1e-12)
        inputs.append({"source": str(args.constellation)})
    return {"inputs": inputs, "results": results, "checks": checks}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p", type=float, action="append", help="l_p order(s) for the closed form (default 2)")
    p.add_argument("--log-base", choices=["2", "e"], default="2", help="logarithm base: bits (2) or nats (e)")
    p.add_argument("--codim-tol", type=float, default=1e-12)
    p.add_argument("--pretty", action="store_true", help="human-readable summary instead of JSON")
    p.add_argument("--csv", action="store_true", help="flat CSV tables instead of JSON")
    p.add_argument("--no-timings", action="store_true", help="omit the timings field")


def _add_verify(p: argparse.ArgumentParser, gap_tol: float) -> None:
    p.add_argument("--function", default="entropy", help="entropy | power:p")
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--step", type=float, default=0.1)
    p.add_argument("--grad-tol", type=float, default=1e-9)
    p.add_argument("--gap-tol", type=float, default=gap_tol)
    p.add_argument("--margin-tol", type=float, default=1e-10)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mixchan", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("analyze", help="marginal, majorization condition, closed-form profile")
    p.add_argument("spec")
    _add_common(p)
    p = sub.add_parser("verify", help="numeric optimum and sampled majorization vs closed form")
    p.add_argument("spec")
    _add_common(p)
    _add_verify(p, 1e-5)
    p = sub.add_parser("tensor", help="tensor product: additivity and multiplicativity checks")
    p.add_argument("specs", nargs="+")
    _add_common(p)
    _add_verify(p, 1e-4)
    p = sub.add_parser("bosonic", help="one-mode amplifier capacity and transforms")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--nc", type=float, default=0.0)
    p.add_argument("--n", type=float, default=0.0)
    p.add_argument("--constellation", help="JSON file {'points': [[re, im], ...], 'prior': [...]}")
    _add_common(p)
    return parser


COMMANDS = {"analyze": cmd_analyze, "verify": cmd_verify, "tensor": cmd_tensor, "bosonic": cmd_bosonic}


def _tolerances(args) -> dict:
    keys = ["codim_tol", "gap_tol", "margin_tol", "grad_tol"]
    return {k: getattr(args, k) for k in keys if hasattr(args, k)}


def _csv(report: dict, per_restart) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    res = report["results"]
    marg = res.get("marginal") or res.get("star_marginal")
    if marg is not None:
        writer.writerow(["table", "index", "value"])
        writer.writerows(["marginal", i, repr(v)] for i, v in enumerate(marg))
    if per_restart is not None:
        writer.writerows(["per_restart", i, repr(float(v))] for i, v in enumerate(per_restart))
    writer.writerows(["check:" + name, i, repr(c["value"])] for i, (name, c) in enumerate(report["checks"].items()))
    return buf.getvalue()


def _pretty(report: dict) -> str:
    lines = [f"mixchan {report['command']['name']}: {'PASS' if report['passed'] else 'FAIL'}"]
    res = report["results"]
    for key in ("dimension", "marginal", "star_marginal", "capacity"):
        if key in res:
            lines.append(f"  {key}: {res[key]}")
    if "closed_form" in res:
        cf = res["closed_form"]
        lines.append(f"  S_min = {cf['s_min']:.6f}  C = {cf['capacity']:.6f}  lp = {cf['lp']}")
    if "condition" in res:
        lines.append(f"  majorization condition: {res['condition']['satisfied']}")
    for name, c in report["checks"].items():
        lines.append(f"  [{'ok' if c['passed'] else 'FAIL'}] {name}: {c['value']:.3e} (tol {c['tol']:g})")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    if getattr(args, "p", None) is None:
        args.p = [2.0]
    start = time.perf_counter()
    try:
        body = COMMANDS[args.command](args)
    except (SpecParseError, UsageError) as exc:
        print(f"mixchan: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DimensionLimitError as exc:
        print(f"mixchan: error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except SpecInvariantError as exc:
        print(f"mixchan: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    per_restart = body.pop("_per_restart", None)
    report = {
        "command": {"name": args.command, "argv": argv},
        "inputs": body["inputs"],
        "tolerances": _tolerances(args),
        "seed": getattr(args, "seed", None),
        "results": body["results"],
        "checks": body["checks"],
        "passed": all(c["passed"] for c in body["checks"].values()),
    }
    if not args.no_timings:
        report["timings"] = {"total_s": time.perf_counter() - start}
    if args.csv:
        sys.stdout.write(_csv(report, per_restart))
    elif args.pretty:
        sys.stdout.write(_pretty(report))
    else:
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
