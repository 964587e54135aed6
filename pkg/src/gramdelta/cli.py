"""Command-line front end: every experiment as a subcommand with cached,
byte-reproducible CSV/JSON output.

Exit codes: 0 on success (a detected DH violation is data, not an error),
1 on usage or domain errors, 2 when a verdict-style experiment comes out
negative (corrected curve not established, repulsion conjecture violated).
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor

from . import adjust, curves, dh, discriminant, gram
from .cache import RecordStore, default_cache_dir
from .emit import write_csv, write_json
from .errors import DomainError, IndexRangeError, NotAGramPointError, TraceError
from .zmodel import CoefficientModel, find_zero_newton, riemann_model
from .gram import RecordSource

_MODELS = {"riemann": riemann_model, "dh": dh.dh_model}


def _model(args) -> CoefficientModel:
    return _MODELS[getattr(args, "model", "riemann")]()


def _store(args) -> RecordStore:
    return RecordStore(args.cache_dir)


def _meta(args, model_name: str) -> dict:
    return {"model": model_name, "seed": getattr(args, "seed", 0)}


def scan_records(model: CoefficientModel, n_from: int, n_to: int,
                 store: RecordStore | None = None,
                 threads: int = 1) -> list[gram.GramRecord]:
    """Classify a contiguous range, using and feeding the cache.

    Worker threads only compute; cache writes happen afterwards in index
    order, so the shard files do not depend on scheduling.
    """
    indices = range(n_from, n_to + 1)
    records: dict[int, gram.GramRecord] = {}
    missing = []
    for n in indices:
        rec = store.get(model.name, n) if store is not None else None
        if rec is None:
            missing.append(n)
        else:
            records[n] = rec
    if missing:
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                for rec in pool.map(lambda n: gram.classify(model, n), missing):
                    records[rec.n] = rec
        else:
            for n in missing:
                records[n] = gram.classify(model, n)
        if store is not None:
            for n in missing:
                store.put(model.name, records[n])
    return [records[n] for n in indices]


def _cmd_gram_scan(args) -> int:
    model = _model(args)
    recs = scan_records(model, args.n_from, args.n_to, _store(args), args.threads)
    write_csv(args.out, _meta(args, model.name),
              ["n", "t", "z", "zprime", "kind", "viscosity"],
              [[r.n, r.t, r.z_value, r.zprime_value, r.kind.value, r.viscosity]
               for r in recs],
              float_cols=["t", "z", "zprime", "viscosity"])
    return 0


def _cmd_gram_blocks(args) -> int:
    model = _model(args)
    source = RecordSource(model, _store(args))
    blocks = gram.blocks(model, args.n_from, args.n_to, source)
    write_csv(args.out, _meta(args, model.name),
              ["start", "length", "interior"],
              [[b.start, b.length, ";".join(str(i) for i in b.interior_bad)]
               for b in blocks])
    return 0


def _cmd_viscosity(args) -> int:
    model = _model(args)
    source = RecordSource(model, _store(args))
    report = gram.gbg_scan(model, args.n_from, args.n_to, bound=args.bound,
                           source=source)
    if args.bad_only or args.gbg:
        rows = [[b.n, b.t, b.viscosity, "bad", b.isolated, b.corrupt]
                for b in report.bad_points]
    else:
        rows = []
        bad = {b.n: b for b in report.bad_points}
        for n in range(args.n_from, args.n_to + 1):
            rec = source.get(n)
            b = bad.get(n)
            rows.append([n, rec.t, rec.viscosity, rec.kind.value,
                         b.isolated if b else False, b.corrupt if b else False])
    meta = _meta(args, model.name)
    meta["bound"] = args.bound
    meta["gbg_conjecture_holds"] = report.conjecture_holds
    write_csv(args.out, meta,
              ["n", "t", "viscosity", "kind", "isolated", "corrupt"], rows,
              float_cols=["t", "viscosity"])
    if args.gbg and not report.conjecture_holds:
        return 2
    return 0


def _cmd_discriminant(args) -> int:
    model = _model(args)
    if args.curve == "corrected":
        return _emit_corrected(args, model, curves.corrected_curve(
            model, args.n, tau=args.tau, steps=args.steps))
    curve = curves.linear_curve(model, args.n)
    trace = discriminant.track_extremum(model, args.n, curve, steps=args.steps)
    meta = _meta(args, model.name)
    meta["n"] = args.n
    meta["verdict"] = trace.status.value
    if trace.r_event is not None:
        meta["r_event"] = repr(trace.r_event)
    write_csv(args.out, meta, ["r", "g", "delta", "ztt"],
              [[s.r, s.g, s.delta, s.ztt] for s in trace.samples],
              float_cols=["r", "g", "delta", "ztt"])
    return 0


def _emit_corrected(args, model, report) -> int:
    meta = _meta(args, model.name)
    meta["n"] = args.n
    meta["verdict"] = report.verdict
    meta["shift_set"] = ";".join(str(k) for k in sorted(report.shift_set))
    write_csv(args.out, meta, ["stage", "r1", "r2", "g", "delta"],
              [[p.stage, p.r1, p.r2, p.g, p.delta] for p in report.points],
              float_cols=["r1", "r2", "g", "delta"])
    summary = {
        "n": args.n, "verdict": report.verdict,
        "shift_set": sorted(report.shift_set),
        "shift_warning": report.shift_warning,
        "shift_truncated": report.shifting.truncated,
        "exit_point": list(report.shifting.exit_point),
        "delta_end": report.delta_end,
        "energy_ok": report.descent.energy_ok,
    }
    if args.out not in (None, "-"):
        write_json(None, summary)
    return 0 if report.verdict == "true" else 2


def _cmd_curve_corrected(args) -> int:
    model = _model(args)
    return _emit_corrected(args, model, curves.corrected_curve(
        model, args.n, tau=args.tau, steps=args.steps))


def _cmd_hessian(args) -> int:
    model = _model(args)
    rep = discriminant.closed_forms(model, args.n)
    write_json(args.out, {
        "n": args.n,
        "hessian": rep.hessian_quadratic,
        "hessian_constant": rep.hessian_constant,
        "zprime_at_ones": rep.zprime_at_ones,
        "gradient_identity_residual": rep.gradient_identity_residual,
    })
    return 0


def _cmd_closed_forms(args) -> int:
    model = _model(args)
    rep = discriminant.closed_forms(model, args.n)
    if args.out not in (None, "-"):
        meta = _meta(args, model.name)
        meta["n"] = args.n
        write_csv(args.out, meta, ["k", "grad_delta", "grad_gram"],
                  [[k + 1, rep.grad_delta[k], rep.grad_gram[k]]
                   for k in range(rep.grad_delta.shape[0])],
                  float_cols=["grad_delta", "grad_gram"])
    write_json(None, {
        "n": args.n,
        "hessian": rep.hessian_quadratic,
        "hessian_constant": rep.hessian_constant,
        "zprime_at_ones": rep.zprime_at_ones,
        "gradient_identity_residual": rep.gradient_identity_residual,
        "grad_delta_head": [float(x) for x in rep.grad_delta[:16]],
        "grad_gram_head": [float(x) for x in rep.grad_gram[:16]],
    })
    return 0


def _cmd_adjustments(args) -> int:
    model = _model(args)
    rep = adjust.adjustments(model, args.n, args.neighbor)
    if args.out not in (None, "-"):
        meta = _meta(args, model.name)
        meta["n"] = args.n
        meta["neighbor"] = args.neighbor
        write_csv(args.out, meta, ["k", "phase", "alpha_c", "alpha_s"],
                  [[k + 1, rep.phases[k], rep.alpha_c[k], rep.alpha_s[k]]
                   for k in range(rep.phases.shape[0])],
                  float_cols=["phase", "alpha_c", "alpha_s"])
    write_json(None, {
        "n": args.n, "neighbor_mode": rep.neighbor_mode,
        "zc_minus": rep.zc_minus, "zc_plus": rep.zc_plus,
        "zs_minus": rep.zs_minus, "zs_plus": rep.zs_plus,
        "z_reference": rep.z_reference, "zprime_reference": rep.zprime_reference,
        "residual_z": rep.residual_z, "residual_zprime": rep.residual_zprime,
        "excluded_c": list(rep.excluded_c), "excluded_s": list(rep.excluded_s),
    })
    return 0


def _cmd_stages(args) -> int:
    model = _model(args)
    rep = adjust.stage_analysis(model, args.n)
    if args.out not in (None, "-"):
        meta = _meta(args, model.name)
        meta["n"] = args.n
        write_csv(args.out, meta, ["k", "z_partial", "zprime_partial"],
                  [[k + 1, rep.z_partials[k], rep.zprime_partials[k]]
                   for k in range(rep.z_partials.shape[0])],
                  float_cols=["z_partial", "zprime_partial"])
    write_json(None, {
        "n": args.n, "surge_end": rep.surge_end, "middle": list(rep.middle),
        "surge_magnitude": rep.surge_magnitude,
        "post_surge_net_change": rep.post_surge_net_change,
        "initial_max_abs_zprime": rep.initial_max_abs_zprime,
        "final_net_change": rep.final_net_change,
        "middle_rms_dev": rep.middle_rms_dev,
        "zprime": rep.zprime_partials[-1], "z": rep.z_partials[-1],
    })
    return 0


def _cmd_mc(args) -> int:
    model = _model(args)
    gv = adjust.gram_vectors(model, args.n, trials=args.trials, seed=args.seed)
    meta = _meta(args, model.name)
    meta["n"] = args.n
    meta["trials"] = args.trials
    write_csv(args.out, meta, ["k", "raw", "sorted", "baseline", "essential"],
              [[k + 1, gv.raw[k], gv.sorted_v[k], gv.baseline[k], gv.essential[k]]
               for k in range(gv.raw.shape[0])],
              float_cols=["raw", "sorted", "baseline", "essential"])
    return 0


def _cmd_newton(args) -> int:
    model = _model(args)
    if args.index is None and args.t0 is None:
        raise DomainError("newton needs --index or --t0")
    t0 = args.t0 if args.t0 is not None else gram.core_zero(model, args.index)
    result = find_zero_newton(model, t0)
    write_json(args.out, {
        "t0": t0, "t": result.t, "converged": result.converged,
        "final_value": result.final_value, "iterates": result.iterates,
    })
    return 0


def _cmd_dh_violation(args) -> int:
    rep = dh.dh_violation_experiment(steps=args.steps)
    write_json(args.out, {
        "n": rep.n, "g": rep.g, "violation": rep.violation,
        "collision_r": rep.collision_r, "delta_end": rep.delta_end,
        "first_order_deviation_ratio": rep.first_order_deviation_ratio,
        "max_displacement": rep.max_displacement,
        "displacement_bound": rep.displacement_bound,
    })
    return 0


def _cmd_cache(args) -> int:
    store = _store(args)
    if args.action == "status":
        write_json(None, store.status())
    else:
        removed = store.clear()
        write_json(None, {"cleared_files": removed})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gdl", description="Gram discriminant experiments")

    def common(p, model=True):
        p.add_argument("--cache-dir", default=None,
                       help=f"cache directory (default {default_cache_dir()})")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--out", default=None, help="output path (default stdout)")
        if model:
            p.add_argument("--model", choices=sorted(_MODELS), default="riemann")

    sub = parser.add_subparsers(dest="command", required=True)

    gram_p = sub.add_parser("gram", help="Gram point scans and blocks")
    gram_sub = gram_p.add_subparsers(dest="subcommand", required=True)
    p = gram_sub.add_parser("scan")
    p.add_argument("--from", dest="n_from", type=int, required=True)
    p.add_argument("--to", dest="n_to", type=int, required=True)
    common(p)
    p.set_defaults(func=_cmd_gram_scan)
    p = gram_sub.add_parser("blocks")
    p.add_argument("--from", dest="n_from", type=int, required=True)
    p.add_argument("--to", dest="n_to", type=int, required=True)
    common(p)
    p.set_defaults(func=_cmd_gram_blocks)

    p = sub.add_parser("viscosity", help="bad-point viscosities and G-B-G scan")
    p.add_argument("--from", dest="n_from", type=int, required=True)
    p.add_argument("--to", dest="n_to", type=int, required=True)
    p.add_argument("--bad-only", action="store_true")
    p.add_argument("--gbg", action="store_true",
                   help="evaluate the repulsion conjecture (exit 2 on violation)")
    p.add_argument("--bound", type=float, default=4.0)
    common(p)
    p.set_defaults(func=_cmd_viscosity)

    p = sub.add_parser("discriminant", help="discriminant trace along a curve")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--curve", choices=["linear", "corrected"], default="linear")
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--tau", type=float, default=1.5)
    common(p)
    p.set_defaults(func=_cmd_discriminant)

    p = sub.add_parser("hessian", help="second-order Hessian at g_n")
    p.add_argument("--n", type=int, required=True)
    common(p)
    p.set_defaults(func=_cmd_hessian)

    p = sub.add_parser("closed-forms", help="gradients and Hessian at the origin")
    p.add_argument("--n", type=int, required=True)
    common(p)
    p.set_defaults(func=_cmd_closed_forms)

    p = sub.add_parser("adjustments", help="neighbour adjustments at g_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--neighbor", choices=["synthetic", "true"], default="synthetic")
    common(p)
    p.set_defaults(func=_cmd_adjustments)

    p = sub.add_parser("stages", help="partial-sum stage analysis at g_n")
    p.add_argument("--n", type=int, required=True)
    common(p)
    p.set_defaults(func=_cmd_stages)

    p = sub.add_parser("mc", help="Monte-Carlo Gram vectors")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=1000)
    common(p)
    p.set_defaults(func=_cmd_mc)

    p = sub.add_parser("newton", help="Newton iteration from a core zero")
    p.add_argument("--index", type=int, default=None)
    p.add_argument("--t0", type=float, default=None)
    common(p)
    p.set_defaults(func=_cmd_newton)

    curve_p = sub.add_parser("curve", help="corrected connecting curve")
    curve_sub = curve_p.add_subparsers(dest="subcommand", required=True)
    p = curve_sub.add_parser("corrected")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tau", type=float, default=1.5)
    p.add_argument("--steps", type=int, default=200)
    common(p)
    p.set_defaults(func=_cmd_curve_corrected)

    dh_p = sub.add_parser("dh", help="Davenport-Heilbronn experiments")
    dh_sub = dh_p.add_subparsers(dest="subcommand", required=True)
    p = dh_sub.add_parser("violation")
    p.add_argument("--steps", type=int, default=200)
    common(p, model=False)
    p.set_defaults(func=_cmd_dh_violation)

    p = sub.add_parser("cache", help="cache maintenance")
    p.add_argument("action", choices=["status", "clear"])
    common(p, model=False)
    p.set_defaults(func=_cmd_cache)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (DomainError, IndexRangeError, NotAGramPointError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except TraceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
