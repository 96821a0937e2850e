"""Batch front-end: load/save operators, run certificates, convergence
traces, constructions, and sampling campaigns.

Exit codes: 0 success, 2 invalid input, 3 falsification found,
4 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import constructions, typicality
from .certificates import (
    CertificateError,
    class_m_certificate,
    delta_for_corner,
    falsify,
    load_certificate,
    save_certificate,
)
from .core import ModelError, OperatorModel, adjoint
from .norms import (
    NonConvergenceError,
    make_certificate,
    norming_from_image,
    norming_vector,
    operator_norm,
    tail_certificate,
    verify_norming,
)
from .serialization import (
    dumps_canonical,
    load_json,
    load_operator,
    load_vector,
    operator_to_dict,
    save_operator,
    save_vector,
    vector_from_dict,
    vector_to_dict,
    write_text,
)
from .svgplot import line_plot
from .topologies import converge_report

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_FALSIFIED = 3
EXIT_NONCONVERGENCE = 4

SEQUENCES = ("prop_norm_deficit", "prop_zero_row", "prop_non_attaining")


def _emit(payload: dict, out_path=None) -> None:
    text = dumps_canonical(payload)
    if out_path:
        write_text(out_path, text)
    sys.stdout.write(text)


def _config_of(args: argparse.Namespace) -> dict:
    config = {k: v for k, v in vars(args).items() if k != "func" and v is not None}
    return config


def cmd_norm(args) -> int:
    T = load_operator(args.op)
    res = operator_norm(T, tol=args.tol, max_iter=args.max_iter)
    payload = {
        "config": _config_of(args),
        "value": res.value,
        "method": res.method,
        "iterations": res.iterations,
        "residual": res.residual,
        "attained": res.attained,
        "tail_index": res.tail_index,
        "norming": None if res.norming is None else vector_to_dict(res.norming),
    }
    _emit(payload, args.out)
    return EXIT_OK


def cmd_verify_norming(args) -> int:
    T = load_operator(args.op)
    u = load_vector(args.u)
    report = verify_norming(T, u, args.tol)
    payload = {
        "config": _config_of(args),
        "residual_norming": report.residual_norming,
        "residual_eigen": report.residual_eigen,
        "accepted": report.accepted,
        "tolerance": report.tolerance,
    }
    _emit(payload, args.out)
    return EXIT_OK


def _load_family(path, B):
    data = load_json(path)
    if not isinstance(data, dict) or "members" not in data:
        raise ModelError("family file must hold an object with a 'members' list")
    Badj = adjoint(B)
    members = []
    for entry in data["members"]:
        if "entries" in entry:
            members.append(make_certificate(Badj, vector_from_dict(entry)))
        elif "cofinite_from" in entry:
            members.append(tail_certificate(Badj, int(entry["cofinite_from"])))
        else:
            raise ModelError("family members carry 'entries' or 'cofinite_from'")
    return members


def cmd_certify(args) -> int:
    B = load_operator(args.op)
    if args.class_m:
        if not args.family:
            raise ModelError("--class-m needs a --family file")
        if args.rows is None:
            raise ModelError("--class-m needs --rows")
        family = _load_family(args.family, B)
        cert = class_m_certificate(B, family, args.eps, args.rows)
    else:
        if args.u:
            u = load_vector(args.u)
        else:
            res = operator_norm(B)
            if res.attained != "attained":
                raise ModelError(
                    "no norming vector available: pass --u or use an attaining center"
                )
            u = norming_from_image(B, norming_vector(B).u)
        cert = delta_for_corner(B, u, args.eps)
    if args.out:
        save_certificate(args.out, cert)
    from .certificates import certificate_to_dict

    _emit({"config": _config_of(args), "certificate": certificate_to_dict(cert)}, None)
    return EXIT_OK


def cmd_falsify(args) -> int:
    cert = load_certificate(args.cert)
    report = falsify(cert, trials=args.trials, climb_steps=args.climb_steps, seed=args.seed)
    payload = {
        "config": _config_of(args),
        "max_gap": report.max_gap,
        "epsilon": report.epsilon,
        "violated": report.violated,
    }
    _emit(payload, None)
    if report.violated:
        if args.witness_out:
            save_operator(args.witness_out, report.witness)
        return EXIT_FALSIFIED
    return EXIT_OK


def _build_sequence(name: str, params: dict, limit: OperatorModel):
    if name == "prop_norm_deficit":
        return constructions.seq_norm_deficit(limit, float(params.get("delta", 0.0)))
    if name == "prop_zero_row":
        return constructions.seq_zero_row(limit, int(params.get("l", 0)))
    if name == "prop_non_attaining":
        eps0 = float(params.get("eps0", 1.0))
        c = float(params.get("c", 0.5))
        r = float(params.get("r", 0.9))
        return constructions.seq_non_attaining(limit, lambda n: eps0 / (n + 2.0), c, r)
    raise ModelError(f"unknown sequence {name!r}; choose from {SEQUENCES}")


def cmd_converge(args) -> int:
    limit = load_operator(args.limit)
    params = json.loads(args.params) if args.params else {}
    seq = _build_sequence(args.seq, params, limit)
    report = converge_report(seq, limit, args.steps, args.m, args.r)
    csv_text = report.to_csv()
    if args.out:
        write_text(args.out, csv_text)
    if args.plot:
        series = {
            "wot": report.wot,
            "sot": report.sot,
            "adj": report.adj,
            "metric_hi": report.metric_hi,
        }
        write_text(args.plot, line_plot(report.steps, series, title=f"{args.seq} traces"))
    payload = {
        "config": _config_of(args),
        "summaries": {
            key: {"below_tol_at": s.below_tol_at, "floor": s.floor}
            for key, s in report.summaries.items()
        },
    }
    _emit(payload, None)
    if not args.out:
        sys.stdout.write(csv_text)
    return EXIT_OK


def cmd_construct(args) -> int:
    if args.kind == "extend":
        A = load_operator(args.op)
        B, cert = constructions.extend_with_full_norming(A, args.eps)
        if args.out_op:
            save_operator(args.out_op, B)
        if args.out_u:
            save_vector(args.out_u, cert.u)
        _emit(
            {
                "config": _config_of(args),
                "operator": operator_to_dict(B),
                "norming": vector_to_dict(cert.u),
                "residual_norming": cert.residual_norming,
                "residual_eigen": cert.residual_eigen,
            },
            None,
        )
        return EXIT_OK
    if args.kind == "embed":
        A = load_operator(args.op)
        T = constructions.density_embed(A, args.eps)
        if args.out_op:
            save_operator(args.out_op, T)
        _emit({"config": _config_of(args), "operator": operator_to_dict(T)}, None)
        return EXIT_OK
    if args.kind == "locate":
        center = load_operator(args.op)
        M, B, cert = constructions.locate_norming_representative(
            center, args.rows, args.eps, args.n0
        )
        if args.out_op:
            save_operator(args.out_op, B)
        if args.out_u:
            save_vector(args.out_u, cert.u)
        _emit(
            {
                "config": _config_of(args),
                "M": M,
                "operator": operator_to_dict(B),
                "norming": vector_to_dict(cert.u),
            },
            None,
        )
        return EXIT_OK
    if args.kind == "diag":
        D = constructions.diagonal_non_attainer(args.c, args.r)
        if args.out_op:
            save_operator(args.out_op, D)
        _emit({"config": _config_of(args), "operator": operator_to_dict(D)}, None)
        return EXIT_OK
    raise ModelError(f"unknown construction {args.kind!r}")


def cmd_sample(args) -> int:
    spec = typicality.SamplerSpec(
        dim=args.dim,
        p=args.p,
        distribution=args.dist,
        density=args.density,
        norm_target=args.norm_target,
        eta=args.eta,
        seed=args.seed,
    )
    probes = tuple(s for s in args.probes.split(",") if s) if args.probes else typicality.PROBE_NAMES
    report = typicality.run_campaign(spec, args.count, probes)
    csv_text = report.to_csv()
    if args.out:
        write_text(args.out, csv_text)
    payload = {
        "config": _config_of(args),
        "sampler": spec.provenance(),
        "count": report.count,
        "fractions": report.fractions,
        "counts": report.counts,
        "error_count": report.error_count,
        "wall_time_seconds": report.wall_time,
    }
    if args.summary:
        write_text(args.summary, dumps_canonical(payload))
    _emit(payload, None)
    if not args.out:
        sys.stdout.write(csv_text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="poscon",
        description="Numerical laboratory for positive contractions on lp",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_norm = sub.add_parser("norm", help="operator norm and attainment")
    p_norm.add_argument("--op", required=True)
    p_norm.add_argument("--tol", type=float, default=1e-13,
                        help="power-iteration stopping tolerance")
    p_norm.add_argument("--max-iter", type=int, default=10_000, dest="max_iter")
    p_norm.add_argument("--out")
    p_norm.set_defaults(func=cmd_norm)

    p_ver = sub.add_parser("verify-norming", help="residuals of a norming candidate")
    p_ver.add_argument("--op", required=True)
    p_ver.add_argument("--u", required=True)
    p_ver.add_argument("--tol", type=float, default=1e-8)
    p_ver.add_argument("--out")
    p_ver.set_defaults(func=cmd_verify_norming)

    p_cert = sub.add_parser("certify", help="produce a continuity certificate")
    p_cert.add_argument("--op", required=True)
    p_cert.add_argument("--u", help="norming vector for the adjoint (JSON vector file)")
    p_cert.add_argument("--eps", type=float, required=True)
    p_cert.add_argument("--class-m", action="store_true", dest="class_m")
    p_cert.add_argument("--family", help="JSON family file for --class-m")
    p_cert.add_argument("--rows", type=int, help="row count r for --class-m")
    p_cert.add_argument("--out")
    p_cert.set_defaults(func=cmd_certify)

    p_fal = sub.add_parser("falsify", help="stress-test a certificate")
    p_fal.add_argument("--cert", required=True)
    p_fal.add_argument("--trials", type=int, default=2000)
    p_fal.add_argument("--climb-steps", type=int, default=200, dest="climb_steps")
    p_fal.add_argument("--seed", type=int, default=0)
    p_fal.add_argument("--witness-out", dest="witness_out")
    p_fal.set_defaults(func=cmd_falsify)

    p_con = sub.add_parser("converge", help="gap traces of a named sequence")
    p_con.add_argument("--seq", required=True, choices=SEQUENCES)
    p_con.add_argument("--params", help="JSON parameter block")
    p_con.add_argument("--limit", required=True)
    p_con.add_argument("--steps", type=int, required=True)
    p_con.add_argument("--m", type=int, default=3)
    p_con.add_argument("--r", type=int, default=0)
    p_con.add_argument("--out")
    p_con.add_argument("--plot")
    p_con.set_defaults(func=cmd_converge)

    p_ext = sub.add_parser("construct", help="run an operator construction")
    p_ext.add_argument("kind", choices=("extend", "embed", "locate", "diag"))
    p_ext.add_argument("--op")
    p_ext.add_argument("--eps", type=float, default=0.1)
    p_ext.add_argument("--rows", type=int, default=0)
    p_ext.add_argument("--n0", type=int, default=0)
    p_ext.add_argument("--c", type=float, default=0.5)
    p_ext.add_argument("--r", type=float, default=0.9)
    p_ext.add_argument("--out-op", dest="out_op")
    p_ext.add_argument("--out-u", dest="out_u")
    p_ext.set_defaults(func=cmd_construct)

    p_sam = sub.add_parser("sample", help="Monte-Carlo campaign")
    p_sam.add_argument("--dim", type=int, required=True)
    p_sam.add_argument("--count", type=int, required=True)
    p_sam.add_argument("--p", type=float, default=2.0)
    p_sam.add_argument("--dist", default="uniform01",
                       choices=typicality.DISTRIBUTIONS)
    p_sam.add_argument("--density", type=float)
    p_sam.add_argument("--norm-target", default="leq1", dest="norm_target",
                       choices=typicality.NORM_TARGETS)
    p_sam.add_argument("--eta", type=float)
    p_sam.add_argument("--probes")
    p_sam.add_argument("--seed", type=int, default=0)
    p_sam.add_argument("--out")
    p_sam.add_argument("--summary")
    p_sam.set_defaults(func=cmd_sample)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except NonConvergenceError as exc:
        print(f"error: {exc} (best estimate {exc.best!r})", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (ModelError, CertificateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
