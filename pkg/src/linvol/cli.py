"""Command-line driver.

Exit codes: 0 success, 1 input/usage error, 2 negative mathematical
verdict (the computation itself succeeded).  Errors are written to stderr
as JSON lines with {code, message, context}.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import cohom, io, measure, rauzy, roth
from .errors import DiagnosticsFailed, LinvolError
from .genperm import (GeneralizedPermutation, double_cover, irreducibility_test,
                      is_excluded_stratum, stratum)
from .involution import LengthData, LinearInvolution
from .numbers import parse_exact


def _load_blob(text):
    if text is None:
        return None
    if os.path.exists(text):
        with open(text) as fh:
            return json.load(fh)
    return json.loads(text)


def _perm(args):
    data = _load_blob(args.perm)
    if data is None:
        raise LinvolError("missing --perm")
    return GeneralizedPermutation.from_json(data)


def _lengths(args, p):
    data = _load_blob(args.lengths) if getattr(args, "lengths", None) else None
    if data is None:
        return measure.sample_lengths(p, seed=args.seed, mode="rational")
    return LengthData.from_json(data).values


def _outdir(args):
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    return out


def cmd_validate(args):
    p = _perm(args)
    irr = irreducibility_test(p)
    summary = {
        "command": "validate",
        "perm": p.to_json(),
        "d": p.d,
        "type": list(p.row_type()),
        "classical": p.is_classical(),
        "irreducible": irr,
    }
    if irr:
        s = stratum(p)
        cov = double_cover(p)
        summary["stratum"] = {"orders": list(s.orders), "genus": s.genus,
                              "orientable": s.orientable, "label": s.label(),
                              "excluded": is_excluded_stratum(s)}
        summary["cover"] = {"minus_dimension": cov.minus_dimension(),
                            "plus_dimension": cov.plus_dimension()}
    io.write_json(os.path.join(_outdir(args), "validate.json"), summary)
    print(json.dumps(io.render(summary), sort_keys=True))
    return 0


def cmd_induct(args):
    p = _perm(args)
    T = LinearInvolution(p, _lengths(args, p))
    rows = []
    cur = T
    letters = sorted(p.alphabet)
    for k in range(args.steps):
        cur, arrow, _ = rauzy.step(cur)
        rows.append([k + 1, arrow.winner, arrow.loser, arrow.row]
                    + [cur.lengths[a] for a in letters])
    out = _outdir(args)
    io.write_csv(os.path.join(out, "induct.csv"),
                 ["step", "winner", "loser", "row"] + [f"len_{a}" for a in letters], rows)
    summary = {"command": "induct", "perm": p.to_json(), "steps": args.steps,
               "winners": [r[1] for r in rows], "seed": args.seed}
    io.write_json(os.path.join(out, "induct.json"), summary)
    print(json.dumps(io.render(summary), sort_keys=True))
    return 0


def cmd_diagram(args):
    p = _perm(args)
    diag = rauzy.build_diagram(p)
    out = _outdir(args)
    io.write_csv(
        os.path.join(out, "diagram.csv"),
        ["source_top", "source_bottom", "winner", "loser", "row", "target_top", "target_bottom"],
        [
            [" ".join(a.source.top), " ".join(a.source.bottom), a.winner, a.loser, a.row,
             " ".join(a.target.top), " ".join(a.target.bottom)]
            for a in diag.arrows
        ],
    )
    summary = {"command": "diagram", "perm": p.to_json(),
               "vertices": len(diag.vertices), "arrows": diag.arrow_count()}
    io.write_json(os.path.join(out, "diagram.json"), summary)
    print(json.dumps(io.render(summary), sort_keys=True))
    return 0


def cmd_roth(args):
    p = _perm(args)
    T = LinearInvolution(p, _lengths(args, p))
    config = roth.RothConfig(eps=Fraction(args.epsilon).limit_denominator(100),
                             c_eps=Fraction(args.ceps), theta=args.theta, K=args.steps)
    report, path = roth.build_report(T, config)
    out = _outdir(args)
    io.write_csv(
        os.path.join(out, "roth_profile.csv"),
        ["k", "normZ", "normQ", "matrix_ratio", "length_ratio"],
        [
            [k, report.growth.norms_Z[k], report.growth.norms_Q[k],
             report.growth.matrix_ratios[k], report.growth.length_ratios[k]]
            for k in range(len(report.growth.norms_Z))
        ],
    )
    summary = {
        "command": "roth",
        "perm": p.to_json(),
        "config": {"eps": str(config.eps), "c_eps": str(config.c_eps),
                   "theta": config.theta, "K": config.K, "seed": args.seed},
        "blocks": report.blocks,
        "eps_fit": report.eps_fit,
        "theta_hat": report.gap.theta_hat,
        "translation_sup": max(report.translation["sup_by_level"]),
        "verdicts": report.verdicts,
        "overall": report.overall(),
    }
    io.write_json(os.path.join(out, "roth.json"), summary)
    print(json.dumps(io.render(summary), sort_keys=True))
    return 0 if report.overall() else 2


def cmd_lyapunov(args):
    p = _perm(args)
    T = LinearInvolution(p, _lengths(args, p))
    rep = roth.lyapunov_exponents(T, args.steps, family=args.family, seed=args.seed)
    out = _outdir(args)
    io.write_csv(os.path.join(out, "lyapunov.csv"), ["rank", "exponent", "std_error"],
                 [[i + 1, e, s] for i, (e, s) in enumerate(zip(rep.exponents, rep.std_errors))])
    summary = {"command": "lyapunov", "perm": p.to_json(), "family": rep.family,
               "blocks": rep.blocks, "exponents": rep.exponents,
               "std_errors": rep.std_errors, "seed": args.seed, "steps": args.steps}
    io.write_json(os.path.join(out, "lyapunov.json"), summary)
    print(json.dumps(io.render(summary), sort_keys=True))
    return 0


def cmd_solve(args):
    p = _perm(args)
    T = LinearInvolution(p, _lengths(args, p))
    spec = _load_blob(args.phi) if args.phi else []
    phi = cohom.make_function(T, spec)
    path = rauzy.accelerate(T, args.steps)
    config = roth.RothConfig(eps=Fraction(args.epsilon).limit_denominator(100),
                             c_eps=Fraction(args.ceps), K=args.steps)
    sol = cohom.solve(phi, path, K=args.steps, tol=args.tol, config=config,
                      orbit_len=args.orbit)
    rep = cohom.verify(phi, sol)
    out = _outdir(args)
    io.write_csv(os.path.join(out, "solve_orbit.csv"), ["step", "x", "level", "psi"],
                 [[j, pt[0], pt[1], v] for j, (pt, v) in
                  enumerate(zip(sol.psi_points, sol.psi_values))])
    io.emit_plotdata(sol.decade_maxima, os.path.join(out, "solve_decades.csv"),
                     xlabel="orbit_length", ylabel="max_abs_psi")
    summary = {
        "command": "solve",
        "perm": p.to_json(),
        "config": {"K": args.steps, "tol": args.tol, "orbit": args.orbit, "seed": args.seed},
        "chi": {a: sol.chi[i] for i, a in enumerate(sol.letters)},
        "t_star": sol.t_star,
        "bound": sol.bound,
        "residual_exact_zero": rep.residual_exact_zero,
        "growth_factors": rep.growth_factors,
        "flagged_unbounded": rep.flagged_unbounded,
    }
    io.write_json(os.path.join(out, "solve.json"), summary)
    print(json.dumps(io.render(summary), sort_keys=True))
    return 2 if rep.flagged_unbounded else 0


def cmd_measure(args):
    p = _perm(args)
    out = _outdir(args)
    if args.experiment == "condition_a":
        res = measure.montecarlo_condition_a(
            p, args.samples, args.steps, Fraction(args.epsilon).limit_denominator(100),
            Fraction(args.ceps), seed=args.seed)
        summary = {"command": "measure", "experiment": "condition_a",
                   "perm": p.to_json(), **res}
        verdict_ok = res["fraction"] >= args.threshold
    elif args.experiment == "qext":
        diag = rauzy.build_diagram(p)
        subset = args.subset.split(",") if args.subset else sorted(p.alphabet)[:2]
        res = measure.check_qext_lemma(diag, subset, args.steps)
        summary = {"command": "measure", "experiment": "qext", "perm": p.to_json(),
                   "subset": subset, "paths": res["paths_checked"],
                   "max_ratio": res["max_ratio"], "bound": res["bound"], "ok": res["ok"]}
        verdict_ok = res["ok"]
    elif args.experiment == "eta":
        res = measure.eta_estimate(p, args.samples, args.steps, seed=args.seed)
        summary = {"command": "measure", "experiment": "eta", "perm": p.to_json(), **res}
        verdict_ok = res["wilson"][0] > 0
    else:
        raise LinvolError(f"unknown experiment {args.experiment!r}")
    io.write_json(os.path.join(out, f"measure_{args.experiment}.json"), summary)
    print(json.dumps(io.render(summary), sort_keys=True))
    return 0 if verdict_ok else 2


def build_parser():
    ap = argparse.ArgumentParser(prog="linvol",
                                 description="linear involutions: renormalization and diagnostics")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--perm", help="permutation JSON (inline or file path)")
        sp.add_argument("--lengths", help="lengths JSON (inline or file path); sampled if absent")
        sp.add_argument("--steps", type=int, default=10)
        sp.add_argument("--samples", type=int, default=100)
        sp.add_argument("--epsilon", type=float, default=0.5)
        sp.add_argument("--ceps", type=float, default=10.0)
        sp.add_argument("--theta", type=float, default=0.1)
        sp.add_argument("--tol", type=float, default=1e-4)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=None)
        sp.add_argument("--format", choices=["json", "csv"], default="json")

    for name, fn in [("validate", cmd_validate), ("induct", cmd_induct),
                     ("diagram", cmd_diagram), ("roth", cmd_roth),
                     ("lyapunov", cmd_lyapunov), ("solve", cmd_solve),
                     ("measure", cmd_measure)]:
        sp = sub.add_parser(name)
        common(sp)
        sp.set_defaults(fn=fn)
        if name == "lyapunov":
            sp.add_argument("--family", choices=["plus", "minus", "full"], default="full")
        if name == "solve":
            sp.add_argument("--phi", help="observable spec JSON (inline or file)")
            sp.add_argument("--orbit", type=int, default=2000)
        if name == "measure":
            sp.add_argument("--experiment", choices=["condition_a", "qext", "eta"],
                            default="condition_a")
            sp.add_argument("--subset", help="comma-separated letters for qext")
            sp.add_argument("--threshold", type=float, default=0.95)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except DiagnosticsFailed as e:
        print(json.dumps(e.record()), file=sys.stderr)
        return 2
    except LinvolError as e:
        print(json.dumps(e.record()), file=sys.stderr)
        return 1
    except (json.JSONDecodeError, ValueError, KeyError) as e:
        print(json.dumps({"code": "InputError", "message": str(e), "context": {}}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
