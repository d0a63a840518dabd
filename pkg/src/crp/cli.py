"""Command-line front end.

Exit codes: 0 success, 1 bad input, 2 a result is limited by the node budget.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import analysis, experiments
from . import stochastic as st
from .astar import SolverConfig, solve
from .bay import InstanceSpec, ParseError, bay_from_dict, bay_to_dict, generate_uniform, instance_rngs, loads

EXIT_OK, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2


class InputError(Exception):
    pass


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _depths(text):
    out = []
    for x in text.split(","):
        x = x.strip()
        if x.upper() in ("N", "FULL"):
            out.append(None)
        elif x:
            out.append(int(x))
    return out


def _one(values, name):
    if len(values) != 1:
        raise InputError(f"--{name} takes a single value here")
    return values[0]


def _spec(args):
    return InstanceSpec(_one(args.tiers, "tiers"), _one(args.cols, "cols"), args.fill)


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _add_shape(p, tiers="4", cols="7", fill=3):
    p.add_argument("--tiers", type=_int_list, default=_int_list(tiers), help="tiers P")
    p.add_argument("--cols", type=_int_list, default=_int_list(cols), help="columns C (comma list where allowed)")
    p.add_argument("--fill", type=int, default=fill, help="containers per column h")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--workers", type=int, default=1, help="worker processes")


def _sampling(args):
    return st.SamplingParams(args.delta, args.eps, max_samples=args.samples)


# -- subcommands -------------------------------------------------------------------

def cmd_gen(args):
    spec = _spec(args)
    docs = []
    for i, rng in enumerate(instance_rngs(args.seed, args.instances)):
        d = bay_to_dict(generate_uniform(spec, rng))
        if args.known_frac is not None:
            n = spec.n_containers
            d["known"] = st.info_levels(n, [args.known_frac])[0]
            d["t_star"] = args.t_star or st.default_t_star(n)
            d["seed"] = args.seed * 1_000_003 + i
        docs.append(d)
    if args.out and args.instances > 1:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        for i, d in enumerate(docs):
            (outdir / f"bay_{i:05d}.json").write_text(json.dumps(d) + "\n")
    else:
        _emit("".join(json.dumps(d) + "\n" for d in docs), args.out)
    return EXIT_OK


def cmd_solve(args):
    try:
        text = Path(args.instance).read_text()
    except OSError as e:
        raise InputError(str(e)) from None
    stripped = text.strip()
    doc = json.loads(stripped) if stripped.startswith("{") else None
    if doc is not None and "known" in doc:
        return _solve_two_stage(doc, args)
    bay = loads(text)
    cfg = SolverConfig(node_budget=args.budget, lb_depth=args.lb_depth,
                       upper="TH" if args.th_width else "H", th_width=args.th_width or 2)
    if args.trace:
        with open(args.trace, "w") as fh:
            fh.write("level,bay,L,U,action\n")
            out = solve(bay, cfg, trace=fh)
    else:
        out = solve(bay, cfg)
    _emit(json.dumps(out.as_dict()) + "\n", args.out)
    return EXIT_OK if out.optimal else EXIT_BUDGET


def _solve_two_stage(doc, args):
    bay = bay_from_dict(doc)
    try:
        inst = st.TwoStageInstance(bay, int(doc["known"]), int(doc.get("t_star") or st.default_t_star(bay.n_containers)))
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"bad two-stage fields: {e}") from None
    rng = np.random.default_rng(doc.get("seed", args.seed))
    res = st.asa_star(inst, _sampling(args), range(1, inst.t_star - 1), rng=rng, clock=args.clock)
    cost = st.realized_cost(inst, res.moves)
    full = solve(bay, SolverConfig(node_budget=args.budget))
    _emit(json.dumps({"expected_cost": res.expected_cost, "realized": cost, "z_opt": full.z,
                      "samples": res.n_samples, "exhaustive": res.exhaustive,
                      "pruned_times": res.ledger.m,
                      "first_stage": [m.as_dict() for m in res.moves]}) + "\n", args.out)
    return EXIT_OK


def cmd_bench(args):
    rep = experiments.bench(_spec(args), args.instances, args.seed, args.th_width, args.budget, args.workers)
    text = experiments.to_csv(rep.rows)
    text += f"# instances={args.instances} excluded_by_budget={rep.excluded}\n"
    text += "# LA-5 rows are not produced: it allows repositioning moves outside the restricted problem\n"
    _emit(text, args.out)
    return EXIT_BUDGET if rep.excluded else EXIT_OK


def cmd_lb_study(args):
    rep = experiments.lb_study(_spec(args), args.instances, args.seed, args.depths, args.workers)
    text = experiments.to_csv(rep.stats)
    text += f"# root_optimal_fraction={rep.root_optimal_fraction:.6f} level0_mean_gap={rep.level0_gap:.6f}\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_gap_curve(args):
    if any(b < 1 for b in args.budgets):
        raise InputError("node budgets must be at least 1")
    rows = experiments.gap_study(_spec(args), args.instances, args.budgets, args.seed, args.workers)
    _emit(experiments.to_csv(rows), args.out)
    return EXIT_OK


def cmd_asymptotic(args):
    P = _one(args.tiers, "tiers")
    rows = analysis.convergence_experiment(args.fill, P, args.cols, args.instances, args.seed,
                                           with_opt=args.with_opt, budget=args.budget)
    text = analysis.rows_to_csv(rows)
    c, r2 = analysis.fit_inverse_c(rows)
    text += f"# fit ratio-1 = c/C: c={c:.6f} R2={r2:.6f}\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_two_stage(args):
    if args.study == "gaps":
        params = None if args.no_asa else _sampling(args)
        rows = experiments.value_of_information(_spec(args), args.instances, args.seed, args.known_frac,
                                                args.t_star, params, clock=args.clock, workers=args.workers)
        _emit(experiments.to_csv(rows), args.out)
    else:
        rows = experiments.info_bays_study(args.fill, _one(args.tiers, "tiers"), args.cols, args.instances,
                                           args.seed, args.known_frac, args.clock, args.workers)
        text = experiments.to_csv(rows)
        text += "# regime: h containers per column, not a full bay\n"
        _emit(text, args.out)
    return EXIT_OK


def cmd_error_bounds(args):
    m_list = args.m if args.m else [5]
    left, _ = experiments.error_bound_tables()
    text = experiments.to_csv(left)
    for m in m_list:
        _, right = experiments.error_bound_tables(m=m, d_min=args.d_min, delta=args.delta, eps=args.eps,
                                                  h=args.fill, C_list=args.cols)
        text += experiments.to_csv(right)
    text += experiments.to_csv(experiments.sample_size_table())
    _emit(text, args.out)
    return EXIT_OK


# -- parser ----------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="crp", description="Restricted container relocation toolkit")
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="generate uniform random bays as JSON")
    _add_shape(g)
    g.add_argument("--instances", type=int, default=1)
    g.add_argument("--known-frac", type=float, help="also write two-stage fields")
    g.add_argument("--t-star", type=int)
    g.set_defaults(fn=cmd_gen)

    s = sub.add_parser("solve", help="solve one bay file (JSON or text) and print JSON")
    s.add_argument("instance")
    s.add_argument("--budget", type=int, default=10**6)
    s.add_argument("--lb-depth", type=int, help="look-ahead depth (default: saturated)")
    s.add_argument("--th-width", type=int, help="use TH-L as upper bound with this width")
    s.add_argument("--trace", help="write a per-node CSV trace")
    s.add_argument("--delta", type=float, default=0.5)
    s.add_argument("--eps", type=float, default=0.05)
    s.add_argument("--samples", type=int, default=20, help="cap on sampled scenarios (two-stage files)")
    s.add_argument("--clock", choices=["relocations", "steps"], default="relocations")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_solve)

    b = sub.add_parser("bench", help="gap distribution of H and TH-L against A*")
    _add_shape(b)
    b.add_argument("--instances", type=int, default=10**4)
    b.add_argument("--budget", type=int, default=400_000)
    b.add_argument("--th-width", type=_int_list, default=[2])
    b.set_defaults(fn=cmd_bench)

    lb = sub.add_parser("lb-study", help="nodes to optimality per look-ahead depth")
    _add_shape(lb)
    lb.add_argument("--instances", type=int, default=10**4)
    lb.add_argument("--lb-depth", dest="depths", type=_depths, default=[0, 1, 2, None],
                    help="comma list of depths, N for saturated")
    lb.set_defaults(fn=cmd_lb_study)

    gc = sub.add_parser("gap-curve", help="guaranteed gap against the node budget")
    _add_shape(gc)
    gc.add_argument("--instances", type=int, default=10**4)
    gc.add_argument("--budget", dest="budgets", type=_int_list, default=[1, 10, 100, 1000, 10**4, 10**5])
    gc.set_defaults(fn=cmd_gap_curve)

    a = sub.add_parser("asymptotic", help="E[z_H]/E[S0] as the bay widens")
    _add_shape(a, cols="5,10,20,40")
    a.add_argument("--instances", type=int, default=10**4)
    a.add_argument("--with-opt", action="store_true", help="also solve every bay with A*")
    a.add_argument("--budget", type=int, default=10**6)
    a.set_defaults(fn=cmd_asymptotic)

    t = sub.add_parser("two-stage", help="value of information with a partially known order")
    _add_shape(t)
    t.add_argument("--study", choices=["gaps", "bays"], default="gaps")
    t.add_argument("--instances", type=int, default=500)
    t.add_argument("--known-frac", type=_float_list, default=[0.25, 0.375, 0.5, 0.625, 0.75, 0.9])
    t.add_argument("--t-star", type=int)
    t.add_argument("--delta", type=float, default=0.5)
    t.add_argument("--eps", type=float, default=0.05)
    t.add_argument("--samples", type=int, default=20, help="cap on sampled scenarios per path")
    t.add_argument("--clock", choices=["relocations", "steps"], default="relocations")
    t.add_argument("--no-asa", action="store_true", help="myopic heuristic only")
    t.set_defaults(fn=cmd_two_stage)

    e = sub.add_parser("error-bounds", help="closed-form loss bounds and sample sizes")
    e.add_argument("--delta", type=float, default=0.5)
    e.add_argument("--eps", type=float, default=0.05)
    e.add_argument("--d-min", type=float, default=1.0)
    e.add_argument("--m", type=_int_list, default=[5])
    e.add_argument("--fill", type=int, default=3)
    e.add_argument("--cols", type=_int_list, default=list(range(10, 55, 5)))
    e.add_argument("--out")
    e.set_defaults(fn=cmd_error_bounds)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return args.fn(args)
    except (InputError, ParseError, st.InvalidParams, ValueError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
