"""``sinrsched`` command line.

Exit status: 0 on success, 1 when a check fails or an input is infeasible,
2 on parse or usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import List, Optional

from . import exactoracle as xo
from . import schedulers as sch
from .errors import OracleScaleError, ParseError, PreconditionError, SinrError, ValidationError
from .instancegen import (
    GenSpec,
    capacity_to_dict,
    instance_digest,
    parse_instance,
    parse_result,
    schedule_to_dict,
    serialize_instance,
)
from .linkgraphs import class_params
from .metricspace import c_prime, equilength_ratio_bound, z1, z2
from .sinrcore import Instance, PowerAssignment, is_p_signal, is_sinr_feasible, max_affectance

log = logging.getLogger("sinrsched")

SCHEDULE_ALGOS = ("udg", "groups", "online", "mean")
CAPACITY_ALGOS = ("udg", "udg-weighted", "groups", "random", "mean", "mean-weighted")


class UsageError(Exception):
    pass


def _read_instance(path: str, mode: Optional[str] = None) -> Instance:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e}")
    inst = parse_instance(text)
    if mode is not None and mode != inst.mode:
        inst = inst.replace(mode=mode)
    return inst


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _emit(report: dict, fmt: str) -> None:
    if fmt == "text":
        for k, v in report.items():
            print(f"{k:>16}: {v}")
        print()
    else:
        print(json.dumps(report, sort_keys=True))


def run_schedule(inst: Instance, algo: str) -> sch.Schedule:
    L = list(range(inst.n))
    if algo == "udg":
        return sch.schedule_equilength_udg(L, inst)
    if algo == "groups":
        return sch.schedule_lengthgroups_uniform(L, inst)
    if algo == "online":
        return sch.online_schedule(L, inst)
    if algo == "mean":
        return sch.schedule_meanpower(L, inst)
    raise UsageError(f"unknown schedule algorithm {algo!r}")


def run_capacity(inst: Instance, algo: str, seed: int) -> sch.CapacityResult:
    L = list(range(inst.n))
    if algo == "udg":
        return sch.capacity_equilength(L, inst)
    if algo == "udg-weighted":
        return sch.weighted_capacity_equilength(L, inst)
    if algo == "groups":
        from .linkgraphs import length_groups

        groups, _ = length_groups(L, inst)
        results = [sch.capacity_equilength(g, inst) for g in groups.values()]
        best = max(results, key=lambda r: r.size, default=None)
        if best is None:
            return sch.capacity_equilength([], inst)
        return sch.CapacityResult(best.chosen, best.power, best.total_weight, "groups", {})
    if algo == "random":
        return sch.capacity_random_group(L, inst, seed)
    if algo == "mean":
        return sch.capacity_meanpower(L, inst)
    if algo == "mean-weighted":
        return sch.weighted_capacity_meanpower(L, inst)
    raise UsageError(f"unknown capacity algorithm {algo!r}")


def _power(spec: str, inst: Instance) -> PowerAssignment:
    try:
        return PowerAssignment.parse(spec, inst.alpha)
    except ValidationError as e:
        raise UsageError(str(e))


def _feasibility(spec: str, inst: Instance):
    if spec == "pc":
        return xo.POWER_CONTROL
    return _power(spec, inst)


# -- subcommands -------------------------------------------------------------------


def cmd_gen(args) -> int:
    kind = args.kind
    if kind in ("random", "equilength"):
        params = dict(n=args.n, side=args.side, alpha=args.alpha, beta=args.beta, noise=args.noise,
                      mode=args.mode, weights=args.weights)
        if kind == "random":
            params.update(len_min=args.len_min, len_max=args.len_max)
        else:
            params.update(d=args.len_min)
    elif kind == "grid":
        params = dict(m=args.m, q=args.q, alpha=args.alpha, beta=args.beta, mode=args.mode)
    else:
        params = dict(n=args.n, t=args.t, c1=args.c1, alpha=args.alpha, variant=args.variant,
                      beta=args.beta, precision=args.precision)
    inst = GenSpec(kind, params, args.seed).build()
    _write(args.output, serialize_instance(inst))
    return 0


def cmd_check(args) -> int:
    inst = _read_instance(args.input, args.mode)
    try:
        text = Path(args.schedule).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {args.schedule}: {e}")
    doc = parse_result(text, inst)
    power = doc["power"]
    if args.power:
        power = _power(args.power, inst)
    if power is None:
        raise UsageError("no power assignment in the schedule file; pass --power")
    p = args.p or doc["p_certified"] or inst.beta
    seen = set()
    ok = True
    per_slot = []
    for k, slot in enumerate(doc["slots"]):
        if seen & set(slot):
            ok = False
            log.error("slot %d repeats a link", k)
        seen |= set(slot)
        good = is_sinr_feasible(slot, power, inst) if args.sinr else is_p_signal(slot, power, p, inst)
        per_slot.append(good)
        ok &= good
    _emit({"check": "pass" if ok else "fail", "p": p, "power": power.to_dict(),
           "slots_ok": per_slot}, args.format)
    return 0 if ok else 1


def _base_report(inst: Instance, algo: str, args) -> dict:
    return {"instance": instance_digest(inst), "algorithm": algo, "mode": inst.mode,
            "seed": getattr(args, "seed", None)}


def cmd_schedule(args) -> int:
    inst = _read_instance(args.input, args.mode)
    sch.warn_if_small_beta(inst)
    t0 = time.perf_counter()
    sched = run_schedule(inst, args.algo)
    report = _base_report(inst, args.algo, args)
    report.update(params=sched.params, slots=sched.length, p_certified=sched.p_certified,
                  max_affectance=sched.diagnostics["max_affectance"],
                  wall_time=round(time.perf_counter() - t0, 6))
    if args.power:
        P = _power(args.power, inst)
        report["under_power"] = {"power": P.to_dict(),
                                 "max_affectance": [max_affectance(s, P, inst) for s in sched.slots]}
    if args.output:
        _write(args.output, json.dumps(schedule_to_dict(sched, inst), indent=1) + "\n")
    _emit(report, args.format)
    return 0


def cmd_capacity(args) -> int:
    inst = _read_instance(args.input, args.mode)
    sch.warn_if_small_beta(inst)
    t0 = time.perf_counter()
    res = run_capacity(inst, args.algo, args.seed)
    report = _base_report(inst, args.algo, args)
    report.update(params=res.params, capacity=res.size, weight=res.total_weight,
                  max_affectance=[max_affectance(res.chosen, res.power, inst)],
                  wall_time=round(time.perf_counter() - t0, 6))
    if args.power:
        P = _power(args.power, inst)
        report["under_power"] = {"power": P.to_dict(), "sinr_feasible": is_sinr_feasible(res.chosen, P, inst)}
    if args.output:
        _write(args.output, json.dumps(capacity_to_dict(res, inst), indent=1) + "\n")
    _emit(report, args.format)
    return 0


def _oracle_value(inst, problem, feas, budget):
    L = list(range(inst.n))
    if problem == "schedule":
        count, parts = xo.opt_schedule(L, feas, inst, budget)
        return count, parts
    if problem == "capacity":
        chosen = xo.opt_capacity(L, feas, inst, budget)
        return len(chosen), [chosen]
    chosen = xo.opt_weighted_capacity(L, feas, inst, budget)
    return sum(inst.links[i].weight for i in chosen), [chosen]


def cmd_oracle(args) -> int:
    inst = _read_instance(args.input, args.mode)
    budget = xo.OracleBudget.from_env()
    t0 = time.perf_counter()
    feas = _feasibility(args.power, inst)
    value, parts = _oracle_value(inst, args.problem, feas, budget)
    ids = [l.id for l in inst.links]
    report = _base_report(inst, f"oracle-{args.problem}", args)
    report.update(power=args.power, oracle=value, witness=[[ids[i] for i in p] for p in parts],
                  wall_time=round(time.perf_counter() - t0, 6))
    _emit(report, args.format)
    return 0


def _compare_one(inst: Instance, args, seed) -> dict:
    budget = xo.OracleBudget.from_env()
    t0 = time.perf_counter()
    feas = _feasibility(args.power, inst)
    report = _base_report(inst, args.algo, args)
    report["seed"] = seed
    if args.problem == "schedule":
        sched = run_schedule(inst, args.algo)
        alg = sched.length
        report["max_affectance"] = sched.diagnostics["max_affectance"]
    else:
        res = run_capacity(inst, args.algo, seed or 0)
        alg = res.size if args.problem == "capacity" else res.total_weight
        report["max_affectance"] = [max_affectance(res.chosen, res.power, inst)]
    opt, _ = _oracle_value(inst, args.problem, feas, budget)
    if args.problem == "schedule":
        ratio = alg / opt if opt else 1.0
    else:
        ratio = opt / alg if alg else (1.0 if not opt else float("inf"))
    report.update(problem=args.problem, algorithm_value=alg, oracle=opt, ratio=ratio,
                  oracle_power=args.power, wall_time=round(time.perf_counter() - t0, 6))
    return report


def _seed_range(text: str) -> List[int]:
    try:
        a, b = text.split("..")
        return list(range(int(a), int(b) + 1))
    except ValueError:
        raise UsageError(f"--seeds expects A..B, got {text!r}")


def cmd_compare(args) -> int:
    if args.input:
        _emit(_compare_one(_read_instance(args.input, args.mode), args, args.seed), args.format)
        return 0
    if not args.seeds:
        raise UsageError("compare needs --input or --seeds")
    for seed in _seed_range(args.seeds):
        inst = GenSpec("random", dict(n=args.n, side=args.side, len_min=args.len_min,
                                      len_max=args.len_max, alpha=args.alpha, beta=args.beta,
                                      mode=args.mode or "uni"), seed).build()
        _emit(_compare_one(inst, args, seed), args.format)
    return 0


def cmd_bound(args) -> int:
    inst = _read_instance(args.input, args.mode)
    f = inst.fading
    p_suff = sch.default_equilength_p(inst)
    tau, lam, M = class_params(max(inst.n, 1), inst.beta, inst.alpha)
    report = {
        "instance": instance_digest(inst),
        "C_prime": c_prime(f),
        "z1_beta": z1(inst.beta, f),
        "z2_beta": z2(inst.beta, inst.alpha),
        "z1_equilength": z1(p_suff, f),
        "tau": tau,
        "Lambda": lam,
        "M": M,
        "beta_at_least_3_pow_alpha": inst.beta >= 3**inst.alpha,
    }
    try:
        report["equilength_ratio_bound"] = equilength_ratio_bound(p_suff, inst.beta, f)
    except SinrError as e:
        report["equilength_ratio_bound"] = None
        report["equilength_ratio_bound_error"] = str(e)
    _emit(report, args.format)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sinrsched", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", "-i", required=True)
        p.add_argument("--mode", choices=("uni", "bi"))
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--seed", type=int, default=0)

    g = sub.add_parser("gen", help="write a generated instance")
    g.add_argument("--kind", choices=("random", "equilength", "grid", "lowerbound"), default="random")
    g.add_argument("--n", type=int, default=10)
    g.add_argument("--side", type=float, default=100.0)
    g.add_argument("--len-min", type=float, default=1.0)
    g.add_argument("--len-max", type=float, default=10.0)
    g.add_argument("--m", type=int, default=3)
    g.add_argument("--q", type=float, default=10.0)
    g.add_argument("--t", type=int, default=4)
    g.add_argument("--c1", type=int, default=0)
    g.add_argument("--variant", choices=("forward", "reversed", "combined"), default="forward")
    g.add_argument("--precision", choices=("float", "log2"))
    g.add_argument("--alpha", type=float, default=3.0)
    g.add_argument("--beta", type=float, default=1.0)
    g.add_argument("--noise", type=float, default=0.0)
    g.add_argument("--mode", choices=("uni", "bi"), default="uni")
    g.add_argument("--weights", action="store_true", help="random link weights")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--output", "-o")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("check", help="verify a schedule or capacity file")
    common(c)
    c.add_argument("--schedule", "-s", required=True)
    c.add_argument("--power", help="override the file's power assignment")
    c.add_argument("--p", type=float, help="signal level (defaults to the file's p_certified)")
    c.add_argument("--sinr", action="store_true", help="test the SINR condition including noise")
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("schedule", help="run a scheduling algorithm")
    common(s)
    s.add_argument("--algo", choices=SCHEDULE_ALGOS, default="mean")
    s.add_argument("--output", "-o")
    s.add_argument("--power", help="also evaluate the result under this assignment")
    s.set_defaults(func=cmd_schedule)

    k = sub.add_parser("capacity", help="run a capacity algorithm")
    common(k)
    k.add_argument("--algo", choices=CAPACITY_ALGOS, default="mean")
    k.add_argument("--output", "-o")
    k.add_argument("--power", help="also evaluate the result under this assignment")
    k.set_defaults(func=cmd_capacity)

    o = sub.add_parser("oracle", help="exact optimum by enumeration")
    common(o)
    o.add_argument("--problem", choices=("schedule", "capacity", "weighted"), default="schedule")
    o.add_argument("--power", default="pc", help="pc (power control) or a fixed assignment")
    o.set_defaults(func=cmd_oracle)

    m = sub.add_parser("compare", help="algorithm versus exact optimum")
    common(m, needs_input=False)
    m.add_argument("--input", "-i")
    m.add_argument("--algo", default="mean")
    m.add_argument("--problem", choices=("schedule", "capacity", "weighted"), default="schedule")
    m.add_argument("--power", default="pc")
    m.add_argument("--seeds")
    m.add_argument("--n", type=int, default=8)
    m.add_argument("--side", type=float, default=50.0)
    m.add_argument("--len-min", type=float, default=1.0)
    m.add_argument("--len-max", type=float, default=10.0)
    m.add_argument("--alpha", type=float, default=3.0)
    m.add_argument("--beta", type=float, default=1.0)
    m.set_defaults(func=cmd_compare)

    b = sub.add_parser("bound", help="print the closed-form constants for an instance")
    common(b)
    b.set_defaults(func=cmd_bound)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ParseError, UsageError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValidationError, PreconditionError, OracleScaleError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
