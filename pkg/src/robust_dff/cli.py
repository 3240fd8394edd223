"""Command-line entry point: ``dff <subcommand> ...``."""

from __future__ import annotations

import argparse
import copy
import json
import logging
import sys
from pathlib import Path

from .core import (
    dump_instance,
    expand_representation,
    hypercube_lower_bound_instance,
    instance_to_dict,
    load_instance,
    validate_instance,
)
from .harness import (
    OUTPUT_ENV,
    TrialReport,
    config_seeds,
    default_output_dir,
    load_config,
    run_config,
    sweep,
    verify_bounds,
)
from .streams import PLACEMENTS, gen_random_instance, lower_bound_stream
from .teacher import ExceptionStrategy

log = logging.getLogger("robust_dff")


def _write_json(obj, path):
    if path is None or str(path) == "-":
        json.dump(obj, sys.stdout, indent=1, sort_keys=True)
        sys.stdout.write("\n")
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as fp:
            json.dump(obj, fp, indent=1, sort_keys=True)
            fp.write("\n")


def _base_config(args) -> dict:
    return load_config(args.config) if getattr(args, "config", None) else {}


def _single_run(args, config) -> int:
    seed = args.seed if args.seed is not None else config_seeds(config)[0]
    rows, report, meta = run_config(config, seed)
    outdir = Path(args.out) if args.out else default_output_dir()
    outdir.mkdir(parents=True, exist_ok=True)
    stem = f"{args.command}_{seed}"
    with open(outdir / f"{stem}.transcript.jsonl", "w") as fp:
        for row in rows:
            fp.write(row.to_json() + "\n")
    _write_json({"meta": meta, "report": report.to_dict()}, outdir / f"{stem}.report.json")
    summary = {"seed": seed, "n": report.n, "mistakes": report.mistakes,
               "rules_created": report.rules_created, "rules_deleted": report.rules_deleted,
               "violations": sum(report.violations.values()),
               "bounds": {k: v["passed"] for k, v in report.bounds.items()},
               "output": str(outdir)}
    print(json.dumps(summary, sort_keys=True))
    return 0 if all(summary["bounds"].values()) and not summary["violations"] else 1


def cmd_gen_instance(args) -> int:
    if args.kind == "random":
        inst = gen_random_instance(args.m, args.d, args.labels or args.m, args.k, args.s,
                                   args.per_component, args.seed or 0)
    elif args.kind == "hypercube":
        inst = hypercube_lower_bound_instance(args.d)
    else:
        inst, _, _ = lower_bound_stream(args.m, args.seed or 0)
    _write_json(instance_to_dict(inst), args.output)
    return 0


def cmd_run_adversarial(args) -> int:
    config = copy.deepcopy(_base_config(args))
    stream = config.setdefault("stream", {})
    stream["mode"] = "adaptive" if args.adaptive else stream.get("mode", "adversarial")
    if stream["mode"] not in ("adversarial", "adaptive"):
        stream["mode"] = "adversarial"
    for key, val in (("n", args.n), ("placement", args.placement)):
        if val is not None:
            stream[key] = val
    if args.instance:
        config["instance"] = {"kind": "file", "path": args.instance}
    if args.strategy:
        config.setdefault("teacher", {})["strategy"] = args.strategy
    learner = config.setdefault("learner", {})
    if learner.get("kind", "robust") == "stochastic":
        learner["kind"] = "robust"
    return _single_run(args, config)


def cmd_run_stochastic(args) -> int:
    config = copy.deepcopy(_base_config(args))
    stream = config.setdefault("stream", {})
    stream["mode"] = "stochastic"
    learner = config.setdefault("learner", {})
    learner["kind"] = "stochastic"
    for key, val in (("epsilon", args.epsilon), ("sigma", args.sigma)):
        if val is not None:
            stream[key] = learner[key] = val
    if args.delta is not None:
        learner["delta"] = args.delta
    if args.nk_clock:
        learner["nk_clock"] = args.nk_clock
    if args.n is not None:
        stream["n"] = args.n
    stream.setdefault("checkpoints", [1000, 5000, 10000, 50000])
    if args.instance:
        config["instance"] = {"kind": "file", "path": args.instance}
    return _single_run(args, config)


def cmd_run_lower_bound(args) -> int:
    config = copy.deepcopy(_base_config(args))
    config["instance"] = {"kind": "lower-bound", "m": args.m}
    config["stream"] = {"mode": "lower-bound"}
    config.setdefault("learner", {})["kind"] = "robust"
    return _single_run(args, config)


def cmd_expand(args) -> int:
    with open(args.instance) as fp:
        inst = load_instance(fp)
    rep, comp_of = expand_representation(inst)
    expanded = inst.with_representation(rep, comp_of)
    report = validate_instance(expanded)
    if args.output:
        with open(args.output, "w") as fp:
            dump_instance(expanded, fp)
    print(json.dumps({"components_before": inst.m, "components_after": rep.m,
                      "bound": inst.m + inst.d * inst.k, "exceptions_after": len(expanded.exceptions),
                      "valid": report.ok}, sort_keys=True))
    return 0 if report.ok else 1


def cmd_verify_bounds(args) -> int:
    with open(args.report) as fp:
        data = json.load(fp)
    report = TrialReport.from_dict(data.get("report", data))
    bounds = verify_bounds(report)
    for name, b in bounds.items():
        status = "PASS" if b["passed"] else "FAIL"
        print(f"{name:8s} bound={b['bound']:<10.6g} observed={b['observed']:<8} margin={b['margin']:<10.6g} {status}")
    return 0 if all(b["passed"] for b in bounds.values()) else 1


def cmd_sweep(args) -> int:
    config = load_config(args.config)
    seeds = [args.seed] if args.seed is not None else config_seeds(config)
    out = config.get("output", {})
    outdir = args.out or out.get("dir") or default_output_dir()
    formats = tuple(out.get("formats", ("csv", "json", "transcript")))
    parallelism = args.parallelism or config.get("sweep", {}).get("parallelism", 1)
    configs = config["configs"] if "configs" in config else {config.get("id", "config"): config}
    result = sweep(configs, seeds, parallelism=parallelism, outdir=outdir, formats=formats)
    print(json.dumps(result.aggregate, indent=1, sort_keys=True))
    return 0 if all(a.get("errors", 0) == 0 for a in result.aggregate.values()) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dff", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def run_opts(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, help="overrides the config's seeds")
        p.add_argument("--out", help=f"output directory (default: ${OUTPUT_ENV} or ./dff-output)")

    p = sub.add_parser("gen-instance", help="write a random or constructed instance as JSON")
    p.add_argument("--kind", choices=("random", "hypercube", "lower-bound"), default="random")
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--d", type=int, default=12)
    p.add_argument("--labels", type=int)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--s", type=int, default=0)
    p.add_argument("--per-component", type=int, default=4)
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_gen_instance)

    p = sub.add_parser("run-adversarial", help="RobustDFF against an adversarial or adaptive stream")
    run_opts(p)
    p.add_argument("--instance", help="instance JSON file")
    p.add_argument("--n", type=int)
    p.add_argument("--placement", choices=PLACEMENTS)
    p.add_argument("--strategy", choices=[s.value for s in ExceptionStrategy])
    p.add_argument("--adaptive", action="store_true")
    p.set_defaults(func=cmd_run_adversarial)

    p = sub.add_parser("run-stochastic", help="StRoDFF on an i.i.d. stream")
    run_opts(p)
    p.add_argument("--instance", help="instance JSON file")
    p.add_argument("--n", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--nk-clock", choices=("rule", "literal"))
    p.set_defaults(func=cmd_run_stochastic)

    p = sub.add_parser("run-lower-bound", help="RobustDFF on the hidden-assignment stream")
    run_opts(p)
    p.add_argument("--m", type=int, default=4)
    p.set_defaults(func=cmd_run_lower_bound)

    p = sub.add_parser("expand-representation", help="absorb exceptions into extra components")
    p.add_argument("instance")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("verify-bounds", help="check a saved trial report against the closed-form bounds")
    p.add_argument("report")
    p.set_defaults(func=cmd_verify_bounds)

    p = sub.add_parser("sweep", help="run a config over many seeds")
    p.add_argument("config")
    p.add_argument("--seed", type=int, help="run only this seed")
    p.add_argument("--out")
    p.add_argument("--parallelism", type=int)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
