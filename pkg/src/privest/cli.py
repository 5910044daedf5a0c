"""Command-line interface: scriptable reproduction pipelines.

Subcommands:
    mech-sample  draw privatized samples from one channel to CSV
    estimate     run one estimator on freshly generated synthetic data
    bench        run experiment presets or a JSON experiment config to CSV
    audit        exact enumeration / Monte-Carlo verification of the channels
    rates        evaluate closed-form minimax reference curves to CSV

Exit codes: 0 success, 1 audit violation, 2 configuration error, 3 I/O error.
``--seed`` falls back to the LDP_SEED environment variable, then to 0.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from . import audit as audit_mod
from . import bounds
from .core import ConfigError, ParameterError, PrivacyLevel, make_rng
from .estimators import (
    MomentAssumption,
    density_estimate,
    private_mean_scalar,
    private_mean_vector,
    private_median_sgd,
    private_logistic_sgd,
    sparse_mean,
)
from .experiments import (
    PRESETS,
    build_preset,
    emit_csv,
    emit_summary_csv,
    override_specs,
    run_experiment,
    spec_from_config,
    summarize,
)
from .generators import make_generator
from .mechanisms import Channel

_MECH_CHOICES = ("l2_ball", "linf_ball", "sign_rr", "laplace_vector", "naive_median",
                 "truncated_laplace")


def _seed_default(value):
    if value is not None:
        return int(value)
    env = os.environ.get("LDP_SEED")
    return int(env) if env else 0


def _parse_vector(text):
    return np.array([float(v) for v in text.split(",") if v != ""])


def _cmd_mech_sample(args) -> int:
    seed = _seed_default(args.seed)
    level = PrivacyLevel(args.eps)
    rng = make_rng(seed)
    x = _parse_vector(args.x)
    d = x.size
    if args.mechanism == "l2_ball":
        channel = Channel.l2_ball(d, args.radius, level)
    elif args.mechanism == "linf_ball":
        channel = Channel.linf_ball(d, args.radius, level)
    elif args.mechanism == "sign_rr":
        channel = Channel.sign_rr(level)
    elif args.mechanism == "laplace_vector":
        channel = Channel.laplace_vector(d, args.radius, level, args.sensitivity_norm)
    elif args.mechanism == "naive_median":
        channel = Channel.naive_median(args.radius, level)
    else:
        assumption = MomentAssumption(k=args.moment_k, radius_k=args.radius)
        channel = Channel.truncated_laplace(assumption, args.n, level)
    if channel.dim == 1:
        draws = channel.privatize_batch(np.full(args.n, float(x[0])), rng)[:, None]
    else:
        draws = channel.privatize_batch(np.broadcast_to(x, (args.n, d)), rng)
    header = ",".join(f"z{j}" for j in range(draws.shape[1]))
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in draws:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")
    print(f"wrote {draws.shape[0]} draws of {args.mechanism} to {args.out}")
    return 0


def _cmd_estimate(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        config = json.load(fh)
    seed = _seed_default(args.seed if args.seed is not None else config.get("seed"))
    eps = float(args.eps if args.eps is not None else config.get("eps", 1.0))
    level = PrivacyLevel(eps)
    estimator = config.get("estimator")
    n = int(config.get("n", 1000))
    gen = make_generator(config["generator"])
    data_rng = make_rng(seed, 0, 0)
    rng = make_rng(seed, 2, 0)
    options = config.get("options", {})
    if estimator == "mean_scalar":
        assumption = MomentAssumption(
            k=float(options.get("moment_k", math.inf)),
            radius_k=float(options.get("radius_k", 1.0)),
        )
        result = private_mean_scalar(gen.sample(n, data_rng), assumption, level, rng)
    elif estimator == "mean_vector":
        result = private_mean_vector(
            gen.sample(n, data_rng), options.get("geometry", "linf"),
            float(options.get("radius", 1.0)), level, rng,
        )
    elif estimator == "median":
        result = private_median_sgd(
            gen.sample(n, data_rng), float(options.get("radius", 1.0)), level, rng,
            one_sided=bool(options.get("one_sided", False)),
        )
    elif estimator == "sparse":
        lam = options.get("lam")
        result = sparse_mean(
            gen.sample(n, data_rng), float(options.get("radius", 1.0)), level, rng,
            lam=None if lam is None else float(lam),
        )
    elif estimator == "logistic":
        stream = gen.sample(n, data_rng)
        result = private_logistic_sgd(
            stream, options.get("geometry", "l2"),
            float(options.get("radius", math.sqrt(gen.dim))), level, rng,
            gamma0=float(options.get("gamma0", 1.0)),
            beta_exp=float(options.get("beta_exp", 0.6)),
            proj_radius=options.get("proj_radius", 5.0),
        )
    elif estimator == "density":
        est = density_estimate(
            gen.sample(n, data_rng), float(options.get("beta", 1.0)), level, rng
        )
        result = {"k": est.k, "coeffs": [float(c) for c in est.coeffs]}
    else:
        raise ConfigError(f"unknown estimator {estimator!r}")
    if isinstance(result, np.ndarray):
        result = [float(v) for v in result]
    print(json.dumps({"estimator": estimator, "eps": eps, "n": n, "estimate": result}))
    return 0


def _cmd_bench(args) -> int:
    seed = _seed_default(args.seed)
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        entries = raw if isinstance(raw, list) else [raw]
        specs = [spec_from_config(entry) for entry in entries]
        specs = override_specs(specs, eps=args.eps, seed=args.seed)
    elif args.preset:
        specs = build_preset(args.preset, full=args.full, eps=args.eps, seed=seed)
    else:
        raise ConfigError("bench needs --preset or --config")
    records = []
    for spec in specs:
        records.extend(run_experiment(spec, timing=args.timing))
    emit_csv(records, args.out)
    print(f"wrote {len(records)} records to {args.out}")
    if args.summary_out:
        emit_summary_csv(summarize(records), args.summary_out)
        print(f"wrote summary to {args.summary_out}")
    return 0


def _cmd_audit(args) -> int:
    seed = _seed_default(args.seed)
    level = PrivacyLevel(args.eps)
    failures = 0

    def check(name, ok, detail=""):
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'}  {name}{'  ' + detail if detail else ''}")
        failures += 0 if ok else 1

    from .mechanisms import cube_halfspace_mean, cube_vertices, sphere_halfspace_mean

    for d in range(1, args.d_max + 1):
        vertices = cube_vertices(d)
        expected = cube_halfspace_mean(d)
        worst = 0.0
        for v in vertices:
            mean = audit_mod.halfspace_expectation_cube(v)
            worst = max(worst, float(np.max(np.abs(mean - expected * v))))
        check(f"cube halfspace mean matches C_d (d={d})", worst <= 1e-9, f"max dev {worst:.2e}")
        quad = audit_mod.sphere_halfspace_mean_quadrature(d)
        closed = sphere_halfspace_mean(d)
        check(
            f"sphere halfspace mean matches quadrature (d={d})",
            abs(quad - closed) <= 1e-8,
            f"|diff| {abs(quad - closed):.2e}",
        )
    for d in range(1, min(args.d_max, 6) + 1):
        channel = Channel.linf_ball(d, 1.0, level)
        grid = np.array(np.meshgrid(*([[-1.0, 0.0, 1.0]] * d))).reshape(d, -1).T
        support, probs = audit_mod.channel_pmf_grid(channel, grid)
        sums = np.abs(probs.sum(axis=1) - 1.0).max()
        check(f"linf pmf sums to 1 (d={d})", sums <= 1e-12, f"max dev {sums:.2e}")
        means = probs @ support
        dev = float(np.max(np.abs(means - grid)))
        check(f"linf channel exactly unbiased (d={d})", dev <= 1e-9, f"max dev {dev:.2e}")
        ratio = audit_mod.verify_dp(channel, grid)
        check(
            f"linf channel satisfies eps-DP (d={d})",
            ratio <= level.epsilon + 1e-9,
            f"max log ratio {ratio:.6f} vs eps {level.epsilon}",
        )
    sign = Channel.sign_rr(level)
    ratio = audit_mod.verify_dp(sign, np.array([[-1.0], [1.0]]))
    check("sign channel log ratio equals eps", abs(ratio - level.epsilon) <= 1e-9)
    rng = make_rng(seed, 3, 0)
    channel = Channel.l2_ball(3, 1.0, level)
    mean, stderr = audit_mod.monte_carlo_unbias(channel, np.array([0.3, 0.4, 0.0]), args.mc, rng)
    ok = bool(np.all(np.abs(mean - np.array([0.3, 0.4, 0.0])) <= 5 * stderr))
    check("l2 channel Monte-Carlo unbiasedness (d=3)", ok)
    print(f"{failures} failure(s)")
    return 0 if failures == 0 else 1


def _cmd_rates(args) -> int:
    n_grid = [int(v) for v in args.n_grid.split(",")]
    if args.curve == "mean":
        fn = lambda n: bounds.mean_rate(args.k, n, args.eps, args.eps_form)
        label = f"mean_rate_k{args.k:g}_{args.eps_form}"
    elif args.curve == "median":
        fn = lambda n: bounds.median_rate(args.radius, n, args.eps, args.eps_form)
        label = f"median_rate_{args.eps_form}"
    elif args.curve == "sparse":
        fn = lambda n: bounds.sparse_mean_lower(args.d, n, args.eps)
        label = "sparse_mean_lower_exp"
    elif args.curve == "logistic":
        fn = lambda n: bounds.logistic_lower(args.d, n, args.eps)
        label = "logistic_lower_exp"
    else:
        fn = lambda n: bounds.density_rate(args.beta, n, args.eps, args.eps_form)
        label = f"density_rate_beta{args.beta:g}_{args.eps_form}"
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("label,n,value\n")
        for n in n_grid:
            fh.write(f"{label},{n},{format(fn(n), '.17g')}\n")
    print(f"wrote {len(n_grid)} points to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="privest", description="Locally private estimation benchmarks"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mech-sample", help="draw privatized samples from one channel")
    p.add_argument("--mechanism", choices=_MECH_CHOICES, required=True)
    p.add_argument("--x", default="0", help="comma-separated input record")
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--moment-k", dest="moment_k", type=float, default=math.inf)
    p.add_argument("--sensitivity-norm", dest="sensitivity_norm",
                   choices=("l1", "l2_paper"), default="l1")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_mech_sample)

    p = sub.add_parser("estimate", help="run one estimator on synthetic data")
    p.add_argument("--config", required=True, help="JSON estimator config")
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("bench", help="run experiment presets or a JSON config")
    p.add_argument("--preset", choices=sorted(PRESETS), default=None)
    p.add_argument("--config", default=None, help="JSON experiment spec (object or list)")
    p.add_argument("--full", action="store_true", help="full-scale sizes (slow)")
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--timing", action="store_true",
                   help="record wall times (breaks byte-determinism)")
    p.add_argument("--out", required=True)
    p.add_argument("--summary-out", dest="summary_out", default=None)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("audit", help="verify channel unbiasedness and privacy")
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--d-max", dest="d_max", type=int, default=8)
    p.add_argument("--mc", type=int, default=200_000, help="Monte-Carlo draws")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("rates", help="evaluate closed-form reference curves")
    p.add_argument("--curve", choices=("mean", "median", "sparse", "logistic", "density"),
                   required=True)
    p.add_argument("--n-grid", dest="n_grid", default="1024,4096,16384,65536")
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--eps-form", dest="eps_form", choices=("eps2", "exp"), default="eps2")
    p.add_argument("--k", type=float, default=2.0)
    p.add_argument("--d", type=int, default=8)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_rates)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParameterError, json.JSONDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
