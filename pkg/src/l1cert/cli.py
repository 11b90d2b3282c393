"""Command-line surface: generation, certification, bounds, recovery,
the exact oracle, and the benchmark table.

Exit codes: 0 success, 2 argument errors, 3 resource-guard refusals,
4 solver failures. Errors print a single machine-parsable line on
stderr: "error: <reason>".
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time

import numpy as np

from . import bounds, generators, lower, oracle, recovery
from .core import (ObservationNorm, SensingMatrix, load_matrix,
                   mutual_incoherence, save_matrix, save_sidecar)
from .errors import ArgumentError, L1CertError, ResourceLimitError, SolverFailure

CSV_SCHEMA = "l1cert-table-v1"


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("L1CERT_THREADS")
    return int(env) if env else 1


def _parse_beta(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    value = float(text)
    if value < 0:
        raise ArgumentError("beta must be nonnegative")
    return value


def _parse_fractions(text: str):
    """Accept '0.1..0.9' (step 0.1) or a comma list '0.2,0.8'."""
    if ".." in text:
        lo, hi = (float(tk) for tk in text.split("..", 1))
        out = []
        f = lo
        while f <= hi + 1e-9:
            out.append(round(f, 10))
            f += 0.1
        return out
    return [float(tk) for tk in text.split(",") if tk]


def cmd_gen(args):
    spec = generators.GenSpec(family=generators.Family.parse(args.family),
                              k=args.k, n=args.n, seed=args.seed,
                              normalize=args.normalize)
    A = generators.generate(spec)
    save_matrix(args.out, A)
    save_sidecar(args.out + ".json", {
        "family": spec.family.value, "k": spec.k, "n": spec.n,
        "seed": spec.seed, "normalize": spec.normalize,
    })
    print(f"wrote {args.out} ({A.k}x{A.n}, family={spec.family.value}, "
          f"seed={spec.seed})")
    return 0


def cmd_mu(args):
    A = load_matrix(args.matrix)
    cert = bounds.s_bound_mu(A)
    print(f"mu={cert.bound_value:.12g} s_mu={cert.s_certified}")
    return 0


def cmd_alpha1(args):
    A = load_matrix(args.matrix)
    norm = ObservationNorm.parse(args.norm)
    alpha1, Y = bounds.compute_alpha1(A, beta=args.beta, norm=norm,
                                      threads=_threads(args))
    s = bounds.improved_s_from_corrector(A, Y)
    print(f"alpha1={alpha1:.12g} s_alpha1={s}")
    if args.witness:
        save_matrix(args.witness, SensingMatrix(Y.Y))
        print(f"witness={args.witness}")
    return 0


def cmd_alphas(args):
    A = load_matrix(args.matrix)
    norm = ObservationNorm.parse(args.norm)
    value, Y = bounds.compute_alphas(A, args.s, beta=args.beta, norm=norm,
                                     lp_limit=args.lp_limit)
    print(f"alpha_s={value:.12g} s={args.s} "
          f"improved_s={bounds.improved_s_from_corrector(A, Y)}")
    if args.witness:
        save_matrix(args.witness, SensingMatrix(Y.Y))
        print(f"witness={args.witness}")
    return 0


def cmd_certify(args):
    A = load_matrix(args.matrix)
    t0 = time.process_time()
    mu_cert = bounds.s_bound_mu(A)
    t_mu = time.process_time() - t0
    print(f"s_mu={mu_cert.s_certified} mu={mu_cert.bound_value:.6g} "
          f"cpu={t_mu:.2f}s")
    t0 = time.process_time()
    alpha1, Y = bounds.compute_alpha1(A, threads=_threads(args))
    s_a1 = bounds.improved_s_from_corrector(A, Y)
    t_a1 = time.process_time() - t0
    print(f"s_alpha1={s_a1} alpha1={alpha1:.6g} cpu={t_a1:.2f}s")
    if args.full:
        t0 = time.process_time()
        cert = bounds.s_bound_alphas(A, lp_limit=args.lp_limit,
                                     threads=_threads(args))
        t_as = time.process_time() - t0
        print(f"s_alphas={cert.s_certified} alpha_s={cert.bound_value:.6g} "
              f"cpu={t_as:.2f}s")
        if args.cert_out:
            cert.save(args.cert_out)
    return 0


def cmd_disprove(args):
    A = load_matrix(args.matrix)
    cfg_base = lower.SCAConfig.for_dimension(A.n, rng_seed=args.seed)
    cfg = lower.SCAConfig(restarts=args.restarts or cfg_base.restarts,
                          improvement_tol=cfg_base.improvement_tol,
                          max_iters=cfg_base.max_iters, rng_seed=args.seed)
    result = lower.s_upper_bound(A, cfg, s_start=args.s_start)
    print(f"seed={args.seed}")
    for s, val in sorted(result.lower_bounds.items()):
        print(f"s={s} lower_bound={val:.12g}")
    flag = "" if result.disproof_found else " (no disproof found)"
    print(f"s_bar={result.s_bar}{flag}")
    return 0


def _load_vector(path):
    """Read a vector from either the matrix text format or a bare list."""
    try:
        return load_matrix(path).entries.ravel()
    except Exception:
        return np.loadtxt(path).ravel()


def cmd_recover(args):
    A = load_matrix(args.matrix)
    y = _load_vector(args.y)
    norm = ObservationNorm.parse(args.norm)
    problem = recovery.RecoveryProblem(A=A, y=y, epsilon=args.eps, norm=norm)
    x_hat = recovery.l1_recover(problem)
    report = recovery.RecoveryReport(x_hat=x_hat)
    if args.truth:
        w = _load_vector(args.truth)
        report = recovery.RecoveryReport(
            x_hat=x_hat,
            l1_error=float(np.abs(x_hat - w).sum()),
            linf_error=float(np.abs(x_hat - w).max()),
        )
    print(json.dumps(report.to_json()))
    return 0


def cmd_oracle(args):
    A = load_matrix(args.matrix)
    value = oracle.gammahat_exact(A, args.s, size_guard=args.oracle_limit)
    print(f"{value:.12g}")
    return 0


def cmd_table(args):
    family = generators.Family.parse(args.family)
    fractions = _parse_fractions(args.fractions)
    rows = []
    for frac in fractions:
        m = int(frac * args.n)
        spec = generators.GenSpec(family=family, k=m, n=args.n,
                                  seed=args.seed, normalize=True)
        A = generators.generate(spec)
        t0 = time.process_time()
        s_mu = bounds.s_bound_mu(A).s_certified
        _, Y = bounds.compute_alpha1(A, threads=_threads(args))
        s_a1 = bounds.improved_s_from_corrector(A, Y)
        s_as = ""
        if args.full:
            s_as = bounds.s_bound_alphas(A, lp_limit=args.lp_limit,
                                         threads=_threads(args)).s_certified
        cfg = lower.SCAConfig.for_dimension(args.n, rng_seed=args.seed)
        s_bar = lower.s_upper_bound(A, cfg, s_start=max(1, s_a1)).s_bar
        cpu = time.process_time() - t0
        rows.append((m, s_mu, s_a1, s_as, s_bar, f"{cpu:.1f}"))
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        out.write(f"# schema={CSV_SCHEMA} family={family.value} n={args.n} "
                  f"seed={args.seed}\n")
        writer = csv.writer(out)
        writer.writerow(["m", "s_mu", "s_alpha1", "s_alphas", "s_bar",
                         "cpu_seconds"])
        writer.writerows(rows)
    finally:
        if args.out:
            out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="l1cert",
        description="Certify the sparsity levels a sensing matrix recovers "
                    "exactly by l1-minimization.")
    ap.add_argument("--threads", type=int, default=None,
                    help="worker pool size (default: $L1CERT_THREADS or 1)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a sensing matrix")
    p.add_argument("--family", required=True,
                   choices=[f.value for f in generators.Family])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--normalize", action=argparse.BooleanOptionalAction,
                   default=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("mu", help="mutual incoherence bound")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_mu)

    p = sub.add_parser("alpha1", help="per-column relaxation bound")
    p.add_argument("matrix")
    p.add_argument("--beta", type=_parse_beta, default=math.inf)
    p.add_argument("--norm", default="l2", choices=["l1", "l2", "linf"])
    p.add_argument("--witness", help="write witness Y to this file")
    p.set_defaults(func=cmd_alpha1)

    p = sub.add_parser("alphas", help="full relaxation bound for one s")
    p.add_argument("matrix")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--beta", type=_parse_beta, default=math.inf)
    p.add_argument("--norm", default="l2", choices=["l1", "l2", "linf"])
    p.add_argument("--lp-limit", type=int, default=bounds.DEFAULT_LP_LIMIT)
    p.add_argument("--witness")
    p.set_defaults(func=cmd_alphas)

    p = sub.add_parser("certify", help="all lower bounds with timings")
    p.add_argument("matrix")
    p.add_argument("--full", action="store_true",
                   help="also run the full alpha_s search")
    p.add_argument("--lp-limit", type=int, default=bounds.DEFAULT_LP_LIMIT)
    p.add_argument("--cert-out", help="write the certificate JSON here")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("disprove", help="SCA lower bounds and s_bar")
    p.add_argument("matrix")
    p.add_argument("--s-start", type=int, default=1)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_disprove)

    p = sub.add_parser("recover", help="l1-recovery from an observation")
    p.add_argument("matrix")
    p.add_argument("--y", required=True)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--norm", default="l2", choices=["l1", "l2", "linf"])
    p.add_argument("--truth", help="optional ground-truth signal file")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("oracle", help="exact gammahat_s (guarded)")
    p.add_argument("matrix")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--oracle-limit", type=int,
                   default=oracle.DEFAULT_SIZE_GUARD)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("table", help="benchmark table over m = fraction * n")
    p.add_argument("--family", required=True,
                   choices=[f.value for f in generators.Family
                            if f is not generators.Family.CONVOLUTION])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--fractions", required=True,
                   help="'0.1..0.9' or comma list")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--full", action="store_true")
    p.add_argument("--lp-limit", type=int, default=bounds.DEFAULT_LP_LIMIT)
    p.add_argument("--out")
    p.set_defaults(func=cmd_table)

    return ap


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as err:
        # argparse exits with 2 on bad usage and 0 on --help
        return int(err.code or 0)
    try:
        return args.func(args)
    except ResourceLimitError as err:
        print(f"error: resource-guard refusal: {err}", file=sys.stderr)
        return 3
    except SolverFailure as err:
        print(f"error: solver failure: {err}", file=sys.stderr)
        return 4
    except (ArgumentError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except L1CertError as err:
        print(f"error: {err}", file=sys.stderr)
        return 4


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
