"""
Batch front end: one subcommand per verification, JSON on stdout (CSV on
request), diagnostics on stderr, exit 0 / 2 (validation) / 3 (numeric).
"""
import argparse
import contextlib
import csv
import io
import logging
import math
import re
import sys

import numpy as np

from . import beta as beta_mod
from .automorphism import (
    build_weakmix_pair,
    compose,
    in_HC_minus,
    in_HC_plus,
    parse_cycle_notation,
    product_measure_check,
)
from .cocycle import (
    CocycleContext,
    J_local,
    J_shift,
    J_shift_via_atoms,
    J_star_decomposition,
    check_cocycle_identity,
    entropy_rate_estimate,
    random_generator_word,
    random_lpa_swap,
)
from .coding import (
    BUILTIN_CODES,
    UNBOUNDED_BELOW,
    FixedRadiusCode,
    a_phi_truncated,
    builtin_code,
    code_radius,
    expected_code_length,
    invert_on_window,
    load_code,
    m_phi_truncated,
    pushforward_check,
)
from .constants import (
    CSV_SCHEMAS,
    DEFAULT_CARDINALITY_CAP,
    DEFAULT_GENERATOR,
    DEFAULT_SEED,
    EXIT_CODES,
    ZERO_RANK_BALL_CONVENTION,
    BetaReading,
    OutputFormat,
)
from .errors import FinitaryBetaError, ValidationError, handle_error
from .free_group import (
    ball,
    ball_cardinality,
    enumerate_Wa,
    enumeration_bound_violations,
)
from .prob import Configuration, Pattern, ProbVector
from .recovery import (
    PowerSums,
    distinguish,
    permutation_equivalent,
    power_sums,
    power_sums_agree,
    recover_vector,
)
from .util import dump_json, parse_number_list, print_status

DEFAULT_T_GRID = "-2,-1,-0.5,0,0.5,1,1.5,2,3"

# flags whose value is a number list that may start with a minus sign
LIST_FLAGS = ("--t", "--n", "--power-sums")
_NEGATIVE_LIST = re.compile(r"^-[\d.]")

_EPILOG = (
    f"CSV schemas ({CSV_SCHEMAS['version']}): "
    f"beta: {','.join(CSV_SCHEMAS['beta_sweep'])}; "
    f"code-stats: {','.join(CSV_SCHEMAS['code_stats'])}; "
    f"ball: {','.join(CSV_SCHEMAS['ball'])}; "
    f"restricted-beta: {','.join(CSV_SCHEMAS['restricted_beta'])}. "
    f"Ball sizes on Z follow the {ZERO_RANK_BALL_CONVENTION} convention."
)


class RunConfig:
    """Validated numeric parameters of one invocation."""

    def __init__(self, args):
        self.command = args.command
        self.rank = args.ell
        self.gen = args.gen
        self.seed = args.seed
        self.samples = args.samples
        self.horizon = args.horizon
        self.cap = args.cap
        self.workers = args.workers
        self.output_format = OutputFormat(args.format)
        self.verbose = args.verbose
        self.validate()

    def validate(self):
        if self.rank < 1:
            raise ValidationError(f"--ell must be >= 1, got {self.rank}")
        if not 1 <= self.gen <= self.rank:
            raise ValidationError(f"--gen must lie in 1..{self.rank}", key="error_generator_range")
        if self.samples is not None and self.samples < 1:
            raise ValidationError("--samples must be >= 1")
        if self.horizon is not None and self.horizon < 0:
            raise ValidationError("--horizon must be >= 0")
        if self.cap < 1:
            raise ValidationError("--cap must be >= 1")
        if self.workers < 1:
            raise ValidationError("--workers must be >= 1")


def _common_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", help="probability vector: JSON file or inline {\"p\": [...]}")
    common.add_argument("--q", help="second probability vector")
    common.add_argument("--ell", type=int, default=2, help="rank of the free group")
    common.add_argument("--gen", type=int, default=DEFAULT_GENERATOR, help="index of the generator a")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--n", help="integer, or comma list where the command sweeps n")
    common.add_argument("--samples", type=int)
    common.add_argument("--t", help="comma list of t values")
    common.add_argument("--horizon", type=int, help="truncation horizon L for m_phi / a_phi")
    common.add_argument("--cap", type=int, default=DEFAULT_CARDINALITY_CAP, help="cardinality cap")
    common.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.JSON.value)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("-v", "--verbose", action="count", default=0)
    return common


def build_parser():
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="finitary-beta", description=__doc__, epilog=_EPILOG)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ball", parents=[common], help="enumerate B(r)")
    p.add_argument("--radius", type=int, required=True)

    sub.add_parser("enum-wa", parents=[common], help="first n elements of W_a")

    sub.add_parser("check-bounds", parents=[common], help="enumeration bounds for W_a and its complement")

    p = sub.add_parser("code-stats", parents=[common], help="radius, m_phi, a_phi and E[v_phi] of a code")
    p.add_argument("--code", help="code JSON file or inline JSON")
    p.add_argument("--builtin", choices=BUILTIN_CODES)
    p.add_argument("--perm", help="symbol permutation for --builtin permutation")
    p.add_argument("--radius", type=int, default=1, help="radius for --builtin parity")
    p.add_argument("--mode", choices=["exact", "mc"], default="exact")

    p = sub.add_parser("cocycle-check", parents=[common], help="cocycle identity and closed-form checks")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--max-power", type=int, default=20)

    p = sub.add_parser("weakmix-check", parents=[common], help="product-measure identity for swap maps")
    p.add_argument("--N", type=int, default=1, dest="inner")
    p.add_argument("--outer", type=int, default=2)
    p.add_argument("--trials", type=int, default=100)

    p = sub.add_parser("beta", parents=[common], help="beta function")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--closed", action="store_true")
    mode.add_argument("--limit", type=int, metavar="N")
    mode.add_argument("--mc", action="store_true")

    p = sub.add_parser("restricted-beta", parents=[common], help="growth rate restricted to D ∩ a^n D")
    p.add_argument("--fix", required=True, help='pattern JSON on the a-line, e.g. {"assign": [["e", 1]]}')
    p.add_argument("--reading", choices=[r.value for r in BetaReading], default=BetaReading.LIMIT.value)

    sub.add_parser("pressure", parents=[common], help="single-coordinate pressure")

    p = sub.add_parser("power-sums", parents=[common], help="p_1..p_K")
    p.add_argument("--K", type=int)

    p = sub.add_parser("recover", parents=[common], help="vector from power sums")
    p.add_argument("--power-sums", required=True)
    p.add_argument("--m", type=int, required=True)

    sub.add_parser("distinguish", parents=[common], help="entropy and beta comparison of two vectors")

    p = sub.add_parser("end-to-end", parents=[common], help="radius-0 isomorphism against beta invariance")
    p.add_argument("--perm", required=True, help='cycle notation "(2 3)" or one-line "1,3,2"')
    return parser


###############
### Helpers
###############

def _require(value, flag):
    if value is None:
        raise ValidationError(f"{flag} is required for this command")
    return value


def _vector(source, flag="--p"):
    return ProbVector.load(_require(source, flag))


def _int_list(text, flag="--n"):
    return parse_number_list(_require(text, flag), int)


def _single_int(text, flag="--n"):
    values = _int_list(text, flag)
    if len(values) != 1:
        raise ValidationError(f"{flag} takes a single integer here")
    return values[0]


def _t_values(text, default=None):
    if text is None:
        if default is None:
            raise ValidationError("--t is required for this command")
        text = default
    return parse_number_list(text, float)


def _jsonable(value):
    if value is UNBOUNDED_BELOW:
        return value.to_json()
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def _csv(header, rows):
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return out.getvalue().rstrip("\n")


def _emit(config, document, csv_header=None, csv_rows=None):
    if config.output_format is OutputFormat.CSV:
        if csv_header is None:
            raise ValidationError(f"CSV output is not available for {config.command}")
        return _csv(csv_header, csv_rows)
    return dump_json(_jsonable(document))


###############
### Subcommands
###############

def cmd_ball(args, config):
    if args.radius < 0:
        raise ValidationError("--radius must be >= 0")
    b = ball(config.rank, args.radius, config.cap)
    words = [g.serialize() for g in b]
    document = {
        "rank": config.rank,
        "radius": args.radius,
        "cardinality": len(b),
        "closed_form": ball_cardinality(config.rank, args.radius),
        "elements": words,
    }
    rows = [[i, w, len(g)] for i, (w, g) in enumerate(zip(words, b))]
    return _emit(config, document, CSV_SCHEMAS["ball"], rows)


def cmd_enum_wa(args, config):
    n = _single_int(args.n)
    elements = enumerate_Wa(config.rank, n, config.gen, config.cap)
    return _emit(config, {"rank": config.rank, "n": n, "elements": [g.serialize() for g in elements]})


def cmd_check_bounds(args, config):
    n = _single_int(args.n)
    wa_violation, complement_violation = enumeration_bound_violations(config.rank, n, config.gen, config.cap)
    ok = wa_violation is None and complement_violation is None
    return _emit(config, {
        "rank": config.rank,
        "n": n,
        "ok": ok,
        "wa_first_violation": wa_violation,
        "complement_first_violation": complement_violation,
    })


def _load_code_arg(args, config, p):
    if args.code and args.builtin:
        raise ValidationError("give --code or --builtin, not both")
    if args.code:
        return load_code(args.code, config.rank, p.m)
    if args.builtin:
        perm = parse_cycle_notation(args.perm, p.m) if args.perm else None
        return builtin_code(args.builtin, config.rank, p.m, perm=perm, radius=args.radius, gen=config.gen)
    raise ValidationError("--code or --builtin is required")


def cmd_code_stats(args, config):
    p = _vector(args.p)
    code = _load_code_arg(args, config, p)
    samples = config.samples or 10_000
    stats = expected_code_length(code, p, args.mode, samples, config.seed, config.horizon,
                                 config.gen, config.workers, config.cap)
    x = Configuration(config.seed, p)
    document = {"code": repr(code), "stats": stats.to_dict(), "radius_at_seed": code_radius(code, x)}
    if config.horizon is not None:
        document["m_phi_at_seed"] = m_phi_truncated(code, x, config.horizon, config.gen, config.cap)
        document["a_phi_at_seed"] = a_phi_truncated(code, x, config.horizon, config.gen, config.cap)
    return _emit(config, document, CSV_SCHEMAS["code_stats"], stats.csv_rows())


def cmd_cocycle_check(args, config):
    p = _vector(args.p)
    ctx = CocycleContext(p, config.gen, config.rank)
    rng = np.random.default_rng(config.seed)
    trials = args.trials
    if trials < 1:
        raise ValidationError("--trials must be >= 1")

    identity_defect = 0.0
    star_defect = 0.0
    atoms_defect = 0.0
    for trial in range(trials):
        x = Configuration(config.seed + trial, p)
        V = random_generator_word(ctx, rng, 2, args.max_power)
        W = random_generator_word(ctx, rng, 2, args.max_power)
        identity_defect = max(identity_defect, check_cocycle_identity(ctx, V, W, [x]))
        swap = random_lpa_swap(ctx, rng)
        star_defect = max(star_defect, abs(J_local(ctx, x, swap) - J_star_decomposition(ctx, x, swap)))
        if trial < 20:
            n = int(rng.integers(-4, 5))
            atoms_defect = max(atoms_defect, abs(J_shift(ctx, x, n) - J_shift_via_atoms(ctx, x, n)))
        if config.verbose and trial % 100 == 0:
            print_status("cocycle-check", f"{trial}/{trials}")

    document = {
        "trials": trials,
        "cocycle_identity_max_defect": identity_defect,
        "local_vs_shift_decomposition_max_defect": star_defect,
        "telescoping_atoms_max_defect": atoms_defect,
        "ok": max(identity_defect, star_defect, atoms_defect) < 1e-10,
    }
    if config.samples:
        n = _single_int(args.n) if args.n else 8
        mean, stderr = entropy_rate_estimate(ctx, n, config.samples, config.seed, config.workers)
        document["entropy_rate"] = {"n": n, "estimate": mean, "stderr": stderr, "entropy": p.entropy()}
    return _emit(config, document)


def random_refinements(rng, p, rank, inner, outer, base):
    """A random pattern on B(outer) agreeing with `base` on B(inner)."""
    assignments = dict(base.items())
    for g in ball(rank, outer):
        if len(g) > inner and rng.random() < 0.5:
            assignments[g] = int(rng.integers(1, p.m + 1))
    return Pattern(assignments)


def cmd_weakmix_check(args, config):
    p = _vector(args.p)
    if args.trials < 1:
        raise ValidationError("--trials must be >= 1")
    h_plus, h_minus = build_weakmix_pair(config.rank, args.inner, args.outer, config.gen, config.cap)
    h = compose(h_plus, h_minus)
    rng = np.random.default_rng(config.seed)
    equal = 0
    for _ in range(args.trials):
        base = Pattern({g: int(rng.integers(1, p.m + 1)) for g in ball(config.rank, args.inner)})
        C_j = random_refinements(rng, p, config.rank, args.inner, args.outer, base)
        C_k = random_refinements(rng, p, config.rank, args.inner, args.outer, base)
        lhs, rhs = product_measure_check(p, h, C_j, C_k, base)
        equal += lhs == rhs
    return _emit(config, {
        "rank": config.rank,
        "N": args.inner,
        "outer": args.outer,
        "h_plus_swaps": len(h_plus.perm) // 2,
        "h_minus_swaps": len(h_minus.perm) // 2,
        "h_plus_in_HC_plus": in_HC_plus(h_plus, args.inner, config.gen),
        "h_minus_in_HC_minus": in_HC_minus(h_minus, args.inner, config.gen),
        "trials": args.trials,
        "exact_equalities": equal,
        "ok": equal == args.trials,
    })


def cmd_beta(args, config):
    p = _vector(args.p)
    ts = _t_values(args.t)
    if args.closed:
        rows = beta_mod.beta_sweep(p, ts)
    elif args.limit is not None:
        if args.limit < 1:
            raise ValidationError("--limit must be >= 1")
        rows = beta_mod.beta_sweep(p, ts, limit_n=args.limit)
    else:
        n = _single_int(_require(args.n, "--n"))
        rows = beta_mod.beta_sweep(p, ts, mc_n=n, samples=config.samples or 10_000, seed=config.seed,
                                   workers=config.workers, gen=config.gen)
    return _emit(config, {"p": p.to_list(), "results": [r.to_dict() for r in rows]},
                 CSV_SCHEMAS["beta_sweep"], [r.csv_row() for r in rows])


def cmd_restricted_beta(args, config):
    p = _vector(args.p)
    ts = _t_values(args.t)
    if len(ts) != 1:
        raise ValidationError("--t takes a single value here")
    t = ts[0]
    D = Pattern.load(args.fix, config.rank)
    ns = _int_list(args.n)
    rows = []
    for n in ns:
        value = beta_mod.restricted_growth_rate(p, t, D, n, args.reading, config.gen)
        gap = beta_mod.restricted_log_gap(p, t, D, n, args.reading, config.gen)
        rows.append([n, value, gap])
    target = t if BetaReading(args.reading) is BetaReading.LIMIT else 1 + t
    document = {
        "t": t,
        "reading": args.reading,
        "target": beta_mod.beta_closed(p, target),
        "rows": [{"n": n, "value": v, "log_gap": g} for n, v, g in rows],
    }
    return _emit(config, document, CSV_SCHEMAS["restricted_beta"], rows)


def cmd_pressure(args, config):
    p = _vector(args.p)
    ts = _t_values(args.t, DEFAULT_T_GRID)
    n = _single_int(args.n) if args.n else None
    rows = []
    for t in ts:
        row = {
            "t": t,
            "pressure": beta_mod.pressure_single_coordinate(p, t),
            "beta_closed": beta_mod.beta_closed(p, t),
        }
        row["exp_pressure"] = math.exp(row["pressure"])
        if n:
            row["separated_sets"] = beta_mod.pressure_separated_sets(p, t, n, config.cap)
        rows.append(row)
    return _emit(config, {"results": rows})


def cmd_power_sums(args, config):
    p = _vector(args.p)
    K = args.K if args.K is not None else p.m
    return _emit(config, {"p": p.to_list(), "power_sums": power_sums(p, K).to_list()})


def cmd_recover(args, config):
    ps = PowerSums(parse_number_list(args.power_sums, str))
    vector = recover_vector(ps, args.m)
    return _emit(config, {"vector": vector.to_list()})


def cmd_distinguish(args, config):
    p = _vector(args.p)
    q = _vector(args.q, "--q")
    report = distinguish(p, q)
    report["permutation_equivalent_sorted"] = permutation_equivalent(p, q)
    report["power_sums_agree"] = power_sums_agree(p, q)
    return _emit(config, report)


def end_to_end(p, perm, samples=100_000, seed=0, workers=1, rank=2, gen=DEFAULT_GENERATOR,
               t_grid=None, horizon=3):
    """
    Positive instance: q = p permuted, phi the radius-0 permutation code.
    Negative instance: the uniform 4-vector against [1/2, 1/8, 1/8, 1/8, 1/8].
    """
    t_grid = _t_values(None, DEFAULT_T_GRID) if t_grid is None else t_grid
    q = p.permuted(perm)
    phi = FixedRadiusCode.symbol_permutation(rank, perm)
    x = Configuration(seed, p)

    pushforward = pushforward_check(phi, p, q, samples, seed, workers)
    stats = expected_code_length(phi, p, "exact")
    m_phi = m_phi_truncated(phi, x, horizon, gen)
    a_phi = a_phi_truncated(phi, x, horizon, gen)
    bijective = all(
        len(invert_on_window(phi, Pattern({ball(rank, 0)[0]: j}), 0)) == 1
        for j in range(1, q.m + 1)
    )
    beta_rows = [{"t": t, "beta_p": beta_mod.beta_fsum(p, t), "beta_q": beta_mod.beta_fsum(q, t)} for t in t_grid]
    beta_equal = all(r["beta_p"] == r["beta_q"] for r in beta_rows)
    negative = distinguish(ProbVector([0.25] * 4), ProbVector([0.5] + [0.125] * 4))

    checks = {
        "pushforward_within_3_sigma": pushforward["ok"],
        "m_phi_is_0": m_phi == 0,
        # radius 0, and the shortest word off W_a has length 1
        "a_phi_is_minus_1": a_phi == -1,
        "expected_v_is_1": math.isclose(stats.v_mean, 1.0, rel_tol=0, abs_tol=1e-12),
        "bijective_on_windows": bijective,
        "beta_equal_on_grid": beta_equal,
        "negative_instance_distinguished": not negative["permutation_equivalent"],
    }
    return {
        "p": p.to_list(),
        "q": q.to_list(),
        "permutation": perm,
        "pushforward": pushforward,
        "m_phi": m_phi,
        "a_phi": a_phi,
        "horizon": horizon,
        "expected_v": stats.v_mean,
        "beta": beta_rows,
        "negative_instance": negative["summary"],
        "checks": checks,
        "ok": all(checks.values()),
    }


def cmd_end_to_end(args, config):
    p = _vector(args.p)
    perm = parse_cycle_notation(args.perm, p.m)
    t_grid = _t_values(args.t, DEFAULT_T_GRID)
    horizon = config.horizon if config.horizon is not None else 3
    report = end_to_end(p, perm, config.samples or 100_000, config.seed, config.workers,
                        config.rank, config.gen, t_grid, horizon)
    return _emit(config, report)


COMMANDS = {
    "ball": cmd_ball,
    "enum-wa": cmd_enum_wa,
    "check-bounds": cmd_check_bounds,
    "code-stats": cmd_code_stats,
    "cocycle-check": cmd_cocycle_check,
    "weakmix-check": cmd_weakmix_check,
    "beta": cmd_beta,
    "restricted-beta": cmd_restricted_beta,
    "pressure": cmd_pressure,
    "power-sums": cmd_power_sums,
    "recover": cmd_recover,
    "distinguish": cmd_distinguish,
    "end-to-end": cmd_end_to_end,
}


def _configure_logging(verbose):
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def join_list_values(argv):
    """
    Rewrite `--t -1,2` as `--t=-1,2`.

    argparse takes a value starting with "-" for an option unless it is a
    single number, so lists like "-1,2" are glued to their flag.
    """
    out = []
    argv = list(argv)
    i = 0
    while i < len(argv):
        token = argv[i]
        if token in LIST_FLAGS and i + 1 < len(argv) and _NEGATIVE_LIST.match(argv[i + 1]):
            out.append(f"{token}={argv[i + 1]}")
            i += 2
            continue
        out.append(token)
        i += 1
    return out


def run(argv=None, stdout=None, stderr=None):
    """Parse argv, run one subcommand, write its output; returns the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    argv = join_list_values(sys.argv[1:] if argv is None else argv)
    try:
        with contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_CODES["VALIDATION"]

    _configure_logging(args.verbose)
    try:
        config = RunConfig(args)
        output = COMMANDS[args.command](args, config)
    except (FinitaryBetaError, ValueError, ArithmeticError) as e:
        code, message = handle_error(e)
        print(message, file=stderr)
        return code
    print(output, file=stdout)
    return EXIT_CODES["OK"]


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
