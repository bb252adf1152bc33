"""Command-line front end.

Exit codes: 0 success, 1 mismatch or failed verification, 2 usage error,
3 invalid input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import (
    BlowupGuard,
    CaseMismatch,
    EpsSearchExhausted,
    GameError,
    InternalSoundnessError,
    NestingViolation,
)
from .game import gen_random, parse_game, serialize_game, stateset_from_json, stateset_to_json
from .oracle import DiffConfig, oracle_almost_PM, oracle_almost_UM, oracle_limit_IPM, run_differential
from .reductions import P_M, reduce_finite_precision, reduce_pure
from .solver import IP_M_LIMIT, U_M, solve, solve_almost, solve_complement, solve_limit
from .strategy import (
    RANKED,
    extract_limit_eps,
    extract_uniform_almost,
    strategy_from_json,
    strategy_to_json,
    verify_almost,
    verify_value,
)

log = logging.getLogger("qualgame")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INVALID = 0, 1, 2, 3
VALUE_TOL = 1e-6


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise GameError(f"cannot read {path}: {exc.strerror}") from None


def _game(path: str):
    return parse_game(_read(path))


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError("must lie in (0, 1)")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qualgame", description="Qualitative solver for concurrent stochastic parity games.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to standard error")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="print a winning set")
    s.add_argument("--class", dest="cls", required=True, choices=["P-M", "U-M", "FP-M", "IP-M-limit", "complement"])
    s.add_argument("--b", type=_positive_int, help="precision bound for FP-M")
    s.add_argument("--of", choices=[U_M, IP_M_LIMIT], default=U_M, help="class whose complement to compute")
    s.add_argument("--game", required=True)

    st = sub.add_parser("strategy", help="print a witness strategy")
    st.add_argument("--class", dest="cls", required=True, choices=["U-M", "IP-M-limit"])
    st.add_argument("--eps", type=_positive_float, help="failure bound for IP-M-limit")
    st.add_argument("--game", required=True)

    v = sub.add_parser("verify", help="check a strategy against a claimed winning set")
    v.add_argument("--game", required=True)
    v.add_argument("--strategy", required=True)
    v.add_argument("--claim", required=True)
    v.add_argument("--eps", type=_positive_float)

    r = sub.add_parser("reduce", help="print the turn-based reduction")
    grp = r.add_mutually_exclusive_group(required=True)
    grp.add_argument("--pure", action="store_true")
    grp.add_argument("--fp", type=_positive_int, metavar="K")
    r.add_argument("--game", required=True)

    o = sub.add_parser("oracle", help="brute-force winning set")
    o.add_argument("--class", dest="cls", required=True, choices=["U-M", "P-M", "IP-M-limit"])
    o.add_argument("--game", required=True)

    d = sub.add_parser("diff", help="differential test run")
    d.add_argument("--count", type=int, required=True)
    d.add_argument("--states", type=_positive_int, required=True)
    d.add_argument("--actions", type=_positive_int, required=True)
    d.add_argument("--seed", type=int, required=True)
    d.add_argument("--succ", type=_positive_int, default=2)
    d.add_argument("--prio", type=int, default=3)
    d.add_argument("--jobs", type=_positive_int, default=1)

    g = sub.add_parser("random", help="print a random game")
    g.add_argument("--states", type=_positive_int, required=True)
    g.add_argument("--actions", type=_positive_int, required=True)
    g.add_argument("--succ", type=_positive_int, required=True)
    g.add_argument("--prio", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    return p


def cmd_solve(args) -> int:
    g = _game(args.game)
    if args.cls == "FP-M" and args.b is None:
        raise UsageError("--class FP-M needs --b K")
    if args.cls == "complement":
        win = solve_complement(g, args.of)
    else:
        win = solve(g, args.cls, args.b)
    print(stateset_to_json(g, win))
    return EXIT_OK


def cmd_strategy(args) -> int:
    g = _game(args.game)
    if args.cls == U_M:
        gn, res = solve_almost(g)
        if not res.winning:
            log.warning("winning set is empty; strategy carries no claim")
        strat = extract_uniform_almost(g, res)
    else:
        if args.eps is None:
            raise UsageError("--class IP-M-limit needs --eps E")
        gn, res = solve_limit(g)
        strat, bound = extract_limit_eps(g, res, args.eps)
        log.info("achieved bound %g at eps %g", bound, strat.eps)
    print(strategy_to_json(g, strat))
    return EXIT_OK


def cmd_verify(args) -> int:
    g = _game(args.game)
    strat = strategy_from_json(g, _read(args.strategy))
    claim = stateset_from_json(g, _read(args.claim))
    out: dict = {"claim": g.names(claim)}
    if strat.kind == RANKED:
        eps = strat.eps if strat.eps is not None else args.eps
        threshold = args.eps if args.eps is not None else strat.bound
        if eps is None or threshold is None:
            raise UsageError("a ranked strategy needs --eps (or eps and bound in the file)")
        values = verify_value(g, strat, eps, claim)
        worst = max((float(values[s]) for s in claim), default=0.0)
        ok = worst <= threshold + VALUE_TOL
        out.update(eps=eps, threshold=threshold, max_failure=worst)
    else:
        ok = verify_almost(g, strat, claim)
        values = verify_value(g, strat, None, claim)
        if args.eps is not None:
            worst = max((float(values[s]) for s in claim), default=0.0)
            ok = ok and worst <= args.eps + VALUE_TOL
    out["values"] = {g.state_names[s]: float(values[s]) for s in g.states()}
    out["pass"] = bool(ok)
    print(json.dumps(out, indent=2))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_reduce(args) -> int:
    g = _game(args.game)
    tb = reduce_pure(g) if args.pure else reduce_finite_precision(g, args.fp)
    print(tb.to_json())
    return EXIT_OK


def cmd_oracle(args) -> int:
    g = _game(args.game)
    if args.cls == U_M:
        win = oracle_almost_UM(g)
    elif args.cls == P_M:
        win = oracle_almost_PM(g)
    else:
        log.info("limit oracle is approximate (finite eps grid)")
        win = oracle_limit_IPM(g)
    print(stateset_to_json(g, win))
    return EXIT_OK


def cmd_diff(args) -> int:
    if args.count < 0:
        raise UsageError("--count must be >= 0")
    cfg = DiffConfig(count=args.count, states=args.states, actions=args.actions, succ=args.succ,
                     prio=args.prio, seed=args.seed, jobs=args.jobs)
    report = run_differential(cfg)
    doc = report.to_dict()
    log.info("diff wall time %.3fs", doc.pop("wall_time"))
    print(json.dumps(doc, indent=2))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_random(args) -> int:
    if args.prio < 0:
        raise UsageError("--prio must be >= 0")
    print(serialize_game(gen_random(args.states, args.actions, args.succ, args.prio, args.seed)))
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "strategy": cmd_strategy,
    "verify": cmd_verify,
    "reduce": cmd_reduce,
    "oracle": cmd_oracle,
    "diff": cmd_diff,
    "random": cmd_random,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GameError, CaseMismatch, NestingViolation, BlowupGuard) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (InternalSoundnessError, EpsSearchExhausted) as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
