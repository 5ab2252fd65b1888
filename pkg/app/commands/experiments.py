"""
Experiment Commands
sample, certify, search-mixed and qudit-check: seeded sweeps, necessity
certificates and the explorer experiments.
"""

import argparse
import logging

from app.commands import CommandOutcome
from app.core.utils import IndexParser
from app.services.certify import check_all_consistency, necessity_certificate, necessity_sweep
from app.services.explorer import DEFAULT_PAIRS, SearchConfig, qudit_polygon_check, search_mixed4
from app.services.storage_service import storage_service

logger = logging.getLogger(__name__)


# ============================================================================
# HANDLERS
# ============================================================================

def cmd_sample(args: argparse.Namespace) -> CommandOutcome:
    sweep = necessity_sweep(args.n, args.count, args.seed, certify=args.certify)
    return CommandOutcome(0 if sweep.holds else 1, sweep)


def cmd_certify(args: argparse.Namespace) -> CommandOutcome:
    state = storage_service.load_state(args.state)
    qubits = [args.qubit] if args.qubit is not None else list(range(1, state.n + 1))

    # TheoremViolationError propagates with its report attached
    certificates = [necessity_certificate(state, k).model_dump(mode="json") for k in qubits]
    report = {"n": state.n, "certificates": certificates}
    exit_code = 0

    if args.consistency is not None:
        checks = check_all_consistency(state, args.consistency)
        failed = [c.model_dump(mode="json") for c in checks if not c.passed]
        report["consistency"] = {
            "max_union": args.consistency,
            "triples": len(checks),
            "max_deviation": max((c.deviation for c in checks), default=0.0),
            "failed": failed,
        }
        if failed:
            exit_code = 1

    return CommandOutcome(exit_code, report)


def cmd_search_mixed(args: argparse.Namespace) -> CommandOutcome:
    overrides = {
        "restarts": args.restarts,
        "max_iters": args.max_iters,
        "step": args.step,
        "workers": args.workers,
    }
    config = SearchConfig(
        seed=args.seed,
        target_pairs=IndexParser.parse_pairs(args.pairs) if args.pairs else list(DEFAULT_PAIRS),
        **{key: value for key, value in overrides.items() if value is not None},
    )
    result = search_mixed4(config)
    if args.out:
        storage_service.save_state(args.out, result.to_pure_state())
    return CommandOutcome(0, result)


def cmd_qudit_check(args: argparse.Namespace) -> CommandOutcome:
    report = qudit_polygon_check(storage_service.load_qudit_state(args.state), eps=args.eps)
    return CommandOutcome(0 if report.feasible else 1, report)


# ============================================================================
# REGISTRATION
# ============================================================================

def register(subparsers) -> None:
    sample = subparsers.add_parser("sample", help="Necessity sweep over seeded Haar-random states")
    sample.add_argument("--n", type=int, required=True, help="Qubit count")
    sample.add_argument("--count", type=int, default=100, help="Number of states (default: 100)")
    sample.add_argument("--seed", type=int, required=True, help="Base seed")
    sample.add_argument("--certify", action="store_true", help="Run the necessity certificate on every qubit")
    sample.set_defaults(func=cmd_sample)

    certify = subparsers.add_parser("certify", help="Necessity certificates for a state file")
    certify.add_argument("state", help="State file")
    certify.add_argument("--qubit", type=int, default=None, help="Certify only this qubit")
    certify.add_argument("--consistency", type=int, default=None, metavar="MAX_UNION",
                         help="Also check consistency of overlapping marginals up to this union size")
    certify.set_defaults(func=cmd_certify)

    search = subparsers.add_parser("search-mixed", help="Four-qubit search for totally mixed pair marginals")
    search.add_argument("--seed", type=int, required=True, help="Base seed")
    search.add_argument("--restarts", type=int, default=None, help="Number of random restarts")
    search.add_argument("--max-iters", type=int, default=None, dest="max_iters", help="Descent iterations per restart")
    search.add_argument("--step", type=float, default=None, help="Initial step size")
    search.add_argument("--workers", type=int, default=None, help="Threads for restarts")
    search.add_argument("--pairs", default=None, help="Target pairs, e.g. 1-2,1-3,1-4")
    search.add_argument("--out", default=None, help="State file for the best state")
    search.set_defaults(func=cmd_search_mixed)

    qudit = subparsers.add_parser("qudit-check", help="Generalized polygon check on a qudit state file")
    qudit.add_argument("state", help="Qudit state file {\"d\", \"n\", \"amplitudes\"}")
    qudit.add_argument("--eps", type=float, default=None, help="One-sided tolerance (default from settings)")
    qudit.set_defaults(func=cmd_qudit_check)
