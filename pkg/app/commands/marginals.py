"""
Marginal Commands
check, synth, synth-rho and reduce: the file-based front end for spectra
feasibility, state synthesis and partial traces.
"""

import argparse
import logging

from app.commands import CommandOutcome
from app.core.linalg import jacobi_eigvalsh
from app.core.utils import IndexParser
from app.services.spectra import check_polygon, spectrum_of
from app.services.statevec import eig2, reduce_one_qubit, reduce_subset, validate_density_matrix
from app.services.storage_service import matrix_to_pairs, storage_service
from app.services.synthesis import synth_density_detailed, synth_spectrum

logger = logging.getLogger(__name__)


# ============================================================================
# HANDLERS
# ============================================================================

def cmd_check(args: argparse.Namespace) -> CommandOutcome:
    report = check_polygon(storage_service.load_spectrum(args.spectrum), eps=args.eps)
    if not report.feasible:
        logger.info(f"❌ Infeasible: qubit {report.worst_index} violates by {-report.min_slack:.3e}")
    return CommandOutcome(0 if report.feasible else 1, report)


def cmd_synth(args: argparse.Namespace) -> CommandOutcome:
    result = synth_spectrum(storage_service.load_spectrum(args.spectrum))
    storage_service.save_state(args.out, result.state)
    if args.trace:
        storage_service.write_report(args.trace, result.trace_report())

    return CommandOutcome(0, {
        "n": result.state.n,
        "out": str(args.out),
        "requested": result.requested.lambdas,
        "achieved": result.achieved.lambdas,
        "max_error": result.max_error,
    })


def cmd_synth_rho(args: argparse.Namespace) -> CommandOutcome:
    result = synth_density_detailed(storage_service.load_density_targets(args.targets))
    storage_service.save_state(args.out, result.state)
    if args.trace:
        storage_service.write_report(args.trace, result.spectrum.trace_report())

    return CommandOutcome(0, {
        "n": result.state.n,
        "out": str(args.out),
        "requested": result.spectrum.requested.lambdas,
        "achieved": spectrum_of(result.state).lambdas,
        "max_error": result.max_error,
    })


def _one_qubit_entry(state, k: int) -> dict:
    rho = reduce_one_qubit(state, k)
    dec = eig2(rho)
    return {
        "qubit": k,
        "matrix": matrix_to_pairs(rho.matrix),
        "eigenvalues": [dec.lambda_small, dec.lambda_large],
    }


def cmd_reduce(args: argparse.Namespace) -> CommandOutcome:
    state = storage_service.load_state(args.state)

    if args.subset:
        subset = IndexParser.parse_subset(args.subset)
        rho = reduce_subset(state, subset)
        validate_density_matrix(rho)
        return CommandOutcome(0, {
            "subset": subset,
            "matrix": matrix_to_pairs(rho.matrix),
            "eigenvalues": [float(x) for x in jacobi_eigvalsh(rho.matrix)],
        })

    qubits = [args.qubit] if args.qubit is not None else list(range(1, state.n + 1))
    return CommandOutcome(0, {
        "marginals": [_one_qubit_entry(state, k) for k in qubits],
        "spectrum": spectrum_of(state).lambdas,
    })


# ============================================================================
# REGISTRATION
# ============================================================================

def register(subparsers) -> None:
    check = subparsers.add_parser("check", help="Evaluate the polygon inequalities on a spectrum file")
    check.add_argument("spectrum", help="Spectrum file {\"lambdas\": [...]}")
    check.add_argument("--eps", type=float, default=None, help="One-sided tolerance (default from settings)")
    check.set_defaults(func=cmd_check)

    synth = subparsers.add_parser("synth", help="Build a state with the given one-qubit spectra")
    synth.add_argument("spectrum", help="Spectrum file")
    synth.add_argument("--out", required=True, help="State file to write")
    synth.add_argument("--trace", default=None, help="Optional recursion trace report")
    synth.set_defaults(func=cmd_synth)

    synth_rho = subparsers.add_parser("synth-rho", help="Build a state with the given one-qubit density matrices")
    synth_rho.add_argument("targets", help="Density-targets file {\"rhos\": [...]}")
    synth_rho.add_argument("--out", required=True, help="State file to write")
    synth_rho.add_argument("--trace", default=None, help="Optional recursion trace report")
    synth_rho.set_defaults(func=cmd_synth_rho)

    reduce = subparsers.add_parser("reduce", help="Partial traces of a state file")
    reduce.add_argument("state", help="State file")
    target = reduce.add_mutually_exclusive_group()
    target.add_argument("--subset", default=None, help="Qubit subset, e.g. 1,2")
    target.add_argument("--qubit", type=int, default=None, help="Single qubit index")
    reduce.set_defaults(func=cmd_reduce)
