# src/mmebench/cli.py
"""
mmebench command line
=====================

Runs experiment files, the invariant verification suites and the adversarial
starting-point constructor.

Usage:
    python bench.py run --config configs/helmholtz.cfg            # One experiment
    python bench.py run --config configs/heat3d.cfg --budget 50   # Override the budget
    python bench.py verify                                        # Every suite
    python bench.py verify --suite theorem1                       # One suite
    python bench.py adversarial 2 0.5 --spectrum helmholtz        # Slow q0 certificate
    python bench.py list                                          # Problems, methods, suites
"""

import argparse
import logging
import os
import sys
from typing import List, Optional

import numpy as np

from .config import config
from .exceptions import ConfigFileError, InvalidParameterError, NeedsLongerSpectrumError
from .models import MethodKind, ProblemSelector
from .services.orchestrator import ExperimentOrchestrator, certificate_frame, write_table
from .services.problem_factory import PROBLEM_PARAMETERS, make_spectrum
from .services.verification import SUITES, run_suite
from .spectral.adversarial import adversarial_initial_point
from .utils.config_file import load_experiment

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


# ANSI color codes for terminal output
class Colors:
    RED = '\033[91m'
    GREEN = '\033[92m'
    YELLOW = '\033[93m'
    BLUE = '\033[94m'
    CYAN = '\033[96m'
    BOLD = '\033[1m'
    END = '\033[0m'


def cmd_run(args: argparse.Namespace) -> int:
    """Run one experiment file and print its summary table."""
    try:
        experiment = load_experiment(args.config, overrides={"output_dir": args.out, "seed": args.seed,
                                                              "budget": args.budget})
    except ConfigFileError as e:
        logger.error(f"Invalid experiment file: {e}", exc_info=True)
        print(f"{Colors.RED}❌ {e}{Colors.END}")
        return EXIT_USAGE

    print(f"{Colors.BOLD}{Colors.BLUE}Experiment {experiment.name}{Colors.END} "
          f"({experiment.problem.value}, output in {experiment.output_dir})")
    result = ExperimentOrchestrator(experiment).execute()
    if not result["success"]:
        print(f"{Colors.RED}❌ Experiment failed: {result['error']}{Colors.END}")
        return EXIT_FAILED

    print(result["summary"].to_string(index=False, na_rep="-"))
    print(f"{Colors.GREEN}✅ Wrote {len(result['files'])} files to {experiment.output_dir}{Colors.END}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    """Run the named suite (or all of them); exit 0 iff every check passes."""
    names = list(SUITES) if args.suite in (None, "all") else [args.suite]
    failures = 0
    for name in names:
        try:
            report = run_suite(name, seed=args.seed)
        except Exception as e:
            logger.error(f"Suite {name} crashed: {e}", exc_info=True)
            print(f"{Colors.RED}❌ {name}: {e}{Colors.END}")
            failures += 1
            continue

        color = Colors.GREEN if report.passed else Colors.RED
        print(f"\n{Colors.BOLD}{name}{Colors.END} {color}"
              f"{len(report.checks) - len(report.failures)}/{len(report.checks)} passed{Colors.END}")
        for check in report.checks:
            mark = f"{Colors.GREEN}PASS{Colors.END}" if check.passed else f"{Colors.RED}FAIL{Colors.END}"
            where = f" at step {check.step_index}" if check.step_index is not None and not check.passed else ""
            print(f"  {mark} {check.problem}: {check.check}{where} "
                  f"(defect {check.defect:.3e}, tol {check.tolerance:.1e})"
                  + (f" {check.detail}" if check.detail else ""))
        failures += len(report.failures)

    if failures:
        print(f"\n{Colors.RED}❌ {failures} check(s) failed{Colors.END}")
        return EXIT_FAILED
    print(f"\n{Colors.GREEN}✅ All checks passed{Colors.END}")
    return EXIT_OK


def cmd_adversarial(args: argparse.Namespace) -> int:
    """Construct and certify a slow starting point; write its coefficients."""
    try:
        spectrum = make_spectrum(args.spectrum, args.n_modes, args.kappa, args.smallest)
        certificate = adversarial_initial_point(spectrum, args.N, args.epsilon)
    except NeedsLongerSpectrumError as e:
        logger.error(f"Adversarial construction failed: {e}", exc_info=True)
        print(f"{Colors.RED}❌ {e}{Colors.END}")
        print(f"{Colors.YELLOW}Retry with a larger --n-modes (currently {args.n_modes}).{Colors.END}")
        return EXIT_FAILED
    except InvalidParameterError as e:
        logger.error(f"Invalid adversarial parameters: {e}", exc_info=True)
        print(f"{Colors.RED}❌ {e}{Colors.END}")
        return EXIT_USAGE

    xi_norm = float(np.linalg.norm(certificate.xi))
    color = Colors.GREEN if certificate.certified else Colors.RED
    print(f"{Colors.BOLD}Adversarial q0 for N={certificate.N}, epsilon={certificate.epsilon}{Colors.END}")
    print(f"  spectrum:  {spectrum.label} ({len(spectrum)} modes)")
    print(f"  M:         {certificate.M}")
    print(f"  xi:        modes 1..{certificate.N} carry sqrt((1-eps)/(2N)), mode {certificate.M} "
          f"carries sqrt((1+eps)/2)")
    print(f"  |xi|:      {xi_norm!r}")
    print(f"  eta_hat:   {', '.join(repr(float(v)) for v in certificate.eta_hat)}")
    print(f"  psi_min:   {color}{certificate.psi_min!r}{Colors.END}")

    path = write_table(certificate_frame(certificate, spectrum.eigenvalues),
                       os.path.join(args.out or config.OUTPUT_DIR, "q0_coefficients.csv"))
    print(f"  written:   {path}")
    if not certificate.certified:
        print(f"{Colors.RED}❌ psi_min does not exceed epsilon{Colors.END}")
        return EXIT_FAILED
    print(f"{Colors.GREEN}✅ Certified: no {certificate.N}-step Krylov method gets within "
          f"sqrt(epsilon) of q*{Colors.END}")
    return EXIT_OK


def cmd_list(args: argparse.Namespace) -> int:
    print(f"{Colors.BOLD}{Colors.CYAN}Problems{Colors.END}")
    for selector in ProblemSelector:
        defaults = ", ".join(f"{k}={v}" for k, v in PROBLEM_PARAMETERS[selector].items())
        print(f"  {selector.value:<16} {defaults}")
    print(f"\n{Colors.BOLD}{Colors.CYAN}Method kinds{Colors.END}")
    for kind in MethodKind:
        print(f"  {kind.value}")
    print(f"\n{Colors.BOLD}{Colors.CYAN}Verification suites{Colors.END}")
    for name in SUITES:
        print(f"  {name}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bench",
        description="Minimal-error method benchmarks and invariant checks",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__.split("Usage:", 1)[1] if __doc__ else None,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="Run an experiment file")
    run_parser.add_argument("--config", required=True, help="Experiment file (key = value sections)")
    run_parser.add_argument("--out", default=None, help="Output directory (overrides the file)")
    run_parser.add_argument("--seed", type=int, default=None, help="Seed for random starting points")
    run_parser.add_argument("--budget", type=int, default=None, help="Iteration budget for every method")
    run_parser.set_defaults(handler=cmd_run)

    verify_parser = sub.add_parser("verify", help="Run invariant suites")
    verify_parser.add_argument("--suite", choices=list(SUITES) + ["all"], default="all")
    verify_parser.add_argument("--seed", type=int, default=None, help="Seed for random probes")
    verify_parser.set_defaults(handler=cmd_verify)

    adversarial_parser = sub.add_parser("adversarial", help="Certify a slow starting point")
    adversarial_parser.add_argument("N", type=int, help="Step budget of the Krylov method")
    adversarial_parser.add_argument("epsilon", type=float, help="Squared-distance floor in (0, 1)")
    adversarial_parser.add_argument("--spectrum", choices=["helmholtz", "heat", "geometric"], default="helmholtz")
    adversarial_parser.add_argument("--n-modes", type=int, default=200)
    adversarial_parser.add_argument("--kappa", type=float, default=1.0)
    adversarial_parser.add_argument("--smallest", type=float, default=1e-3,
                                    help="Smallest eigenvalue of the geometric spectrum")
    adversarial_parser.add_argument("--out", default=None, help="Directory for q0_coefficients.csv")
    adversarial_parser.set_defaults(handler=cmd_adversarial)

    list_parser = sub.add_parser("list", help="List problems, method kinds and suites")
    list_parser.set_defaults(handler=cmd_list)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config.validate()
        return args.handler(args)
    except KeyboardInterrupt:
        print(f"\n{Colors.YELLOW}Interrupted.{Colors.END}")
        return EXIT_FAILED
    except Exception as e:
        logger.error(f"Command '{args.command}' failed: {e}", exc_info=True)
        print(f"{Colors.RED}❌ {e}{Colors.END}")
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
