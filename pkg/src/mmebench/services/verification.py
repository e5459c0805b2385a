# src/mmebench/services/verification.py
"""
Invariant suites behind `bench verify`.

Each suite runs its checks across the shipped problem families at desk
resolution and returns a SuiteReport; a failing check names the problem, the
step index and the measured defect.
"""

import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.stats

from ..config import config
from ..core.operators import AffineForwardOperator, verify_adjoint
from ..core.problem import QuadraticProblem, fundamental_identity_defect
from ..core.space import SpaceDescriptor, StateVector, inner
from ..krylov.oracle import build_krylov_basis, optimal_krylov_distance, verify_theorem1
from ..models import CheckResult, MethodConfig, MethodKind, StepDiagnostics, SuiteReport
from ..optimizers.runner import make_method, run
from ..problems.heat import DESK_H, DESK_TAU, HeatSetup, make_heat_operator
from ..problems.helmholtz import HelmholtzModelSetup, make_helmholtz_operator
from ..problems.thermoacoustic import ThermoacousticSetup, make_thermoacoustic_problem
from ..spectral.adversarial import adversarial_initial_point
from ..spectral.model import (
    DiagonalProblem,
    Spectrum,
    make_geometric_spectrum,
    make_heat_spectrum,
    make_helmholtz_spectrum,
    run_gradient_descent_spectral,
)
from ..utils.helper import make_rng, random_spd_diagonal

logger = logging.getLogger(__name__)

ADJOINT_TOLERANCE = 1e-10
IDENTITY_TOLERANCE = 1e-9
ORTHOGONALITY_TOLERANCE = 1e-9
TELESCOPING_TOLERANCE = 1e-8
STEP_IDENTITY_TOLERANCE = 1e-8
LIPSCHITZ_SLACK = 1e-3
THEOREM1_TOLERANCE = 1e-6
DOMINATION_SLACK = 1e-9

BASELINE_KINDS = (
    MethodKind.POLYAK,
    MethodKind.GRADIENT_DESCENT_FIXED,
    MethodKind.HEAVY_BALL_ADAPTIVE,
    MethodKind.CG_FR,
    MethodKind.CG_PR,
    MethodKind.CG_ORTHO,
    MethodKind.SIMILAR_TRIANGLES,
)


# Problem fixtures ---------------------------------------------------------

def random_spd_problem(dim: int, rng: np.random.Generator, label: Optional[str] = None) -> QuadraticProblem:
    """Dense A0 = Q diag(sqrt(lambda)) Q^T with a random exact solution and consistent data."""
    eigenvalues = random_spd_diagonal(dim, rng)
    basis = scipy.stats.ortho_group.rvs(dim, random_state=rng)
    matrix = basis @ np.diag(np.sqrt(eigenvalues)) @ basis.T
    space = SpaceDescriptor.uniform(dim, label=label or f"spd({dim})")
    operator = AffineForwardOperator.from_matrix(matrix, space, space, label=space.label)
    exact = StateVector(space, rng.standard_normal(dim))
    return QuadraticProblem.single(operator, operator.apply(exact), exact_solution=exact,
                                   lipschitz_estimate=float(eigenvalues[0]), label=space.label)


def random_diagonal_model(dim: int, rng: np.random.Generator, smallest: float = 1e-2) -> DiagonalProblem:
    spectrum = Spectrum(random_spd_diagonal(dim, rng, smallest=smallest), label=f"random({dim})")
    return DiagonalProblem.from_spectrum(spectrum, rng=rng)


def desk_problems() -> List[QuadraticProblem]:
    """One small instance of every PDE family."""
    problems = [make_helmholtz_operator(HelmholtzModelSetup(kappa=1.0, n_modes=50))[1],
                make_heat_operator(HeatSetup.one_dimensional(kappa=1.0, h=0.05, tau=1e-3))[1],
                make_heat_operator(HeatSetup(dimension=3, kappa=0.4, h=DESK_H, tau=DESK_TAU))[1],
                make_thermoacoustic_problem(ThermoacousticSetup(h=0.04, tau=0.004))]
    return problems


def _check(suite: str, check: str, problem: str, defect: float, tolerance: float,
           step_index: Optional[int] = None, detail: str = "") -> CheckResult:
    passed = bool(defect <= tolerance)
    if not passed:
        logger.warning(f"[{suite}] {check} on {problem} failed at step {step_index}: "
                       f"defect {defect:.3e} > {tolerance:.1e}")
    return CheckResult(suite=suite, check=check, problem=problem, passed=passed, defect=float(defect),
                       tolerance=tolerance, step_index=step_index, detail=detail)


def trace_steps(problem: QuadraticProblem, q0: StateVector, method: MethodConfig,
                steps: int) -> List[Tuple[StepDiagnostics, StateVector]]:
    """Accepted steps h_k with the diagnostics of q_k, straight from the method."""
    instance = make_method(problem, method)
    state = instance.initial_state(q0)
    out = []
    for k in range(steps):
        state.k = k
        q_next, diag = instance.step(state)
        if diag.stop is not None:
            break
        out.append((diag, state.last_step))
        state.q = q_next
    return out


def _mme_family() -> List[MethodConfig]:
    return [MethodConfig(kind=MethodKind.MINIMAL_ERROR)] + [MethodConfig.mme(m) for m in (1, 2, 5, None)]


# Suites --------------------------------------------------------------------

def suite_adjoint(seed: int) -> SuiteReport:
    report = SuiteReport(suite="adjoint")
    rng = make_rng(seed, stream=10)
    domain = SpaceDescriptor.trapezoid((7, 5), (1 / 6, 1 / 4), label="dense-domain")
    codomain = SpaceDescriptor.trapezoid((9,), (1 / 8,), label="dense-codomain")
    dense = AffineForwardOperator.from_matrix(rng.standard_normal((9, 35)), domain, codomain, label="dense")
    operators = [dense] + [term.operator for problem in desk_problems() for term in problem.terms]
    for operator in operators:
        result = verify_adjoint(operator, trials=config.ADJOINT_TRIALS, tol=ADJOINT_TOLERANCE, rng=rng)
        report.checks.append(_check("adjoint", "<A0 q, p> = <q, A* p>", operator.label,
                                    result.max_defect, ADJOINT_TOLERANCE, detail=f"{result.trials} probes"))
    return report


def suite_identity2j(seed: int, points: int = 20) -> SuiteReport:
    report = SuiteReport(suite="identity2J")
    rng = make_rng(seed, stream=11)
    problems = desk_problems() + [random_spd_problem(12, rng), random_diagonal_model(10, rng).problem]
    for problem in problems:
        worst, where = 0.0, 0
        for index in range(points):
            q = problem.exact_solution + StateVector.random_unit(problem.domain, rng)
            defect = fundamental_identity_defect(problem, q)
            if defect > worst:
                worst, where = defect, index
        report.checks.append(_check("identity2J", "<q - q*, grad J> = 2J", problem.label, worst,
                                    IDENTITY_TOLERANCE, where, f"{points} random points"))
    return report


def suite_lemma1(seed: int, steps: int = 30) -> SuiteReport:
    report = SuiteReport(suite="lemma1")
    rng = make_rng(seed, stream=12)
    spd = random_spd_problem(12, rng)
    spectral = DiagonalProblem.from_spectrum(make_helmholtz_spectrum(1.0, 20), rng=rng)
    cases = [(spd, StateVector.zeros(spd.domain)), (spectral.problem, spectral.q0)]
    for problem, q0 in cases:
        for m in (1, 2, 5):
            trace = trace_steps(problem, q0, MethodConfig.mme(m), steps)
            hs = [h for _, h in trace]
            worst, where = 0.0, None
            for k, h in enumerate(hs):
                for j in range(max(0, k - m), k):
                    scale = h.norm() * hs[j].norm()
                    defect = abs(inner(problem.domain, h, hs[j])) / scale
                    if defect > worst:
                        worst, where = defect, k
            report.checks.append(_check("lemma1", f"MME({m}) step orthogonality", problem.label, worst,
                                        ORTHOGONALITY_TOLERANCE, where, f"{len(hs)} steps"))
    return report


def suite_telescoping(seed: int, steps: int = 30) -> SuiteReport:
    report = SuiteReport(suite="telescoping")
    rng = make_rng(seed, stream=13)
    spd = random_spd_problem(12, rng)
    spectral = DiagonalProblem.from_spectrum(make_helmholtz_spectrum(1.0, 20), rng=rng)
    cases = [(spd, StateVector.zeros(spd.domain)), (spectral.problem, spectral.q0)]
    for problem, q0 in cases:
        for method in _mme_family():
            record = run(problem, q0, method.model_copy(update={"max_iterations": steps}))
            initial_sq = problem.distance(q0) ** 2
            travelled = sum(d.step_norm ** 2 for d in record.per_step if d.stop is None)
            defect = abs(initial_sq - record.final_distance ** 2 - travelled) / initial_sq
            report.checks.append(_check("telescoping", f"{method.label} |e0|^2 - |en|^2 = sum |h|^2",
                                        problem.label, defect, TELESCOPING_TOLERANCE, record.final_index))
    return report


def suite_theorem1(seed: int, seeds: int = 5) -> SuiteReport:
    report = SuiteReport(suite="theorem1")
    cases = []
    for offset in range(seeds):
        model = random_diagonal_model(10, make_rng(seed + offset, stream=14))
        cases.append((model, 10))
    cases.append((DiagonalProblem.from_spectrum(make_helmholtz_spectrum(1.0, 20),
                                                rng=make_rng(seed, stream=15)), 15))

    for model, n_max in cases:
        problem, q0 = model.problem, model.q0
        theorem = verify_theorem1(problem, q0, n_max=n_max, tol=THEOREM1_TOLERANCE)
        for entry in theorem.entries:
            if not (entry.attained and entry.bounded):
                gap = abs(entry.method_distance - entry.oracle_distance)
                report.checks.append(_check("theorem1", "MME(inf) attains the Krylov optimum", problem.label,
                                            gap / max(entry.oracle_distance, 1e-12), THEOREM1_TOLERANCE,
                                            entry.n))
                break
        else:
            worst = max((abs(e.method_distance - e.oracle_distance) for e in theorem.entries), default=0.0)
            report.checks.append(_check("theorem1", "MME(inf) attains the Krylov optimum", problem.label,
                                        0.0, THEOREM1_TOLERANCE,
                                        detail=f"{len(theorem.entries)} steps, max gap {worst:.2e}"))

        basis = build_krylov_basis(problem, q0, n_max)
        oracle = [optimal_krylov_distance(q0, problem.exact_solution, basis.leading(n))
                  for n in range(1, basis.effective_dim + 1)]
        for kind in BASELINE_KINDS:
            record = run(problem, q0, MethodConfig(kind=kind, max_iterations=n_max + 1))
            worst, where = 0.0, None
            for row in record.per_step:
                if 1 <= row.k <= len(oracle):
                    shortfall = oracle[row.k - 1] - row.distance_to_solution
                    if shortfall > worst:
                        worst, where = shortfall, row.k
            report.checks.append(_check("theorem1", f"{record.label} stays above the optimum", problem.label,
                                        worst, DOMINATION_SLACK, where))
    return report


def suite_theorem4(seed: int, steps: int = 30) -> SuiteReport:
    report = SuiteReport(suite="theorem4")
    rng = make_rng(seed, stream=16)
    problems = desk_problems() + [random_spd_problem(12, rng)]
    for problem in problems:
        lipschitz = problem.lipschitz()
        q0 = StateVector.zeros(problem.domain)
        for method in _mme_family():
            record = run(problem, q0, method.model_copy(update={"max_iterations": steps}))
            bound_worst, equality_worst, where_bound, where_equality = 0.0, 0.0, None, None
            for row in record.per_step:
                if row.stop is not None:
                    continue
                bound = 0.5 * lipschitz * row.step_norm ** 2 * row.sin2_phi
                excess = row.functional - bound * (1.0 + LIPSCHITZ_SLACK) - 1e-12
                if excess > bound_worst:
                    bound_worst, where_bound = excess, row.k
                exact = 0.5 * row.grad_norm * row.step_norm * math.sqrt(row.sin2_phi)
                defect = abs(row.functional - exact) / row.functional if row.functional > 0 else 0.0
                if defect > equality_worst:
                    equality_worst, where_equality = defect, row.k
            report.checks.append(_check("theorem4", f"{method.label} J <= (L/2)|h|^2 sin^2", problem.label,
                                        bound_worst, 0.0, where_bound))
            report.checks.append(_check("theorem4", f"{method.label} J = |g||h| sin/2", problem.label,
                                        equality_worst, STEP_IDENTITY_TOLERANCE, where_equality))
    return report


def suite_theorem5(seed: int, steps: int = 15) -> SuiteReport:
    report = SuiteReport(suite="theorem5")
    rng = make_rng(seed, stream=17)
    models = [DiagonalProblem.from_spectrum(make_geometric_spectrum(8, 1.0, 0.1), rng=rng),
              random_diagonal_model(10, rng, smallest=0.05)]
    for model in models:
        lipschitz = model.spectrum.largest
        mu = float(model.spectrum.eigenvalues[-1])
        floor = 1e-14 * model.initial_distance ** 2
        for method in _mme_family():
            record = run(model.problem, model.q0, method.model_copy(update={"max_iterations": steps}))
            distances = [row.distance_to_solution for row in record.per_step if row.stop is None]
            distances.append(record.final_distance)
            worst, where = 0.0, None
            for row, before, after in zip(record.per_step, distances, distances[1:]):
                factor = max(1.0 - mu / (lipschitz * row.sin2_phi), 0.0)
                excess = after ** 2 - factor * before ** 2 * (1.0 + 1e-10) - floor
                if excess > worst:
                    worst, where = excess, row.k
            report.checks.append(_check("theorem5", f"{method.label} contraction", model.problem.label,
                                        worst, 0.0, where, f"mu = {mu:.3g}, L = {lipschitz:.3g}"))
    return report


def suite_theorem6(seed: int, cases: Sequence[Tuple[int, float]] = ((1, 0.5), (2, 0.5), (3, 0.9))
                   ) -> SuiteReport:
    report = SuiteReport(suite="theorem6")
    spectrum = make_helmholtz_spectrum(1.0, 200)
    for N, epsilon in cases:
        label = f"{spectrum.label} N={N} eps={epsilon}"
        certificate = adversarial_initial_point(spectrum, N, epsilon)
        report.checks.append(_check("theorem6", "psi_min exceeds epsilon", label,
                                    max(epsilon - certificate.psi_min, 0.0) if certificate.certified else 1.0,
                                    0.0, detail=f"M = {certificate.M}, psi_min = {certificate.psi_min:.6g}"))
        xi_norm = float(np.linalg.norm(certificate.xi))
        report.checks.append(_check("theorem6", "|xi| = 1", label, abs(xi_norm - 1.0), 1e-12))
        model = DiagonalProblem(spectrum=spectrum, xi=np.asarray(certificate.xi))
        record = run(model.problem, model.q0, MethodConfig.mme(None, max_iterations=N))
        reached = record.final_distance ** 2
        report.checks.append(_check("theorem6", f"MME(inf) after {N} steps stays above epsilon", label,
                                    max(epsilon - 1e-8 - reached, 0.0), 0.0,
                                    record.final_index, f"|q_N - q*|^2 = {reached:.6g}"))
    return report


def suite_theorem3(seed: int, steps: int = 20) -> SuiteReport:
    report = SuiteReport(suite="theorem3")
    rng = make_rng(seed, stream=18)
    spectra = [make_helmholtz_spectrum(1.0, 20), make_heat_spectrum(0.1, 20), make_geometric_spectrum(20)]
    for spectrum in spectra:
        model = DiagonalProblem.from_spectrum(spectrum, rng=rng)
        gd = run_gradient_descent_spectral(model, 1.0 / spectrum.largest, steps)
        increase = float(np.max(np.diff(gd), initial=0.0))
        report.checks.append(_check("theorem3", "gradient descent distance nonincreasing",
                                    model.problem.label, max(increase, 0.0), 0.0))
        record = run(model.problem, model.q0, MethodConfig.mme(None, max_iterations=steps + 1))
        worst, where = 0.0, None
        for row in record.per_step:
            excess = row.distance_to_solution ** 2 - gd[row.k] * (1.0 + 1e-9) - 1e-14
            if excess > worst:
                worst, where = excess, row.k
        report.checks.append(_check("theorem3", "MME(inf) at or below gradient descent",
                                    model.problem.label, worst, 0.0, where))
    return report


SUITES: Dict[str, Callable[[int], SuiteReport]] = {
    "adjoint": suite_adjoint,
    "identity2J": suite_identity2j,
    "lemma1": suite_lemma1,
    "telescoping": suite_telescoping,
    "theorem1": suite_theorem1,
    "theorem3": suite_theorem3,
    "theorem4": suite_theorem4,
    "theorem5": suite_theorem5,
    "theorem6": suite_theorem6,
}


def run_suite(name: str, seed: Optional[int] = None) -> SuiteReport:
    """Run one named suite; `all` is handled by the caller."""
    if name not in SUITES:
        raise KeyError(f"unknown suite '{name}' (choose from {', '.join(SUITES)})")
    seed = config.SEED if seed is None else seed
    logger.info(f"Running verification suite {name} (seed {seed})")
    report = SUITES[name](seed)
    logger.info(f"Suite {name}: {len(report.checks) - len(report.failures)}/{len(report.checks)} checks passed")
    return report
