# src/mmebench/services/orchestrator.py

import logging
import os
import re
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from ..models import AdversarialCertificate, ExperimentConfig, MethodConfig, MethodKind, RunRecord
from ..optimizers.runner import run
from ..problems.export import export_field, export_slice_csv
from .problem_factory import BuiltProblem, build_problem

logger = logging.getLogger(__name__)

HISTORY_COLUMNS = ["k", "J", "grad_norm", "alpha", "sin2_phi", "step_norm", "dist_to_qstar",
                   "dist_euclidean", "degenerate", "restart", "stop"]
SUMMARY_COLUMNS = ["method", "steps", "final_J", "final_distance", "final_distance_euclidean", "stop"]


def default_methods(budget: Optional[int] = None) -> List[MethodConfig]:
    """The comparison set used when an experiment lists no methods."""
    methods = [MethodConfig.mme(m) for m in (1, 2, 5, None)]
    methods += [MethodConfig(kind=kind) for kind in (
        MethodKind.MINIMAL_ERROR, MethodKind.POLYAK, MethodKind.GRADIENT_DESCENT_FIXED,
        MethodKind.HEAVY_BALL_ADAPTIVE, MethodKind.CG_FR, MethodKind.CG_PR, MethodKind.CG_ORTHO,
        MethodKind.SIMILAR_TRIANGLES)]
    if budget is not None:
        methods = [m.model_copy(update={"max_iterations": budget}) for m in methods]
    return methods


def sanitize_label(label: str) -> str:
    """File-system safe version of a method label: MME(inf) -> MME_inf."""
    return re.sub(r"[^A-Za-z0-9.-]+", "_", label).strip("_") or "method"


def history_frame(record: RunRecord) -> pd.DataFrame:
    """
    Per-iteration table of a run. Row k describes q_k; a terminal row for
    q_final is appended when the run ended without a stop row for it.
    """
    rows = [{
        "k": d.k, "J": d.functional, "grad_norm": d.grad_norm, "alpha": d.alpha,
        "sin2_phi": d.sin2_phi, "step_norm": d.step_norm, "dist_to_qstar": d.distance_to_solution,
        "dist_euclidean": d.distance_euclidean, "degenerate": d.degenerate, "restart": d.restart,
        "stop": d.stop.value if d.stop is not None else "",
    } for d in record.per_step]

    if not rows or rows[-1]["k"] != record.final_index:
        rows.append({
            "k": record.final_index, "J": record.final_functional, "grad_norm": record.final_grad_norm,
            "alpha": None, "sin2_phi": None, "step_norm": None, "dist_to_qstar": record.final_distance,
            "dist_euclidean": record.final_distance_euclidean, "degenerate": False, "restart": False,
            "stop": record.stop_reason.value,
        })
    return pd.DataFrame(rows, columns=HISTORY_COLUMNS)


def summary_frame(histories: Dict[str, pd.DataFrame]) -> pd.DataFrame:
    """One row per method, read off the last row of its history."""
    rows = []
    for label, frame in histories.items():
        last = frame.iloc[-1]
        rows.append({"method": label, "steps": int(last["k"]), "final_J": last["J"],
                     "final_distance": last["dist_to_qstar"],
                     "final_distance_euclidean": last["dist_euclidean"], "stop": last["stop"]})
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def certificate_frame(certificate: AdversarialCertificate,
                      eigenvalues: Optional[np.ndarray] = None) -> pd.DataFrame:
    """Mode-by-mode coefficients of the adversarial q0."""
    frame = pd.DataFrame({"n": np.arange(1, len(certificate.xi) + 1), "xi": certificate.xi})
    if eigenvalues is not None:
        frame.insert(1, "lambda", np.asarray(eigenvalues)[:len(certificate.xi)])
    return frame


def write_table(frame: pd.DataFrame, path: str) -> str:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    frame.to_csv(path, index=False, na_rep="")
    return path


class ExperimentOrchestrator:
    """
    Runs every configured method on one shared problem and starting point and
    writes the per-method histories and the summary tables.
    """

    def __init__(self, experiment: ExperimentConfig):
        """
        Initialize the orchestrator for one experiment.

        Args:
            experiment (ExperimentConfig): Problem, methods, budget, output directory and seed.
        """
        self.experiment = experiment
        self.methods = experiment.methods or default_methods(experiment.budget)
        self.built: Optional[BuiltProblem] = None
        logger.info(f"Orchestrator initialized for '{experiment.name}' with {len(self.methods)} methods "
                    f"on {experiment.problem.value}")

    def prepare(self) -> BuiltProblem:
        """Build the problem once; every method starts from the same q0."""
        if self.built is None:
            self.built = build_problem(self.experiment.problem, self.experiment.problem_params,
                                       seed=self.experiment.seed)
            if self.built.problem.exact_solution is not None and self.built.problem.noiseless:
                self.built.problem.validate_exact_solution()
        return self.built

    def run_methods(self) -> List[RunRecord]:
        """Run all methods; results come back in configuration order."""
        built = self.prepare()
        workers = min(self.experiment.workers, len(self.methods))
        if workers > 1:
            logger.info(f"Running {len(self.methods)} methods on {workers} threads")
            with ThreadPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(lambda method: run(built.problem, built.q0, method), self.methods))
        return [run(built.problem, built.q0, method) for method in self.methods]

    def write_outputs(self, records: List[RunRecord]) -> Dict[str, Any]:
        """Single collector for every output file of the experiment."""
        out = self.experiment.output_dir
        os.makedirs(out, exist_ok=True)
        files: List[str] = []
        histories: Dict[str, pd.DataFrame] = {}
        used_names = set()

        for record in records:
            name = sanitize_label(record.label)
            if name in used_names:
                name = f"{name}_{len(used_names)}"
            used_names.add(name)
            frame = history_frame(record)
            histories[record.label] = frame
            files.append(write_table(frame, os.path.join(out, f"{name}.csv")))

        summary = summary_frame(histories)
        files.append(write_table(summary, os.path.join(out, "summary.csv")))
        summary_txt = os.path.join(out, "summary.txt")
        with open(summary_txt, "w", encoding="utf-8") as handle:
            handle.write(f"# {self.experiment.name}: {self.built.description}\n")
            handle.write(summary.to_string(index=False, na_rep="-"))
            handle.write("\n")
        files.append(summary_txt)

        if self.built.certificate is not None:
            eigenvalues = self.built.spectrum.eigenvalues if self.built.spectrum is not None else None
            files.append(write_table(certificate_frame(self.built.certificate, eigenvalues),
                                     os.path.join(out, "q0_coefficients.csv")))

        if self.experiment.export_fields:
            files.extend(self._export_fields(records))

        logger.info(f"Wrote {len(files)} files to {out}")
        return {"files": files, "summary": summary, "histories": histories}

    def _export_fields(self, records: List[RunRecord]) -> List[str]:
        out = os.path.join(self.experiment.output_dir, "fields")
        problem = self.built.problem
        fields = [("q0", self.built.q0)]
        if problem.exact_solution is not None:
            fields.append(("qstar", problem.exact_solution))
        fields += [(sanitize_label(record.label), record.final_q) for record in records]

        files = []
        for name, vector in fields:
            path = os.path.join(out, f"{name}.f64")
            files.extend([path, export_field(vector, path, label=name)])
            if self.built.coordinates is not None:
                csv_path = os.path.join(out, f"{name}_slice.csv")
                export_slice_csv(vector, csv_path, coordinates=self.built.coordinates)
                files.append(csv_path)
        return files

    def execute(self) -> Dict[str, Any]:
        """
        Build, run and write.

        Returns:
            Dict[str, Any]: `success`, the `summary` frame and the written `files`;
                `error` carries the message when the experiment failed.
        """
        try:
            self.prepare()
            records = self.run_methods()
            outputs = self.write_outputs(records)
            return {"success": True, "records": records, **outputs}
        except Exception as e:
            logger.error(f"Experiment '{self.experiment.name}' failed: {e}", exc_info=True)
            return {"success": False, "error": str(e), "files": [], "records": []}
