# src/mmebench/utils/config_file.py
"""
Reader for experiment files: `key = value` lines under `[experiment]`,
`[problem]` and `[method.<id>]` headers. `#` and `;` start comments.

    [experiment]
    name = table1
    budget = 100

    [problem]
    type = helmholtz
    kappa = 1.0

    [method.mme1]
    kind = mme
    m = 1

Every error is reported against the line it came from.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from pydantic import ValidationError

from ..exceptions import ConfigFileError
from ..models import ExperimentConfig, MethodConfig, ProblemSelector
from ..services.problem_factory import PROBLEM_PARAMETERS

logger = logging.getLogger(__name__)

EXPERIMENT_KEYS = {"name", "budget", "output_dir", "seed", "export_fields", "workers"}
METHOD_KEYS = set(MethodConfig.model_fields) - {"name"} | {"label"}


def parse_value(text: str) -> Any:
    """bool, int, float or None where the text reads as one; the stripped text otherwise."""
    value = text.strip()
    lowered = value.lower()
    if lowered in ("true", "yes", "on"):
        return True
    if lowered in ("false", "no", "off"):
        return False
    if lowered in ("none", "null", ""):
        return None
    if lowered.lstrip("+-") in ("inf", "infinity", "nan"):
        return value
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
        return value[1:-1]
    return value


class ExperimentFileParser:
    """Parses one experiment file and remembers where each value was set."""

    def __init__(self, path: str):
        self.path = Path(path)
        self.experiment: Dict[str, Any] = {}
        self.problem: Dict[str, Any] = {}
        self.methods: List[Dict[str, Any]] = []
        self._lines: Dict[Tuple, int] = {}

    def _error(self, message: str, line: Optional[int]) -> ConfigFileError:
        return ConfigFileError(message, line=line, path=str(self.path))

    def _read_lines(self) -> List[str]:
        try:
            return self.path.read_text(encoding="utf-8").splitlines()
        except OSError as e:
            raise self._error(f"cannot read experiment file: {e.strerror or e}", None) from e

    def parse(self) -> "ExperimentFileParser":
        section: Optional[Tuple] = None
        method_ids = set()

        for number, raw in enumerate(self._read_lines(), start=1):
            line = raw.split("#", 1)[0].split(";", 1)[0].strip()
            if not line:
                continue

            if line.startswith("["):
                if not line.endswith("]"):
                    raise self._error(f"malformed section header '{line}'", number)
                name = line[1:-1].strip()
                if name in ("experiment", "problem"):
                    section = (name,)
                elif name.startswith("method.") and len(name) > len("method."):
                    method_id = name[len("method."):]
                    if method_id in method_ids:
                        raise self._error(f"duplicate section [{name}]", number)
                    method_ids.add(method_id)
                    self.methods.append({})
                    section = ("methods", len(self.methods) - 1)
                    self._lines[section] = number
                else:
                    raise self._error(f"unknown section [{name}] (experiment | problem | method.<id>)", number)
                continue

            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep or not key:
                raise self._error(f"expected 'key = value', got '{line}'", number)
            if section is None:
                raise self._error(f"'{key}' appears before any section header", number)
            self._assign(section, key, parse_value(value), number)

        if "type" not in self.problem:
            raise self._error("missing [problem] section with a 'type' entry", None)
        return self

    def _assign(self, section: Tuple, key: str, value: Any, number: int) -> None:
        if section[0] == "experiment":
            if key not in EXPERIMENT_KEYS:
                raise self._error(f"unknown experiment key '{key}'", number)
            target = self.experiment
        elif section[0] == "problem":
            target = self.problem
        else:
            if key not in METHOD_KEYS:
                raise self._error(f"unknown method key '{key}'", number)
            target = self.methods[section[1]]
            key = "name" if key == "label" else key

        if key in target:
            raise self._error(f"'{key}' set twice in this section", number)
        target[key] = value
        self._lines[section + (key,)] = number

    def line_of(self, loc: Tuple) -> Optional[int]:
        """Best line for a pydantic error location."""
        if loc and loc[0] == "methods" and len(loc) >= 2:
            method = ("methods", loc[1])
            if len(loc) >= 3 and method + (loc[2],) in self._lines:
                return self._lines[method + (loc[2],)]
            return self._lines.get(method)
        if loc and loc[0] == "problem":
            return self._lines.get(("problem", "type"))
        if loc and loc[0] == "problem_params" and len(loc) >= 2:
            return self._lines.get(("problem", loc[1]))
        if loc:
            return self._lines.get(("experiment", loc[0]))
        return None

    def build(self, overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
        """
        Validate into an ExperimentConfig.

        Args:
            overrides: Experiment-level values from the command line (output_dir,
                seed, budget); None entries are ignored.
        """
        params = {k: v for k, v in self.problem.items() if k != "type" and v is not None}
        type_line = self._lines.get(("problem", "type"))
        try:
            selector = ProblemSelector(str(self.problem["type"]))
        except ValueError:
            choices = " | ".join(s.value for s in ProblemSelector)
            raise self._error(f"unknown problem type '{self.problem['type']}' ({choices})", type_line)
        for key in params:
            if key not in PROBLEM_PARAMETERS[selector]:
                raise self._error(f"unknown parameter '{key}' for problem {selector.value}",
                                  self._lines[("problem", key)])

        fields = {k: v for k, v in self.experiment.items() if v is not None}
        fields.update({k: v for k, v in (overrides or {}).items() if v is not None})
        try:
            experiment = ExperimentConfig(problem=selector, problem_params=params, methods=self.methods,
                                          **fields)
        except ValidationError as e:
            first = e.errors()[0]
            where = ".".join(str(part) for part in first["loc"])
            message = f"{where}: {first['msg']}" if where else first["msg"]
            raise self._error(message, self.line_of(tuple(first["loc"]))) from e
        logger.info(f"Loaded experiment '{experiment.name}' from {self.path} "
                    f"({len(experiment.methods)} methods)")
        return experiment


def load_experiment(path: str, overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """Parse and validate an experiment file."""
    return ExperimentFileParser(path).parse().build(overrides)
