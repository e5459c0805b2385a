# tests/test_services/test_config_file.py

import os

import pytest

from src.mmebench.exceptions import ConfigFileError
from src.mmebench.models import MethodKind, ProblemSelector
from src.mmebench.utils.config_file import load_experiment, parse_value

CONFIG_DIR = os.path.join(os.path.dirname(__file__), "..", "..", "configs")

VALID = """\
# comment line
[experiment]
name = table1
budget = 100 ; trailing comment
seed = 3

[problem]
type = helmholtz
kappa = 1.0
n_modes = 200

[method.mme1]
kind = mme
m = 1

[method.mme_inf]
kind = mme
m = inf
label = unbounded

[method.cg]
kind = cg_fr
"""


def _write(tmp_path, text):
    path = tmp_path / "experiment.cfg"
    path.write_text(text, encoding="utf-8")
    return str(path)


@pytest.mark.parametrize("text, expected", [
    ("true", True), ("Off", False), ("none", None), ("", None), ("12", 12), ("1e-3", 1e-3),
    ("'quoted'", "quoted"), ("helmholtz", "helmholtz"), ("inf", "inf"),
])
def test_parse_value(text, expected):
    """Scalars are typed; everything else stays text."""
    assert parse_value(text) == expected


def test_load_valid_experiment(tmp_path):
    """Sections map onto the experiment, problem and ordered methods."""
    experiment = load_experiment(_write(tmp_path, VALID))
    assert experiment.name == "table1"
    assert experiment.budget == 100
    assert experiment.seed == 3
    assert experiment.problem == ProblemSelector.HELMHOLTZ
    assert experiment.problem_params == {"kappa": 1.0, "n_modes": 200}
    assert [m.kind for m in experiment.methods] == [MethodKind.MOMENT_MINIMAL_ERROR,
                                                    MethodKind.MOMENT_MINIMAL_ERROR, MethodKind.CG_FR]
    assert experiment.methods[1].m is None
    assert experiment.methods[1].label == "unbounded"


def test_overrides_win(tmp_path):
    """Command-line values replace file values; None is ignored."""
    experiment = load_experiment(_write(tmp_path, VALID), overrides={"seed": 9, "budget": None,
                                                                     "output_dir": str(tmp_path)})
    assert experiment.seed == 9
    assert experiment.budget == 100
    assert experiment.output_dir == str(tmp_path)


@pytest.mark.parametrize("text, line, fragment", [
    ("[problem]\ntype = helmholtz\n[method.a]\nkind = mme\n[method.a]\nkind = mme\n", 5, "duplicate section"),
    ("[experiment]\ncolour = red\n[problem]\ntype = helmholtz\n", 2, "unknown experiment key"),
    ("[problem]\ntype = helmholtz\nkappa_max = 0.4\n", 3, "unknown parameter"),
    ("[problem]\ntype = sphere\n", 2, "unknown problem type"),
    ("name = x\n[problem]\ntype = helmholtz\n", 1, "before any section"),
    ("[problem]\ntype = helmholtz\njust words\n", 3, "key = value"),
    ("[problem]\ntype = helmholtz\n[method.a]\nkind = mme\nm = 0\n", 5, "m"),
    ("[problem]\ntype = helmholtz\n[method.a]\nkind = newton\n", 4, "kind"),
    ("[nonsense]\n", 1, "unknown section"),
    ("[problem]\ntype = heat1d\nh = 0.1\nh = 0.2\n", 4, "set twice"),
])
def test_errors_carry_line_numbers(tmp_path, text, line, fragment):
    """Every rejected entry is reported against its line."""
    with pytest.raises(ConfigFileError) as excinfo:
        load_experiment(_write(tmp_path, text))
    assert excinfo.value.line == line
    assert fragment in excinfo.value.reason


def test_missing_problem_section(tmp_path):
    """A file without a problem type is refused."""
    with pytest.raises(ConfigFileError) as excinfo:
        load_experiment(_write(tmp_path, "[experiment]\nname = x\n"))
    assert excinfo.value.line is None


def test_missing_file(tmp_path):
    """Unreadable paths are a configuration error."""
    with pytest.raises(ConfigFileError):
        load_experiment(str(tmp_path / "absent.cfg"))


@pytest.mark.parametrize("name", ["adversarial", "diagonal", "heat3d", "heat3d_kappa06", "helmholtz",
                                  "thermoacoustic"])
def test_shipped_configs_load(name):
    """The experiment files in configs/ validate."""
    experiment = load_experiment(os.path.join(CONFIG_DIR, f"{name}.cfg"))
    assert experiment.problem.value in ("adversarial", "diagonal", "heat3d", "helmholtz", "thermoacoustic")
