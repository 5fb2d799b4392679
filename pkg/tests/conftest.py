from pathlib import Path

import pytest

from grail.semantics import load_model
from grail.syntax import load_theory

DATA = Path(__file__).resolve().parent.parent / "src" / "grail" / "data"


def theory_file(name):
    return DATA / "theories" / name


def model_file(name):
    return DATA / "models" / name


def derivation_file(name):
    return DATA / "derivations" / name


@pytest.fixture(scope="session")
def theories():
    return {p.name: load_theory(p) for p in sorted((DATA / "theories").glob("*.glt"))}


@pytest.fixture(scope="session")
def qs0(theories):
    return theories["qs0.glt"]


@pytest.fixture(scope="session")
def hausdorff_model(theories):
    return load_model(model_file("qs0_hausdorff.glm"), theories["qs0.glt"])


@pytest.fixture(scope="session")
def w1_model(theories):
    return load_model(model_file("iba_w1.glm"), theories["iba_p1.glt"])


@pytest.fixture(scope="session")
def tv_model(theories):
    return load_model(model_file("ba_tv.glm"), theories["ba.glt"])


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
