"""Shared fixtures."""
import json

import pytest

from polarmax import run
from polarmax.models.domain import Domain
from polarmax.models.options import SolveOptions


@pytest.fixture
def circle():
    return Domain.circle()


@pytest.fixture
def sphere3():
    return Domain.sphere(3)


@pytest.fixture
def fast_opts():
    """Short annealing schedule for unit-scale solves."""
    return SolveOptions(restarts=3, iterations=15, stages=6)


@pytest.fixture
def cli(capsys):
    """Run the CLI in-process: returns (exit code, parsed stdout envelope or None, stderr)."""

    def invoke(*argv):
        code = run([str(a) for a in argv])
        captured = capsys.readouterr()
        out = captured.out.strip()
        return code, (json.loads(out) if out else None), captured.err

    return invoke
