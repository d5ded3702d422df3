"""
Shared fixtures for the MPCA test suite
"""

import io
import json
import sys
from pathlib import Path

import numpy as np
import pytest

# Add the project root to Python path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from app.cli.main import run
from app.models.sat import CnfFormula
from app.models.schemas import MpcaInstance, RateModel


def make_instance(gains, rates, rate_model=RateModel.LOG_SNR, channel_groups=None) -> MpcaInstance:
    gains = np.asarray(gains, dtype=np.float64)
    return MpcaInstance(
        num_users=gains.shape[0],
        num_channels=gains.shape[1],
        gains=gains,
        rate_targets=rates,
        rate_model=rate_model,
        channel_groups=channel_groups,
    )


@pytest.fixture
def instance_factory():
    return make_instance


@pytest.fixture
def uniform_2x3():
    return make_instance(np.ones((2, 3)), [1.0, 1.0])


@pytest.fixture
def sat_cnf():
    return CnfFormula(num_vars=1, clauses=((1, 1, -1),))


@pytest.fixture
def unsat_cnf():
    return CnfFormula(num_vars=1, clauses=((1, 1, 1), (-1, -1, -1)))


class CliResult:
    def __init__(self, code: int, stdout: str):
        self.code = code
        self.stdout = stdout

    def json(self):
        return json.loads(self.stdout)


@pytest.fixture
def cli():
    """Run the CLI in-process and capture what it writes to stdout"""

    def invoke(*argv) -> CliResult:
        out = io.StringIO()
        code = run([str(arg) for arg in argv], out=out)
        return CliResult(code, out.getvalue())

    return invoke
