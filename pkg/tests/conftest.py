from pathlib import Path

import pytest

from sitefactors import fit_factor_model, load_table, standardize

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixture_path() -> Path:
    return FIXTURES / "small4x6.csv"


@pytest.fixture(scope="session")
def table(fixture_path):
    return load_table(fixture_path)


@pytest.fixture(scope="session")
def matrix(table):
    return standardize(table)


@pytest.fixture(scope="session")
def model(matrix):
    return fit_factor_model(matrix)
