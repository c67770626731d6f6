"""Shared fixtures: the two expensive full-size solves are computed once
per session and reused by the solver and acceptance tests."""

import pytest

from beltrami_lab.dilatation import MuSpec, truncate_mu
from beltrami_lab.solver import solve_principal


@pytest.fixture(scope="session")
def const_mu_solve_512():
    return solve_principal(MuSpec.constant(0.3))


@pytest.fixture(scope="session")
def example3_k10_solve_512():
    return solve_principal(truncate_mu(MuSpec.example3(0.5), 10.0))
