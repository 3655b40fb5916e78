import time

import numpy as np
import pytest

SESSION_T0 = time.monotonic()


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Touch every jitted kernel once so compilation (or cache loading) does
    not pollute the timed acceptance runs."""
    from feasilab import kernels as k

    A = np.array([[1.0, 1.0]])
    k.simplex_core(A, np.array([1.0]), np.array([-1.0, 0.0]), 1e-9, 100)
    k.nnls_core(np.eye(2), np.array([1.0, -1.0]), 1e-10, 100)
    k.simplex_project_core(np.array([0.3, 0.9]))
    M = np.array([[0.0, 1.0], [0.0, 1.0]])
    k.motzkin_core(M, 1, np.array([1.0, 0.0]), 1e-10, 1000)
    cb = np.array([0, 0, -1], dtype=np.int64)
    M2 = np.array([[0.0, 1.0, 1.0], [0.0, 0.0, 1.0]])
    k.segmented_qp_core(M2, cb, 1, np.array([2.0, 0.5]), 1e-10, 1000)
    k.halfspace_dykstra_core(np.eye(2), np.zeros(2), np.ones(2), 1e-10, 100)
    k.balls_rows_dykstra_core(np.zeros((1, 2)), np.ones(1), np.eye(2),
                              np.ones(2), np.array([2.0, 0.0]), 1e-10, 100)
    yield


@pytest.fixture(scope="session")
def session_start():
    return SESSION_T0
