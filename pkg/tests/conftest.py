from __future__ import annotations

import numpy as np
import pytest

from happymetrics.data_model import DesignMatrix


@pytest.fixture(scope="session")
def eight_point_design() -> DesignMatrix:
    """Small fixed dataset with visible curvature, used by diagnostic oracles."""
    x1 = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0])
    x2 = np.array([2.0, 1.0, 4.0, 3.0, 7.0, 5.0, 8.0, 6.0])
    y = np.array([2.1, 2.9, 4.4, 4.0, 7.2, 6.1, 9.3, 7.5])
    return DesignMatrix(
        names=("constant", "x1", "x2"),
        X=np.column_stack([np.ones(8), x1, x2]),
        y=y,
        provenance=("constant", "continuous:x1", "continuous:x2"),
    )


def random_design(rng: np.random.Generator, n: int, k: int) -> DesignMatrix:
    """Well-conditioned random design with a constant column."""
    X = np.column_stack([np.ones(n), rng.normal(size=(n, k - 1))])
    y = rng.normal(size=n)
    names = ("constant",) + tuple(f"x{j}" for j in range(1, k))
    prov = ("constant",) + tuple(f"continuous:x{j}" for j in range(1, k))
    return DesignMatrix(names=names, X=X, y=y, provenance=prov)
