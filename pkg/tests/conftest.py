"""Shared fixtures: catalog surfaces at the two desk resolutions.

Expensive objects (frames, transform jets) are built once per session.
"""

import numpy as np
import pytest

import s5surf.bipolar as bipolar_mod
from s5surf import frames, grids, transforms


class Pipeline:
    """Lazily built chain s3 pair -> bipolar surface -> frame -> jets."""

    def __init__(self, n):
        self.n = n
        self.s3 = grids.lawson_torus(2, 1, n)
        f = bipolar_mod.bipolar(self.s3)
        self.surface, self.mu = grids.adapt_coordinate(f)
        self.frame = frames.build_frame(self.surface)
        self._jets = {}

    @property
    def grid(self):
        return self.frame.grid

    @property
    def h(self):
        return self.grid.h

    def jet(self, eps):
        if eps not in self._jets:
            self._jets[eps] = transforms.epsilon_jet(self.frame, eps)
        return self._jets[eps]


@pytest.fixture(scope="session")
def pipe32():
    return Pipeline(33)


@pytest.fixture(scope="session")
def pipe64():
    return Pipeline(65)


@pytest.fixture(scope="session")
def pipe128():
    return Pipeline(129)


@pytest.fixture(scope="session")
def clifford64():
    return grids.clifford_torus(64)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260823)
