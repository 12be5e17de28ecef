import random

import pytest

from icon_engine.notebook import Cell, Notebook, Pose, Window
from icon_engine.session import Session


@pytest.fixture
def small_notebook():
    return Notebook(id="nb", windows=[
        Window(id="w1", cells=[
            Cell(id="data", source='df = load_dataset("wine")'),
            Cell(id="empty", source=""),
        ], pose=Pose(z=2.0)),
        Window(id="w2", cells=[
            Cell(id="vis", source='plt.scatter(df["alcohol"], df["hue"])'),
            Cell(id="code", source="# just a comment"),
        ], pose=Pose(x=1.0, z=1.0)),
    ])


@pytest.fixture
def session(small_notebook):
    return Session(small_notebook, mode="unified", dwell_ms=500)


def rng(seed: int) -> random.Random:
    return random.Random(seed)
