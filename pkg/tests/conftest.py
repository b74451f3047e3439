import pathlib

import numpy as np
import pytest

from conparse.config import ModelConfig
from conparse.trees import default_head_table

DATA_DIR = pathlib.Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> pathlib.Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def heads():
    return default_head_table()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


def tiny_model_config(variant: str = "binary-span", **kw) -> ModelConfig:
    """Small dimensions so forward passes and FD checks stay cheap."""
    defaults = dict(
        variant=variant,
        word_dim=8,
        pos_dim=4,
        char_dim=5,
        char_hidden=4,
        hidden=6,
        layers=2,
        tree_hidden=6,
        label_dim=5,
        label_hidden=6,
        out_hidden=7,
        proj_dim=7,
        dropout=0.0,
    )
    defaults.update(kw)
    return ModelConfig(**defaults)
