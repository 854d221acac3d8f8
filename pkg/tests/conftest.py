from __future__ import annotations

import numpy as np
import pytest
import torch

from posneg_tse.scenes import Corpus, build_synthetic_corpus

torch.set_num_threads(1)


@pytest.fixture(scope="session")
def corpus(tmp_path_factory) -> Corpus:
    root = tmp_path_factory.mktemp("corpus")
    return build_synthetic_corpus(root, utterance_s=3.0, noise_s=12.0)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(0)
