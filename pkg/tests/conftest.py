import random
from pathlib import Path

import pytest

from fintopo.finspace import FiniteSpace
from fintopo.mapcalc import FiniteMap

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS


def random_space(rng: random.Random, n: int) -> FiniteSpace:
    pairs = [
        (i, j) for i in range(n) for j in range(n) if i != j and rng.random() < 0.35
    ]
    return FiniteSpace.from_le_pairs(n, pairs, close=True)


def random_map(rng: random.Random, dom: FiniteSpace, cod: FiniteSpace) -> FiniteMap:
    return FiniteMap(dom, cod, tuple(rng.randrange(cod.n) for _ in range(dom.n)))
