import os
import random
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from aspekto import taxonomy
from aspekto.labels import LabelVector
from aspekto.rules import default_rules

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


@pytest.fixture(scope="session")
def rule_config():
    return default_rules()


@pytest.fixture(scope="session")
def synthetic_corpus():
    from aspekto.corpus import load_corpus, synthetic_corpus_path

    corpus, errors = load_corpus(synthetic_corpus_path(), mode="strict")
    assert not errors
    return corpus


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name)


def random_vector(rng: random.Random, density: float = 0.35) -> LabelVector:
    slugs = [s for s in taxonomy.ALL_SLUGS if rng.random() < density]
    return LabelVector.from_slugs(slugs, strict=False)


def random_consistent_vector(rng: random.Random, density: float = 0.35) -> LabelVector:
    specifics = [s for s in taxonomy.SPECIFIC_SLUGS if rng.random() < density]
    slugs = set(specifics)
    for s in specifics:
        slugs.add(taxonomy.parent_slug(s))
    return LabelVector.from_slugs(slugs, strict=True)
