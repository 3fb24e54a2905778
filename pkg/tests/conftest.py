"""Shared fixtures: packaged registry handles and a random model builder."""

import random

import pytest

import infercost as ic


@pytest.fixture(scope="session")
def registry():
    return ic.default_registry()


@pytest.fixture(scope="session")
def gaudi2(registry):
    return registry.device("gaudi2")


@pytest.fixture(scope="session")
def h100(registry):
    return registry.device("h100")


@pytest.fixture(scope="session")
def h200(registry):
    return registry.device("h200")


@pytest.fixture(scope="session")
def llama8b(registry):
    return registry.model("llama31-8b")


@pytest.fixture(scope="session")
def llama70b(registry):
    return registry.model("llama33-70b")


def random_model(rng: random.Random, index: int = 0) -> ic.ModelConfig:
    """Small config satisfying every divisibility constraint."""
    head_size = rng.choice((1, 2, 4, 8))
    group = rng.randint(1, 4)
    heads = group * rng.randint(1, 4)
    hidden = heads * head_size
    # the intermediate width a*h must land on an integer
    halves = [n for n in range(1, 9) if (n * hidden) % 2 == 0]
    return ic.ModelConfig(
        name=f"random-{index}",
        layers=rng.randint(1, 4),
        hidden=hidden,
        intermediate_ratio=rng.choice(halves) / 2,
        head_size=head_size,
        gqa_group=group,
        vocab=rng.randint(1, 64),
    )


@pytest.fixture(scope="session")
def make_random_model():
    return random_model
