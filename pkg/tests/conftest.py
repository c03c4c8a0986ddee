import numpy as np
import pytest

from ehtlab.sequences import (
    TrigPolynomial,
    from_values,
    named_sequence,
    transform_sequence,
    trig_poly_sequence,
)


def _random_tabulated(seed: int, n: int = 4200):
    rng = np.random.default_rng(seed)
    vals = rng.uniform(-1, 1, 2 * n + 1) + 1j * rng.uniform(-1, 1, 2 * n + 1)
    return from_values(vals, label=f"random[{seed}]")


def corpus():
    """Bounded sequences exercised by the grid-identity and spectrum tests."""
    tp = trig_poly_sequence(TrigPolynomial((
        (1.0, complex(np.exp(2j * np.pi * 0.3))),
        (2.0, -1.0 + 0j),
    )))
    return [
        named_sequence("hardy_littlewood"),
        named_sequence("cycle_indicator"),
        named_sequence("cycle_indicator", convention="signed"),
        named_sequence("constant", value=1.0),
        named_sequence("constant", value=0.7 - 0.3j),
        tp,
        transform_sequence(named_sequence("hardy_littlewood"), "modulate",
                           lam=complex(np.exp(2j * np.pi * 0.123))),
        transform_sequence(named_sequence("constant", value=1.0), "modulate", lam=-1.0),
        _random_tabulated(42),
    ]


@pytest.fixture(scope="session")
def sequence_corpus():
    return corpus()


@pytest.fixture(scope="session")
def sparse_dyadic():
    return named_sequence("sparse_dyadic")
