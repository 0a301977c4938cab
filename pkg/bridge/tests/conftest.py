import numpy as np
import pytest


@pytest.fixture
def sample_sets_equal():
    def check(x, y) -> bool:
        if x.total_reads != y.total_reads or len(x.samples) != len(y.samples):
            return False
        return all(
            (a.bits == b.bits).all()
            and a.energy == b.energy
            and a.occurrences == b.occurrences
            for a, b in zip(x.samples, y.samples)
        )

    return check


@pytest.fixture
def rank_one_instance():
    def build(n: int = 6, key: int = 5):
        from spinbeam import build_qubo_from_gram

        rng = np.random.Generator(np.random.Philox(key=key))
        v = rng.normal(size=n) + 1j * rng.normal(size=n)
        return build_qubo_from_gram(np.real(np.outer(v, np.conj(v))))

    return build
