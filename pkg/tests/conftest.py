import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_hermitian(rng, n):
    G = random_complex(rng, n, n)
    return 0.5 * (G + G.conj().T)


def random_hpd(rng, n, spread=(0.5, 2.0)):
    Q, _ = np.linalg.qr(random_complex(rng, n, n))
    w = rng.uniform(spread[0], spread[1], size=n)
    H = (Q * w) @ Q.conj().T
    return 0.5 * (H + H.conj().T)
