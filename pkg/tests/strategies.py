"""Hypothesis strategies for small complex matrices."""

import numpy as np
from hypothesis import strategies as st

dims = st.integers(min_value=1, max_value=5)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def _cgauss(rng, m, n):
    return (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / np.sqrt(2)


@st.composite
def cmatrix(draw, m=None, n=None):
    m = draw(dims) if m is None else m
    n = draw(dims) if n is None else n
    return _cgauss(np.random.default_rng(draw(seeds)), m, n)


@st.composite
def square(draw, n=None):
    n = draw(dims) if n is None else n
    return draw(cmatrix(n, n))


@st.composite
def psd(draw, n=None, rank=None):
    n = draw(dims) if n is None else n
    k = draw(st.integers(1, n)) if rank is None else rank
    X = draw(cmatrix(n, k))
    return X @ X.conj().T


@st.composite
def hpd(draw, n=None):
    S = draw(psd(n, rank=None))
    return S + 0.1 * np.eye(S.shape[0])
