import hypothesis
import pytest

from sgop.inner import P3, RHO, RHO_L2, RHO_SIXFOLD, gram
from sgop.jets import compute_jet_sequences
from sgop.numeric import FLOAT, PrecisionConfig
from sgop.ortho import gram_schmidt, with_recursion

hypothesis.settings.register_profile("default", max_examples=30, deadline=None)
hypothesis.settings.load_profile("default")

F512 = PrecisionConfig(FLOAT, 512)


@pytest.fixture(scope="session")
def jt_exact():
    return compute_jet_sequences(41)


@pytest.fixture(scope="session")
def jt_float():
    return compute_jet_sequences(102, F512)


@pytest.fixture(scope="session")
def a3_exact(jt_exact):
    G = gram(P3, 12, jt_exact)
    return G, with_recursion(gram_schmidt(P3, 12, G), G, jt_exact)


@pytest.fixture(scope="session")
def sym_exact(jt_exact):
    G = gram(RHO, 12, jt_exact, RHO_L2)
    return G, with_recursion(gram_schmidt(RHO, 12, G), G, jt_exact)


@pytest.fixture(scope="session")
def sym_sixfold_exact(jt_exact):
    G = gram(RHO, 12, jt_exact, RHO_SIXFOLD)
    return G, gram_schmidt(RHO, 12, G)


@pytest.fixture(scope="session")
def a3_float50(jt_float):
    G = gram(P3, 50, jt_float)
    return G, with_recursion(gram_schmidt(P3, 50, G), G, jt_float)
