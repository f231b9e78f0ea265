import pytest

from nonfail.analysis import analyze_fixpoint
from nonfail.domain import DepthK, DomainConfig, Signature
from nonfail.pipeline import CORPUS, load_corpus


@pytest.fixture(scope="session")
def corpus():
    return {name: load_corpus(name) for name in CORPUS}


@pytest.fixture(scope="session")
def analyzed(corpus):
    return {name: analyze_fixpoint(p) for name, p in corpus.items()}


@pytest.fixture(scope="session")
def dom(corpus):
    return DepthK(Signature.of(corpus["Prelude"]), DomainConfig())
