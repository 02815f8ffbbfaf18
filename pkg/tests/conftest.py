import pytest

from semigroup_gka.backends import build_backend

# (protocol, preset) pairs whose capabilities match
COMPATIBLE = [
    ("gsap1", "toy-23"), ("gsap1", "toy-209"), ("gsap1", "epm-toy"), ("gsap1", "epm-desk"),
    ("gsap2", "toy-23"), ("gsap2", "toy-209"), ("gsap2", "epm-toy"), ("gsap2", "epm-desk"),
    ("gsap3", "toy-23"), ("gsap3", "toy-209"),
    ("gsap3p", "toy-23"), ("gsap3p", "epm-toy"), ("gsap3p", "epm-desk"),
    ("gsap4", "toy-23"), ("gsap4", "toy-209"), ("gsap4", "epm-toy"), ("gsap4", "epm-desk"),
]

_cache = {}


def preset(name):
    """Backends are immutable, so one instance per preset is shared by all tests."""
    if name not in _cache:
        _cache[name] = build_backend({"preset": name})
    return _cache[name]


@pytest.fixture(scope="session")
def toy():
    """p=23, q=11, s=4"""
    return preset("toy-23")


@pytest.fixture(scope="session")
def desk():
    return preset("desk-64")


@pytest.fixture(scope="session")
def rsa():
    """Dealer view of m = 11 * 19, s = 2"""
    return preset("toy-209")


@pytest.fixture(scope="session")
def epm_toy():
    return preset("epm-toy")


@pytest.fixture(scope="session")
def epm_desk():
    return preset("epm-desk")


@pytest.fixture
def g(toy):
    """Exponent helper on the toy backend: g(2, 3, 5) -> [G(2), G(3), G(5)]."""
    def make(*values):
        elements = [toy.g_from_int(v) for v in values]
        return elements[0] if len(elements) == 1 else elements
    return make


@pytest.fixture
def s(toy):
    return toy.s_from_int
