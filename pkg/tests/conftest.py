"""
测试公共夹具：q = 3, D = t；q = 3, D = t³ − t；q = 9, D = t
"""

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.algebra.finite_field import get_fq
from src.algebra.global_field import EllElem, ExtensionContext
from src.algebra.ideals import BIdeal
from src.algebra.polynomials import Poly, RatF
from src.arithmetic.subgroups import SubgroupSpec

SEED = 20240917


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=SEED, help="随机化测试的种子")


@pytest.fixture(scope="session")
def fq3():
    return get_fq(3)


@pytest.fixture(scope="session")
def fq9():
    return get_fq(3, 2, [1, 0, 1])


@pytest.fixture(scope="session")
def ext_t(fq3):
    """q = 3, D = t"""
    return ExtensionContext(fq3, Poly.from_ints(fq3, [0, 1]))


@pytest.fixture(scope="session")
def ext_cubic(fq3):
    """q = 3, D = t³ − t"""
    return ExtensionContext(fq3, Poly.from_ints(fq3, [0, -1, 0, 1]))


@pytest.fixture(scope="session")
def ext9(fq9):
    return ExtensionContext(fq9, Poly.from_ints(fq9, [0, 1]))


@pytest.fixture(scope="session")
def gamma_t(ext_t):
    return SubgroupSpec.gamma(ext_t)


@pytest.fixture(scope="session")
def J_omega(ext_t):
    """J = ωB = (√t)"""
    return BIdeal(ext_t, [ext_t.omega])


@pytest.fixture(scope="session")
def congruence_t(J_omega):
    return SubgroupSpec.congruence(J_omega)


@pytest.fixture
def seed(request) -> int:
    return request.config.getoption("--seed")


@pytest.fixture
def rng(seed):
    return random.Random(seed)


def random_poly(rng: random.Random, fq, max_deg: int) -> Poly:
    return Poly(fq, [rng.randrange(fq.q) for _ in range(rng.randint(0, max_deg) + 1)])


def random_ratf(rng: random.Random, fq, max_deg: int = 2) -> RatF:
    den = random_poly(rng, fq, max_deg)
    while den.is_zero():
        den = random_poly(rng, fq, max_deg)
    return RatF(random_poly(rng, fq, max_deg), den)


def random_elem(rng: random.Random, ext: ExtensionContext, max_deg: int = 2, integral: bool = False) -> EllElem:
    if integral:
        return ext.from_polys(random_poly(rng, ext.fq, max_deg), random_poly(rng, ext.fq, max_deg))
    return ext.elem(random_ratf(rng, ext.fq, max_deg), random_ratf(rng, ext.fq, max_deg))
