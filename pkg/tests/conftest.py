import pytest
from hypothesis import settings

from corrcalc.fib import cat_pseudofunctor
from corrcalc.fincat import FunctorData, identity_functor
from corrcalc.fixtures import arrow, chain3, one, p2
from corrcalc.marked import has_base_change, maximal_marking, validate_marking

settings.register_profile("ci", max_examples=40, deadline=None)
settings.load_profile("ci")


@pytest.fixture(scope="session")
def A():
    return arrow()


@pytest.fixture(scope="session")
def O():
    return one()


@pytest.fixture(scope="session")
def P():
    return p2()


@pytest.fixture(scope="session")
def C3():
    return chain3()


@pytest.fixture(scope="session")
def MA(A):
    """ARROW with ``a`` marked, certified."""
    return has_base_change(validate_marking(A, ["a"], name="ARROW{a}")).payload


@pytest.fixture(scope="session")
def MP(P):
    return has_base_change(maximal_marking(P)).payload


def arrow_functor(A, c0, c1, fa):
    mor = [None] * A.n_mor
    mor[A.mor("id_0")] = identity_functor(c0)
    mor[A.mor("id_1")] = identity_functor(c1)
    mor[A.mor("a")] = fa
    return cat_pseudofunctor(A, [c0, c1], mor)


@pytest.fixture(scope="session")
def H_bang(A):
    """``ARROW -> ONE``: not Beck-Chevalley on the square of ``a`` with itself."""
    return arrow_functor(A, A, one(), FunctorData(A, one(), [0, 0], [0, 0, 0]))


@pytest.fixture(scope="session")
def H_top(A):
    """``ONE -> ARROW`` at ``1``: has no right adjoint."""
    return arrow_functor(A, one(), A, FunctorData(one(), A, [1], [A.ids[1]]))


@pytest.fixture(scope="session")
def H_bottom(A):
    """``ONE -> ARROW`` at ``0``: bivariant."""
    return arrow_functor(A, one(), A, FunctorData(one(), A, [0], [A.ids[0]]))
