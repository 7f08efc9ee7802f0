import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

from simdex import kernels
from simdex.mathparse import (AbsGroup, Frac, Func, Group, Ident, Number, Op, Prime, Script,
                              Seq)

sys.path.insert(0, str(Path(__file__).parent))

LETTERS = "abcfgkpqtuxyzα"

idents = st.sampled_from(LETTERS).map(Ident)
atoms = st.one_of(
    idents,
    st.sampled_from(["0", "1", "2", "12"]).map(Number),
    st.sampled_from(["+", "−", "=", "/", ","]).map(Op),
)


def _compound(children):
    return st.one_of(
        st.lists(children, min_size=1, max_size=4).map(lambda xs: Seq(tuple(xs))),
        st.tuples(st.sampled_from(["paren", "square"]), children).map(lambda t: Group(*t)),
        children.map(AbsGroup),
        st.tuples(idents, st.none() | children, children).map(lambda t: Script(*t)),
        st.tuples(idents, children, st.none()).map(lambda t: Script(*t)),
        st.tuples(children, children).map(lambda t: Frac(*t)),
        st.tuples(st.sampled_from(["sin", "exp", "ln"]),
                  children.map(lambda c: Group("paren", c))).map(lambda t: Func(*t)),
        st.tuples(idents, st.integers(1, 3)).map(lambda t: Prime(*t)),
    )


asts = st.recursive(atoms, _compound, max_leaves=12).map(
    lambda n: n if isinstance(n, Seq) else Seq((n,)))


@pytest.fixture(params=["numba", "numpy"] if kernels.HAVE_NUMBA else ["numpy"])
def backend(request):
    previous = kernels.backend()
    kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(previous)
