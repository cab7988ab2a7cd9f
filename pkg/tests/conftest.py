import sys
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

from timedcsm.formula import FALSE, TRUE, And, Atom, Not, Or
from timedcsm.modelio import read_model

sys.path.insert(0, str(Path(__file__).parent))

MODELS = Path(__file__).resolve().parents[1] / "src" / "timedcsm" / "models"

settings.register_profile("default", max_examples=150, deadline=None)
settings.load_profile("default")


def model_path(name):
    return MODELS / name


def formulas(names=("a", "b", "c", "d"), max_leaves=12):
    """Raw formula trees (no smart constructors) over ``names``."""
    leaves = st.one_of(
        st.sampled_from([TRUE, FALSE]),
        st.sampled_from(names).map(Atom),
    )
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            sub.map(Not),
            st.tuples(sub, sub).map(lambda p: And(*p)),
            st.tuples(sub, sub).map(lambda p: Or(*p)),
        ),
        max_leaves=max_leaves,
    )


@pytest.fixture(scope="session")
def train_gate():
    return read_model(model_path("train_gate.tcsm"))


@pytest.fixture(scope="session")
def monitor():
    return read_model(model_path("safety_test.tcsm")).get("MONITOR")


@pytest.fixture(scope="session")
def train_gate_nolower():
    return read_model(model_path("train_gate_nolower.tcsm"))
