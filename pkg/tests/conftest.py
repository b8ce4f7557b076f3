import pytest

from kbp_commit.generation.config import Config, Policy
from kbp_commit.generation.generator import generate
from kbp_commit.protocol.types import Vote


def make_config(d, byzantine=False, trap=False, **kw):
    return Config(
        d=d,
        byzantine_policy=Policy.NONDETERMINISTIC if byzantine else Policy.NEVER,
        trap_policy=Policy.NONDETERMINISTIC if trap else Policy.NEVER,
        **kw,
    )


def find_run(system, coord_vote=Vote.YES, votes=None, byzantine=False, trap=False, sends=None):
    """Id of the first run whose initial choice matches; sends filters on the Byzantine vector."""
    for r, run in enumerate(system.runs):
        c = run.choice
        if c.coord_vote != coord_vote or c.byzantine != byzantine or c.trap != trap:
            continue
        if votes is not None and c.votes != tuple(votes):
            continue
        if sends is not None and (c.behaviour is None or c.behaviour.sends(system.d) != tuple(sends)):
            continue
        return r
    raise LookupError("no such run")


@pytest.fixture(scope="session")
def honest_d2():
    return generate(make_config(2))


@pytest.fixture(scope="session")
def byzantine_d2():
    return generate(make_config(2, byzantine=True, trap=True))


@pytest.fixture(scope="session")
def honest_d3():
    return generate(make_config(3, trap=True))


@pytest.fixture(scope="session")
def byzantine_d3():
    return generate(make_config(3, byzantine=True, trap=True))
