"""Shared fixtures and strategies: crafted models and random no-signalling boxes."""

from fractions import Fraction
from itertools import product

import pytest
from hypothesis import strategies as st

from macrobox import (
    OUTCOMES,
    PairBox,
    explicit_joint,
    independent_pairs,
    make_deterministic_box,
    make_pr_box,
    OutcomeAssignment,
    SettingAssignment,
)

ZERO = Fraction(0)


def explicit_from_box(box, n):
    """Wrap n independent copies of a box as an explicit joint table.

    Same physics as independent_pairs(box, n) but forced through the generic
    (non-product) code paths, which makes it a cross-path oracle.
    """
    model = independent_pairs(box, n)
    table = {}
    for sa in product(range(box.s_a), repeat=n):
        for sb in product(range(box.s_b), repeat=n):
            block = {}
            for oa in product(OUTCOMES, repeat=n):
                for ob in product(OUTCOMES, repeat=n):
                    p = model.joint_probability(SettingAssignment(sa, sb),
                                                OutcomeAssignment(oa, ob))
                    if p != 0:
                        block[(oa, ob)] = p
            table[(sa, sb)] = block
    return explicit_joint(n, box.s_a, box.s_b, table)


def signalling_joint_table():
    """One-pair joint table where Alice's marginal tracks Bob's setting.

    Bob's marginal is uniform under every assignment and the rows for the
    two Alice settings are identical, so the only signalling direction is
    Bob-to-Alice: at j=0 Alice is uniform, at j=1 she is pinned to +1.
    """
    half = Fraction(1, 2)
    correlated = {((1,), (1,)): half, ((-1,), (-1,)): half}
    pinned = {((1,), (1,)): half, ((1,), (-1,)): half}
    table = {}
    for i in (0, 1):
        table[((i,), (0,))] = dict(correlated)
        table[((i,), (1,))] = dict(pinned)
    return table


@pytest.fixture
def signalling_model():
    return explicit_joint(1, 2, 2, signalling_joint_table())


def cross_pair_signalling_table():
    """Two-pair table where Alice particle 0's setting steers Bob particle 1.

    All outcomes are independent fair coins except the second Bob outcome,
    which stays uniform at i_1=0 but is pinned to +1 at i_1=1.
    """
    table = {}
    for sa in product(range(2), repeat=2):
        for sb in product(range(2), repeat=2):
            block = {}
            for oa in product(OUTCOMES, repeat=2):
                for ob in product(OUTCOMES, repeat=2):
                    p = Fraction(1, 8)
                    if sa[0] == 0:
                        p /= 2
                    elif ob[1] != 1:
                        p = ZERO
                    if p != 0:
                        block[(oa, ob)] = p
            table[(sa, sb)] = block
    return table


def all_deterministic_boxes():
    return [make_deterministic_box(x0, x1, y0, y1)
            for x0, x1, y0, y1 in product(OUTCOMES, repeat=4)]


@st.composite
def no_signalling_boxes(draw):
    """Random convex mixture of the 16 local vertices and the PR box.

    Every mixture of no-signalling boxes is no-signalling, and rational
    weights keep the table exact.
    """
    components = all_deterministic_boxes() + [make_pr_box()]
    weights = draw(st.lists(st.integers(min_value=0, max_value=8),
                            min_size=len(components), max_size=len(components)))
    total = sum(weights)
    if total == 0:
        weights[0] = 1
        total = 1
    table = {}
    for key in components[0].table:
        table[key] = sum((Fraction(w, total) * c.table[key]
                          for w, c in zip(weights, components)), ZERO)
    return PairBox(s_a=2, s_b=2, table=table)
