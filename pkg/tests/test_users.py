import pytest
from hypothesis import given, strategies as st

from ucme.archive import Elite
from ucme.domain import Evaluation
from ucme.users import USER_IDS, choose, usc

unit = st.floats(0.0, 1.0)


def alt(bc):
    return Elite(None, Evaluation(True, 1.0, (1.0,) * 7, 0.8, bc), (0, 0))


@pytest.mark.parametrize("user, bc, s, expected", [
    ("U1", (0.8, 0.6), 1, 0.8),
    ("U2", (0.8, 0.6), 1, 0.6),
    ("U3", (0.8, 0.6), 1, 0.7),
    ("U4", (0.8, 0.6), 1, 0.8),
    ("U5", (0.8, 0.6), 1, 0.2),
    ("U6", (0.8, 0.6), 9, 0.4),
    ("U7", (0.8, 0.6), 1, 0.3),
    ("U8", (0.8, 0.6), 1, 0.2),
    ("U9", (0.8, 0.6), 5, 0.8),
    ("U9", (0.8, 0.6), 6, 0.2),
    ("U10", (0.8, 0.6), 5, 0.6),
    ("U10", (0.8, 0.6), 6, 0.4),
    ("U11", (0.8, 0.6), 5, 0.8),
    ("U11", (0.8, 0.6), 6, 0.6),
    ("U12", (0.8, 0.6), 5, 0.6),
    ("U12", (0.8, 0.6), 6, 0.8),
])
def test_heuristic_values(user, bc, s, expected):
    assert usc(user, bc, s) == pytest.approx(expected, abs=1e-12)


@given(unit, unit, st.integers(1, 20))
def test_all_users_bounded(c, o, s):
    for user in USER_IDS:
        assert 0.0 <= usc(user, (c, o), s) <= 1.0


@given(unit, unit, st.integers(1, 20))
def test_complement_pairs(c, o, s):
    bc = (c, o)
    assert usc("U5", bc, s) == pytest.approx(1 - usc("U1", bc, s))
    assert usc("U7", bc, s) == pytest.approx(1 - usc("U3", bc, s))
    assert usc("U8", bc, s) == pytest.approx(1 - usc("U4", bc, s))


def test_unknown_user_rejected():
    with pytest.raises(ValueError):
        usc("U13", (0.5, 0.5), 1)


class TestChoose:
    def test_single_alternative(self):
        assert choose("U1", [alt((0.2, 0.2))], 1) == 0

    def test_argmax(self):
        alts = [alt((0.3, 0.5)), alt((0.7, 0.5)), alt((0.5, 0.5))]
        assert choose("U1", alts, 1) == 1

    def test_tie_takes_lowest_index(self):
        alts = [alt((0.7, 0.1)), alt((0.7, 0.9))]
        assert choose("U1", alts, 1) == 0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            choose("U1", [], 1)

    @given(st.lists(st.tuples(unit, unit), min_size=1, max_size=6),
           st.integers(1, 10))
    def test_argmax_invariance_under_monotone_transform(self, bcs, s):
        alts = [alt(bc) for bc in bcs]
        idx = choose("U3", alts, s)
        scores = [usc("U3", bc, s) for bc in bcs]
        transformed = [3.0 * v + 1.0 for v in scores]
        assert transformed[idx] == max(transformed)
