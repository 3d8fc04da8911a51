import math

import pytest
from hypothesis import assume, given, strategies as st

from dgather.async_nk import compute_levels, corner_points, decide_nk
from dgather.errors import InvalidInput
from dgather.geometry import HALF_SQRT3, SQRT3
from dgather.model import Observation


def nk(me, *others, chirality=1):
    return decide_nk(Observation(me, tuple(others)), chirality)


def close(p, q, tol=1e-12):
    return math.hypot(p[0] - q[0], p[1] - q[1]) <= tol


def test_levels_examples():
    v = compute_levels(Observation((0, 0), ((1, 0), (0, 4))))
    assert [ln.y for ln in v.lines] == [4, 0]
    assert v.lines[1].points == ((0, 0), (1, 0))
    assert v.self_level == 2
    v = compute_levels(Observation((0, 0), ()))
    assert len(v.lines) == 1 and v.self_level == 1
    v = compute_levels(Observation((0, 0), ((3, 1e-12),)))
    assert len(v.lines) == 1 and len(v.top.points) == 2


def test_corner_points():
    assert corner_points([(-2, 3), (0, 3), (5, 3)]) == ((-2, 3), (5, 3))
    assert corner_points([(1, 1)]) == ((1, 1), (1, 1))
    with pytest.raises(InvalidInput):
        corner_points([])


@pytest.mark.parametrize("me, others, want, case", [
    ((0, 0), (), (0, 0), "A"),
    ((0, 0), ((2, 0),), (1, SQRT3), "B1.2e"),
    ((1, 0), ((0, 0), (2, 0)), (1, 0), "B1.2i"),
    ((0, 5), ((3, 0),), (0, 5), "B1.1"),
    ((0, 0), ((0, 4),), (0, 4), "B2.1v"),
    ((0, 0), ((5, SQRT3),), (1, SQRT3), "B2.1o"),
    ((0, 0), ((0.5, 10),), (0.5, HALF_SQRT3), "B2.1p"),
    ((0, 0), ((0.5, SQRT3), (5, SQRT3)), (1, SQRT3), "B2.2b"),
    ((0, 0), ((-0.5, SQRT3), (0.8, SQRT3)), (-0.5, HALF_SQRT3), "B2.2c"),
    ((0, 0), ((-4, SQRT3), (4, SQRT3)), (-1, SQRT3), "B2.2a"),
])
def test_cases(me, others, want, case):
    got, label = nk(me, *others)
    assert label == case
    assert close(got, want)


def test_tie_break_follows_chirality():
    got, _ = nk((0, 0), (-4, SQRT3), (4, SQRT3), chirality=-1)
    assert close(got, (1, SQRT3))


def test_external_partner_is_the_farthest_point():
    got, label = nk((0, 0), (1, 0), (4, 0))
    assert label == "B1.2e" and close(got, (2, 2 * SQRT3))


def test_span_beside_the_wedge_takes_the_near_crossing():
    # the visible top line lies wholly right of both Go-Line crossings
    got, label = nk((10, 0), (0, 1), (0.5, 1))
    assert label == "B2.2s"
    assert close(got, (10 - 1 / SQRT3, 1))


coord = st.floats(min_value=-20, max_value=20, allow_nan=False).map(lambda v: round(v, 2))
pt = st.tuples(coord, coord)


@given(pt, st.lists(pt, min_size=0, max_size=6, unique=True), st.sampled_from([1, -1]))
def test_moves_climb_at_sixty_degrees_or_more(me, others, chirality):
    others = [o for o in others if o != me]
    got, case = nk(me, *others, chirality=chirality)
    moved = math.dist(me, got)
    if moved == 0:
        assert case in ("A", "B1.1", "B1.2i")
    else:
        assert got[1] - me[1] >= (HALF_SQRT3 - 1e-9) * moved


@given(pt, st.lists(pt, min_size=1, max_size=6, unique=True))
def test_horizontal_confinement(me, others):
    others = [o for o in others if o != me]
    assume(others)
    got, case = nk(me, *others)
    if case.startswith("B2"):
        top = max(o[1] for o in others)
        line = [o for o in others if o[1] == top]
        lo, hi = min(o[0] for o in line), max(o[0] for o in line)
        assert min(me[0], lo) - 1e-9 <= got[0] <= max(me[0], hi) + 1e-9


@given(pt, st.lists(pt, min_size=0, max_size=6, unique=True), st.sampled_from([1, -1]))
def test_mirror_equivariance(me, others, chirality):
    others = [o for o in others if o != me]
    got, _ = nk(me, *others, chirality=chirality)
    mirrored, _ = nk((-me[0], me[1]), *[(-o[0], o[1]) for o in others], chirality=-chirality)
    assert close(mirrored, (-got[0], got[1]), 1e-9)


@given(pt, st.lists(pt, min_size=0, max_size=6, unique=True), st.integers(-50, 50), st.integers(-50, 50))
def test_translation_equivariance(me, others, dx, dy):
    others = [o for o in others if o != me]
    got, case = nk(me, *others)
    moved, case2 = nk((me[0] + dx, me[1] + dy), *[(o[0] + dx, o[1] + dy) for o in others])
    assert case == case2
    assert close(moved, (got[0] + dx, got[1] + dy), 1e-9)
