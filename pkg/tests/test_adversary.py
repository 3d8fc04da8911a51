import math

import pytest
from hypothesis import given, strategies as st

from dgather import adversary
from dgather.adversary import (
    Exhaustive,
    FSync,
    FullMove,
    HideFarthest,
    HideNearest,
    MinDelta,
    RoundRobin,
    Scripted,
    SeededFraction,
    SeededRandom,
    SeededSubset,
    choose_view,
    draw_k,
    load_script,
    next_active_set,
    stop_point,
)
from dgather.errors import InvalidInput, ScriptError
from dgather.geometry import Point
from dgather.rng import Stream, draw_u64

CANDS = [Point(1, 0), Point(2, 0), Point(3, 0)]


def test_rng_vectors():
    # frozen outputs of the keyed BLAKE2b stream; any change breaks replay
    assert Stream(0, "visibility", 0, 0).next_u64() == 0x8F20778C55F6E63E
    assert Stream(42, "motion", 7, 3).next_u64() == 0x2D499C0CCEF04826
    assert Stream(2**64 - 1, "k", -1, -1).next_u64() == 0xD274B4624A68D8AE
    assert draw_u64(0, "visibility", 0, 0, 0) == 0x8F20778C55F6E63E


@given(st.integers(0, 2**64 - 1), st.integers(0, 10), st.integers(0, 10))
def test_rng_sample_and_randint(seed, k, n):
    s = Stream(seed, "t")
    items = list(range(n))
    pick = s.sample(items, min(k, n))
    assert len(pick) == min(k, n) and len(set(pick)) == len(pick)
    assert 3 <= s.randint(3, 9) <= 9
    assert 0.0 <= s.random() < 1.0


def test_small_candidate_sets_are_shown_whole():
    for pol in (SeededRandom(1), HideFarthest(), HideNearest(), Exhaustive()):
        assert choose_view(pol, 0, (0, 0), [Point(1, 0)], 2, 1) == [(1, 0)]


def test_policies_choose_exactly_k():
    assert len(choose_view(SeededRandom(5), 0, (0, 0), CANDS, 2, 1)) == 2
    assert choose_view(HideFarthest(), 0, (0, 0), CANDS, 2, 1) == [(1, 0), (2, 0)]
    assert choose_view(HideNearest(), 0, (0, 0), CANDS, 2, 1) == [(3, 0), (2, 0)]


def test_seeded_random_replays():
    a = [choose_view(SeededRandom(9), i, (0, 0), CANDS, 2, s) for s in range(5) for i in range(3)]
    b = [choose_view(SeededRandom(9), i, (0, 0), CANDS, 2, s) for s in range(5) for i in range(3)]
    assert a == b


def test_exhaustive_options():
    four = [Point(0, 0), *CANDS]
    opts = [Exhaustive.options([p for p in four if p != me], 2) for me in four]
    assert [len(o) for o in opts] == [3, 3, 3, 3]
    assert math.prod(len(o) for o in opts) == 81


def test_scripted_views(tmp_path):
    path = tmp_path / "s.jsonl"
    path.write_text('# comment\n{"step": 1, "robot": 0, "view": [[1, 0], [3, 0]]}\n')
    pol = Scripted(load_script(path))
    assert pol.choose(0, (0, 0), CANDS, 2, 1) == [(1, 0), (3, 0)]
    with pytest.raises(ScriptError):
        pol.choose(1, (0, 0), CANDS, 2, 1)  # no record
    with pytest.raises(ScriptError):
        Scripted([{"step": 1, "robot": 0, "view": [[9, 9], [1, 0]]}]).choose(0, (0, 0), CANDS, 2, 1)
    with pytest.raises(ScriptError):
        Scripted([{"step": 1, "robot": 0, "view": [[1, 0]]}]).choose(0, (0, 0), CANDS, 2, 1)
    with pytest.raises(ScriptError):
        Scripted([{"step": 1, "robot": 0, "view": []}] * 2)


def test_stop_point_examples():
    assert stop_point(MinDelta(), (0, 0), (4, 0), 1) == (1, 0)
    for pol in (FullMove(), MinDelta(), SeededFraction(3)):
        assert stop_point(pol, (0, 0), (0.5, 0), 1) == (0.5, 0)
        assert stop_point(pol, (2, 2), (2, 2), 1) == (2, 2)
    with pytest.raises(InvalidInput):
        stop_point(FullMove(), (0, 0), (1, 0), 0)


coord = st.floats(-100, 100, allow_nan=False)


@given(st.tuples(coord, coord), st.tuples(coord, coord), st.floats(1e-3, 5),
       st.integers(0, 2**32), st.integers(0, 100))
def test_motion_contract(start, dest, delta, seed, step):
    length = math.dist(start, dest)
    for pol in (FullMove(), MinDelta(), SeededFraction(seed)):
        s = stop_point(pol, start, dest, delta, step, 0)
        moved = math.dist(start, s)
        assert moved >= min(delta, length) - 1e-12 * max(1, length)
        assert moved + math.dist(s, dest) <= length + 1e-9 * max(1, length)


def test_schedulers():
    assert next_active_set(FSync(), 1, 4) == [0, 1, 2, 3]
    rr = RoundRobin()
    assert [next_active_set(rr, s, 3) for s in range(1, 5)] == [[0], [1], [2], [0]]
    with pytest.raises(InvalidInput):
        next_active_set(FSync(), 1, 1)


@given(st.integers(0, 2**40), st.floats(0.05, 1.0))
def test_subset_scheduler_is_fair_and_nonempty(seed, p):
    sch = SeededSubset(seed, p, fairness=16)
    last = [0] * 5
    for step in range(1, 120):
        act = sch.active(step, 5)
        assert act
        for i in act:
            last[i] = step
        assert all(step - t <= 16 for t in last)


def test_draw_k_range():
    ks = {draw_k(3, s, 0, 9) for s in range(300)}
    assert ks == set(range(1, 8))
    assert draw_k(3, 1, 0, 3) == 1


def test_factories_reject_unknown_names():
    with pytest.raises(InvalidInput):
        adversary.make_visibility("psychic", 0)
    with pytest.raises(InvalidInput):
        adversary.make_motion("teleport", 0)
    with pytest.raises(InvalidInput):
        adversary.make_scheduler("chaos", 0)
    with pytest.raises(InvalidInput):
        adversary.make_visibility("scripted", 0)
