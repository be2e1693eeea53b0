import itertools
import random
from collections import deque

import pytest

from demsim.dems import DemsState, commit, plan_mu_transmission, schedule_edca
from demsim.domain import AccessCategory as AC, Frame, SchedulerError
from demsim.traffic import refill_saturated


def saturated_state(n_users, depth=6):
    state = DemsState(n_users)
    ids = itertools.count()
    for ac in (AC.VO, AC.BE):
        for j in range(n_users):
            refill_saturated(state.virtual[ac][j], depth, ac, None, None, ids, dest=j + 1)
    return state


def test_alpha_one_moves_vo_everywhere():
    state = saturated_state(2)
    schedule_edca(state, 1.0, random.Random(0))
    assert all(hw[0].ac is AC.VO for hw in state.hardware)


def test_alpha_zero_moves_be_everywhere():
    state = saturated_state(3)
    schedule_edca(state, 0.0, random.Random(0))
    assert all(hw[0].ac is AC.BE for hw in state.hardware)


def test_edca_moves_exactly_one_frame_per_user():
    state = saturated_state(3)
    schedule_edca(state, 0.5, random.Random(1))
    assert [len(hw) for hw in state.hardware] == [1, 1, 1]
    for j, hw in enumerate(state.hardware):
        assert hw[0].dest == j + 1


def test_edca_frequency_tracks_alpha():
    # Bernoulli frequency oracle on the per-user AC choice.
    state = saturated_state(1, depth=2)
    rng = random.Random(2)
    n = 10**5
    vo = 0
    for _ in range(n):
        schedule_edca(state, 0.75, rng)
        frame = state.hardware[0].popleft()
        vo += frame.ac is AC.VO
        state.virtual[frame.ac][0].append(frame)  # recycle to stay saturated
    assert vo / n == pytest.approx(0.75, abs=0.005)


def test_edca_requires_drained_hardware():
    state = saturated_state(2)
    schedule_edca(state, 1.0, random.Random(0))
    with pytest.raises(SchedulerError):
        schedule_edca(state, 1.0, random.Random(0))


def test_edca_requires_backlog():
    state = DemsState(1)
    state.virtual[AC.VO][0].append(Frame(0, AC.VO, 1))
    # BE virtual queue empty: the alpha=0 branch has nothing to move.
    with pytest.raises(SchedulerError):
        schedule_edca(state, 0.0, random.Random(0))


def test_plan_one_head_per_user():
    state = saturated_state(2)
    schedule_edca(state, 1.0, random.Random(0))
    plan = plan_mu_transmission(state, n_streams=2)
    assert plan.destinations() == (1, 2)
    assert plan.primary_ac is AC.VO


def test_plan_primary_is_highest_priority_selected():
    state = DemsState(2)
    state.hardware[0].append(Frame(0, AC.BE, 1))
    state.hardware[1].append(Frame(1, AC.VO, 2))
    plan = plan_mu_transmission(state, n_streams=2)
    assert plan.primary_ac is AC.VO
    state2 = DemsState(2)
    state2.hardware[0].append(Frame(0, AC.BE, 1))
    state2.hardware[1].append(Frame(1, AC.BE, 2))
    assert plan_mu_transmission(state2, n_streams=2).primary_ac is AC.BE


def test_plan_respects_stream_budget():
    state = saturated_state(3)
    schedule_edca(state, 0.5, random.Random(3))
    plan = plan_mu_transmission(state, n_streams=2)
    assert plan.destinations() == (1, 2)


def test_plan_skips_empty_hardware_queues():
    state = DemsState(3)
    state.hardware[2].append(Frame(0, AC.BE, 3))
    plan = plan_mu_transmission(state, n_streams=3)
    assert plan.destinations() == (3,)


def test_plan_all_empty_is_error():
    with pytest.raises(SchedulerError):
        plan_mu_transmission(DemsState(2), n_streams=2)


def test_commit_drains_hardware_and_counts():
    state = saturated_state(3)
    schedule_edca(state, 1.0, random.Random(0))
    plan = plan_mu_transmission(state, n_streams=3)
    commit(state, plan)
    assert all(not hw for hw in state.hardware)
    assert state.counters[AC.VO] == 3
    assert state.counters[AC.BE] == 0


def test_commit_rejects_mismatch():
    state = DemsState(1)
    state.hardware[0].append(Frame(0, AC.VO, 1))
    plan = plan_mu_transmission(state, n_streams=1)
    state.hardware[0].popleft()
    with pytest.raises(SchedulerError):
        commit(state, plan)


def test_fifo_order_preserved_per_user_queue():
    state = saturated_state(1)
    seen = []
    rng = random.Random(4)
    for _ in range(4):
        schedule_edca(state, 1.0, rng)
        plan = plan_mu_transmission(state, n_streams=1)
        seen.extend(f.id for f in plan.frames)
        commit(state, plan)
        ids = itertools.count(1000 + len(seen) * 10)
        refill_saturated(state.virtual[AC.VO][0], 6, AC.VO, None, None, ids, dest=1)
    assert seen == sorted(seen)
