from importlib import resources

import pytest

from demsim.domain import AccessCategory as AC, SchedulerError
from demsim.trace import (
    ParseError,
    parse_workload,
    render_timeline,
    replay,
    summary_line,
    timeline_stats,
)


def bundled(name: str) -> str:
    return (resources.files("demsim") / "workloads" / name).read_text()


@pytest.fixture(scope="module")
def fig4():
    return parse_workload(bundled("fig4.wl"))


@pytest.fixture(scope="module")
def fig5():
    return parse_workload(bundled("fig5.wl"))


@pytest.fixture(scope="module")
def fig6():
    return parse_workload(bundled("fig6.wl"))


# ---------------------------------------------------------------- parsing

def test_parse_bundled_smoke(fig4, fig6):
    assert fig4.n_streams == 3
    assert fig4.frame_count("fifo") == 11
    assert fig4.frame_count("dems") == 11
    assert fig4.grant is None
    assert fig6.grant is AC.VI


def test_parse_comments_and_blanks():
    wl = parse_workload(
        "# top comment\n"
        "streams=2\n"
        "\n"
        "[fifo.vo]  # queue\n"
        "1 u1 3  # trailing\n"
    )
    assert wl.n_streams == 2
    assert wl.fifo_queues[AC.VO][0].duration == 3


@pytest.mark.parametrize("text, lineno, needle", [
    ("streams=2\n[fifo]\n", 2, "malformed section"),
    ("streams=2\n[fifo.xx]\n", 2, "unknown access category"),
    ("streams=2\n[dems.vo]\n", 2, "need a user"),
    ("streams=2\n[fifo.u1.vo]\n", 2, "not per-user"),
    ("streams=2\n[fifo.vo]\n1 u1 1\n1 u2 1\n", 4, "duplicate frame id"),
    ("streams=2\n[fifo.vo]\n1 u1 0\n", 3, "duration"),
    ("streams=2\n[fifo.vo]\nnot a frame\n", 3, "malformed frame"),
    ("streams=2\n1 u1 1\n", 2, "before any queue section"),
    ("speed=3\n", 1, "unknown directive"),
    ("streams=0\n", 1, "positive integer"),
    ("grant=xx\n", 1, "unknown access category"),
    ("streams=2\n[dems.u1.vo]\n1 u2 1\n", 3, "u2"),
])
def test_parse_rejections(text, lineno, needle):
    with pytest.raises(ParseError) as exc:
        parse_workload(text)
    assert exc.value.lineno == lineno
    assert needle in str(exc.value)


def test_parse_requires_streams():
    with pytest.raises(ParseError) as exc:
        parse_workload("[fifo.vo]\n1 u1 1\n")
    assert exc.value.lineno == 0
    assert "streams" in str(exc.value)


def test_same_id_allowed_across_families():
    wl = parse_workload(
        "streams=2\n[fifo.vo]\n1 u1 1\n[dems.u1.vo]\n1 u1 1\n"
    )
    assert wl.frame_count("fifo") == 1
    assert wl.frame_count("dems") == 1


# ------------------------------------------------------------ fifo replay

def test_fifo_pairs_distinct_destinations():
    wl = parse_workload("streams=2\n[fifo.vo]\n1 u1 1\n2 u2 1\n")
    tl = replay(wl, "fifo")
    assert len(tl.txops) == 1
    assert {p.start for p in tl.txops[0].placements} == {0}


def test_fifo_same_destination_needs_two_txops():
    wl = parse_workload("streams=2\n[fifo.vo]\n1 u1 1\n2 u1 1\n")
    tl = replay(wl, "fifo")
    assert len(tl.txops) == 2


def test_fifo_head_blocks_queue():
    # u2's frame sits behind a repeat of u1 and must not overtake it
    wl = parse_workload("streams=3\n[fifo.vo]\n1 u1 1\n2 u1 1\n3 u2 1\n")
    tl = replay(wl, "fifo")
    assert len(tl.txops) == 2
    assert [p.frame.id for p in tl.txops[0].placements] == [1]
    assert sorted(p.frame.id for p in tl.txops[1].placements) == [2, 3]


def test_fifo_secondary_rides_along_when_it_fits():
    wl = parse_workload("streams=2\n[fifo.vo]\n1 u1 2\n[fifo.be]\n2 u2 1\n")
    tl = replay(wl, "fifo")
    assert len(tl.txops) == 1
    assert tl.txops[0].duration == 2
    assert tl.txops[0].padding(2) == 1


def test_fifo_secondary_must_fit_txop():
    wl = parse_workload("streams=2\n[fifo.vo]\n1 u1 1\n[fifo.be]\n2 u2 2\n")
    tl = replay(wl, "fifo")
    assert len(tl.txops) == 2
    assert tl.txops[0].placements[0].frame.ac is AC.VO


def test_fifo_grant_overrides_first_txop_only():
    wl = parse_workload(
        "streams=1\ngrant=be\n[fifo.vo]\n1 u1 1\n[fifo.be]\n2 u2 1\n3 u3 1\n"
    )
    tl = replay(wl, "fifo")
    assert [t.primary_ac for t in tl.txops] == [AC.BE, AC.VO, AC.BE]
    assert [t.placements[0].frame.id for t in tl.txops] == [2, 1, 3]


def test_fifo_grant_with_empty_queue_falls_back_to_priority():
    wl = parse_workload("streams=1\ngrant=bk\n[fifo.vo]\n1 u1 1\n")
    tl = replay(wl, "fifo")
    assert tl.txops[0].primary_ac is AC.VO


# ------------------------------------------------------------ dems replay

def test_dems_per_user_selection_and_backfill():
    wl = parse_workload(
        "streams=2\n"
        "[dems.u1.vo]\n1 u1 1\n"
        "[dems.u1.be]\n2 u1 1\n"
        "[dems.u2.be]\n3 u2 2\n"
    )
    tl = replay(wl, "dems")
    assert len(tl.txops) == 1
    txop = tl.txops[0]
    assert txop.duration == 2
    assert txop.primary_ac is AC.VO
    assert txop.padding(2) == 0
    by_id = {p.frame.id: p for p in txop.placements}
    assert by_id[1].stream == by_id[2].stream and by_id[2].start == 1


def test_dems_ignores_grant(fig6):
    tl = replay(fig6, "dems")
    # per-user strict priority: u1 airs its VO frame first even though the
    # grant directive names VI, so the first TXOP carries no VI at all
    first = tl.txops[0]
    assert {p.frame.ac for p in first.placements} == {AC.VO}
    assert tl.starts(ac=AC.VI)[0] > first.start


def test_unknown_scheduler_rejected(fig4):
    with pytest.raises(SchedulerError):
        replay(fig4, "edf")


# ----------------------------------------------------------- invariants

@pytest.mark.parametrize("name", ["fig4.wl", "fig5.wl", "fig6.wl"])
@pytest.mark.parametrize("scheduler", ["fifo", "dems"])
def test_replay_conserves_frames(name, scheduler):
    wl = parse_workload(bundled(name))
    tl = replay(wl, scheduler)
    placed = [p.frame.id for t in tl.txops for p in t.placements]
    assert len(placed) == len(set(placed)) == wl.frame_count(scheduler)


@pytest.mark.parametrize("name", ["fig4.wl", "fig5.wl", "fig6.wl"])
@pytest.mark.parametrize("scheduler", ["fifo", "dems"])
def test_replay_respects_txop_bounds_and_destinations(name, scheduler):
    wl = parse_workload(bundled(name))
    tl = replay(wl, scheduler)
    for txop in tl.txops:
        for p in txop.placements:
            assert 0 <= p.start and p.end <= txop.duration
        for a in txop.placements:
            for b in txop.placements:
                if a is b or a.frame.dest != b.frame.dest:
                    continue
                # same destination never airs on two streams at once
                assert a.stream == b.stream or a.end <= b.start or b.end <= a.start


@pytest.mark.parametrize("name", ["fig4.wl", "fig5.wl", "fig6.wl"])
@pytest.mark.parametrize("scheduler", ["fifo", "dems"])
def test_replay_preserves_queue_order(name, scheduler):
    wl = parse_workload(bundled(name))
    queues = wl.fifo_queues if scheduler == "fifo" else wl.dems_queues
    tl = replay(wl, scheduler)
    when = {
        p.frame.id: t.start + p.start for t in tl.txops for p in t.placements
    }
    for q in queues.values():
        starts = [when[f.id] for f in q]
        assert starts == sorted(starts)


@pytest.mark.parametrize("scheduler", ["fifo", "dems"])
def test_replay_is_deterministic(fig4, scheduler):
    assert replay(fig4, scheduler) == replay(fig4, scheduler)


# -------------------------------------------------------------- goldens

def test_fig4_goldens(fig4):
    fifo = timeline_stats(replay(fig4, "fifo"))
    dems = timeline_stats(replay(fig4, "dems"))
    assert (fifo.periods, fifo.completion[AC.VO], fifo.completion[AC.BE]) == (6, 4, 6)
    assert (dems.periods, dems.completion[AC.VO], dems.completion[AC.BE]) == (5, 3, 5)
    assert fifo.frames == dems.frames == 11


def test_fig5_goldens(fig5):
    fifo = timeline_stats(replay(fig5, "fifo"))
    dems = timeline_stats(replay(fig5, "dems"))
    assert dems.padding == 0
    assert fifo.padding >= 1
    assert (fifo.periods, dems.periods) == (4, 3)


def test_fig6_goldens(fig6):
    dems = replay(fig6, "dems")
    fifo = replay(fig6, "fifo")
    d_vo = dems.starts(ac=AC.VO, dest=2)
    d_be = dems.starts(ac=AC.BE, dest=2)
    assert d_vo and d_be and max(d_vo) < min(d_be)
    f_vo = fifo.starts(ac=AC.VO, dest=2)
    f_be = fifo.starts(ac=AC.BE, dest=2)
    assert min(f_be) < max(f_vo)


# ---------------------------------------------------------------- stats

def test_stats_empty_timeline():
    wl = parse_workload("streams=2\n")
    stats = timeline_stats(replay(wl, "fifo"))
    assert stats == timeline_stats(replay(wl, "dems"))
    assert (stats.periods, stats.frames, stats.padding) == (0, 0, 0)
    assert stats.frames_per_txop == 0.0
    assert stats.completion == {}


def test_stats_counts_idle_streams_as_padding():
    wl = parse_workload("streams=2\n[fifo.vo]\n1 u1 1\n")
    stats = timeline_stats(replay(wl, "fifo"))
    assert stats.padding == 1


def test_summary_line_format(fig4):
    line = summary_line(timeline_stats(replay(fig4, "dems")))
    assert line == ("periods=5 vo_done=3 be_done=5 "
                    "padding=4 frames=11 frames_per_txop=2.20")


def test_render_timeline_smoke(fig5):
    text = render_timeline(replay(fig5, "fifo"))
    assert "txop 1: start=0" in text
    assert "s1:" in text and "s2:" in text
    assert "idle" in text


def test_starts_filters(fig5):
    tl = replay(fig5, "dems")
    assert len(tl.starts()) == 6
    assert len(tl.starts(ac=AC.BE)) == 2
    assert set(tl.starts(dest=1)) <= set(tl.starts())
