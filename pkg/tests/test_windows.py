from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from termtrends.corpus import Observation
from termtrends.errors import DataError
from termtrends.windows import TimeWindow, build_vocabulary, build_windows


def obs_for_years(years):
    return [Observation(source_id=f"o{i}", tokens=("tok",), year=y) for i, y in enumerate(years)]


def obs_with_tokens(token_lists):
    return [Observation(source_id=f"o{i}", tokens=tuple(t)) for i, t in enumerate(token_lists)]


def test_five_year_windows_over_half_century():
    windows = build_windows(obs_for_years(range(1971, 2020)), width=5, step=1)
    assert len(windows) == 45
    assert windows[0][0] == TimeWindow(1971, 1975)
    assert windows[-1][0] == TimeWindow(2015, 2019)


def test_ten_year_windows_count():
    # last start = 2010, so 1971..2010 gives 40 windows
    windows = build_windows(obs_for_years(range(1971, 2020)), width=10, step=1)
    assert len(windows) == 40


def test_single_year_window():
    windows = build_windows(obs_for_years([2000, 2000, 2000]), width=1, step=1)
    assert len(windows) == 1
    assert windows[0][0] == TimeWindow(2000, 2000)
    assert len(windows[0][1]) == 3


def test_span_shorter_than_width_gives_one_window():
    windows = build_windows(obs_for_years([2000, 2001]), width=5, step=1)
    assert [w for w, _ in windows] == [TimeWindow(2000, 2004)]
    assert len(windows[0][1]) == 2


def test_membership_is_inclusive_range():
    observations = obs_for_years([1999, 2000, 2004, 2005])
    windows = dict(build_windows(observations, width=5, step=1))
    members = windows[TimeWindow(2000, 2004)]
    assert sorted(o.year for o in members) == [2000, 2004]


def test_undated_observations_excluded():
    observations = obs_for_years([2000]) + [Observation(source_id="book", tokens=("x",))]
    windows = build_windows(observations, width=1, step=1)
    assert len(windows[0][1]) == 1


def test_empty_windows_emitted():
    windows = build_windows(obs_for_years([2000, 2004]), width=1, step=1)
    assert [len(m) for _, m in windows] == [1, 0, 0, 0, 1]


def test_anchor_year_override():
    windows = build_windows(obs_for_years([1999, 2003]), width=2, step=1, anchor_year=2000)
    assert windows[0][0] == TimeWindow(2000, 2001)


def test_no_dated_observations_is_error():
    with pytest.raises(DataError, match="no dated"):
        build_windows([Observation(source_id="b", tokens=("x",))], width=5, step=1)


def test_invalid_width_step():
    with pytest.raises(DataError):
        build_windows(obs_for_years([2000]), width=0, step=1)
    with pytest.raises(DataError):
        build_windows(obs_for_years([2000]), width=1, step=0)


@given(
    years=st.lists(st.integers(1950, 2030), min_size=1, max_size=60),
    width=st.integers(1, 8),
    step=st.integers(1, 3),
)
@settings(max_examples=150)
def test_every_dated_observation_covered_with_step_one(years, width, step):
    observations = obs_for_years(years)
    windows = build_windows(observations, width=width, step=step)
    # chronological and uniformly spaced starts
    starts = [w.start_year for w, _ in windows]
    assert starts == sorted(starts)
    assert all(w.width == width for w, _ in windows)
    if step == 1:
        # with unit step every dated observation lands in >= 1 window
        covered = set()
        for w, members in windows:
            covered.update(o.source_id for o in members)
        assert covered == {o.source_id for o in observations}


def test_interior_observation_appears_in_width_windows():
    years = list(range(1990, 2011))
    width = 5
    windows = build_windows(obs_for_years(years), width=width, step=1)
    target_year = 2000  # at least width-1 years from both corpus ends
    count = sum(1 for w, m in windows if any(o.year == target_year for o in m))
    assert count == width


def test_vocabulary_min_df_counts_distinct_observations():
    observations = obs_with_tokens([["defect"] * 5])
    assert "defect" not in build_vocabulary(observations, min_df=3)

    observations = obs_with_tokens([["defect"], ["defect", "x"], ["defect"]])
    vocab = build_vocabulary(observations, min_df=3)
    assert "defect" in vocab
    assert vocab.obs_frequency["defect"] == 3
    assert "x" not in vocab


def test_vocabulary_min_df_one_keeps_all_tokens():
    observations = obs_with_tokens([["a", "b"], ["c"]])
    vocab = build_vocabulary(observations, min_df=1)
    assert set(vocab.tokens) == {"a", "b", "c"}


def test_vocabulary_ordering_frequency_then_lexicographic():
    observations = obs_with_tokens([["b", "z", "a"], ["b", "a"], ["b"]])
    vocab = build_vocabulary(observations, min_df=1)
    assert vocab.tokens == ("b", "a", "z")
    assert vocab.index == {"b": 0, "a": 1, "z": 2}


def test_vocabulary_index_is_bijection():
    observations = obs_with_tokens([["a", "b", "c"], ["b", "c"], ["c"]])
    vocab = build_vocabulary(observations, min_df=1)
    assert sorted(vocab.index.values()) == list(range(len(vocab)))
    assert all(vocab.tokens[i] == t for t, i in vocab.index.items())


@given(
    token_lists=st.lists(
        st.lists(st.sampled_from("abcdefgh"), max_size=6), min_size=1, max_size=20
    ),
    min_df=st.integers(1, 4),
)
@settings(max_examples=150)
def test_raising_min_df_never_adds_tokens(token_lists, min_df):
    observations = obs_with_tokens(token_lists)
    lower = set(build_vocabulary(observations, min_df).tokens)
    higher = set(build_vocabulary(observations, min_df + 1).tokens)
    assert higher <= lower
    for vocab in (build_vocabulary(observations, min_df),):
        assert all(vocab.obs_frequency[t] >= min_df for t in vocab.tokens)


def test_vocabulary_determinism():
    observations = obs_with_tokens([["c", "a"], ["a", "b"], ["b", "a"]])
    v1 = build_vocabulary(observations, 1)
    v2 = build_vocabulary(list(observations), 1)
    assert v1.tokens == v2.tokens
