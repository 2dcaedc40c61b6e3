import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from predictability.core import Alphabet, CategoricalSequence, encode_labels
from predictability.ingest import Entry, BinnedEventStream
from predictability.markov import (
    MarkovModel,
    fit,
    format_model_dump,
    mc_entropy_rate,
    rolling_evaluate,
    top_k,
    transition_probs,
    update,
)
from predictability.synth import analytic_markov_rate, gen_markov, stay_matrix

from conftest import seq

DAY = 86400


def stream_from_partners(partners_by_bin, bin_width=300, ego="A"):
    entries = tuple(Entry(b, alter, None) for b, alter in partners_by_bin)
    return BinnedEventStream({ego: entries}, bin_width)


def test_fit_counts_adjacent_pairs():
    m = fit(seq([0, 1, 0, 1]))
    assert m.counts.tolist() == [[0, 2], [1, 0]]
    assert fit(seq([0, 0, 0])).counts.tolist() == [[2]]
    assert fit(seq([0, 1])).counts.tolist() == [[0, 1], [0, 0]]


def test_fit_needs_two_symbols():
    with pytest.raises(ValueError):
        fit(seq([0]))


def test_update_with_bridge():
    m = update(fit(seq([0, 1])), seq([0, 1]), bridge=1)
    assert m.counts.tolist() == [[0, 2], [1, 0]]


def test_update_with_empty_sequence():
    m = fit(seq([0, 1]))
    before = m.counts.copy()
    update(m, seq([], 0))
    assert np.array_equal(m.counts, before)


def test_update_grows_alphabet():
    m = update(fit(seq([0, 1])), seq([0, 1, 2]))
    assert m.k == 3
    assert m.counts.tolist() == [[0, 2, 0], [0, 0, 1], [0, 0, 0]]


def test_update_matches_by_label():
    m = fit(encode_labels(["x", "y", "x"])[1])
    update(m, encode_labels(["y", "z"])[1])
    assert m.alphabet.labels == ("x", "y", "z")
    assert m.counts[1, 2] == 1


def test_update_rejects_bad_bridge():
    with pytest.raises(ValueError):
        update(fit(seq([0, 1])), seq([0]), bridge=5)


@given(st.lists(st.lists(st.integers(0, 4), max_size=20), min_size=1, max_size=6), st.booleans())
def test_count_conservation(segments, use_bridge):
    model = MarkovModel()
    bridges = 0
    last = None
    nonempty = 0
    for codes in segments:
        s = seq(codes, 5)
        b = None
        if use_bridge and last is not None and codes:
            b = model.alphabet.encode(last)
            bridges += 1
        update(model, s, bridge=b)
        if codes:
            nonempty += 1
            last = codes[-1]
    n = sum(len(c) for c in segments)
    assert model.total == n - nonempty + bridges
    assert np.array_equal(model.state_counts, model.counts.sum(axis=1))


def test_transition_probs():
    m = fit(seq([0, 1, 0, 1]))
    assert transition_probs(m, 0).probs.tolist() == [0.0, 1.0]
    # state 2 only ever appears last: falls back to the target marginal
    m = fit(seq([0, 1, 0, 2]))
    assert transition_probs(m, 2).probs.tolist() == pytest.approx([1 / 3, 1 / 3, 1 / 3])
    with pytest.raises(ValueError):
        transition_probs(m, 3)


def test_transition_probs_deterministic_row():
    m = fit(seq([0, 1, 2, 0, 1, 2]))
    assert transition_probs(m, 1).probs.tolist() == [0.0, 0.0, 1.0]


def test_mc_entropy_rate_examples():
    assert mc_entropy_rate(fit(seq([0, 1] * 10))) == 0.0
    counts = np.full((4, 4), 3, dtype=np.int64)
    assert mc_entropy_rate(MarkovModel(Alphabet.of_size(4), counts)) == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(ValueError):
        mc_entropy_rate(MarkovModel(Alphabet.of_size(2)))


def test_mc_entropy_rate_hand_computed():
    # transitions 0->0, 0->1, 1->0 : row 0 is a fair coin (weight 2/3), row 1 deterministic
    assert mc_entropy_rate(fit(seq([0, 0, 1, 0]))) == pytest.approx(2 / 3, abs=1e-12)


@pytest.mark.slow
def test_mc_entropy_rate_on_long_chain():
    P = stay_matrix(0.9)
    model = fit(gen_markov(P, 100_000, seed=11))
    assert mc_entropy_rate(model) == pytest.approx(analytic_markov_rate(P), abs=0.02)


@given(st.lists(st.integers(0, 3), min_size=2, max_size=60))
def test_mc_entropy_rate_zero_iff_one_hot(codes):
    m = fit(seq(codes, 4))
    visited = m.state_counts > 0
    one_hot = all(np.count_nonzero(m.counts[s]) == 1 for s in np.flatnonzero(visited))
    rate = mc_entropy_rate(m)
    assert rate >= 0
    assert (rate == 0) == one_hot


def test_top_k_one_hot():
    m = fit(seq([0, 1, 0, 1]))
    assert top_k(m, 0, 1) == [1]


def test_top_k_tie_goes_to_lower_code():
    m = MarkovModel(Alphabet.of_size(2), np.array([[1, 1], [1, 1]]))
    assert top_k(m, 0, 1) == [0]


def test_top_k_pads_by_marginal_rank():
    counts = np.zeros((6, 6), dtype=np.int64)
    counts[0, 3] = 2
    counts[0, 1] = 1
    counts[2, 5] = 3
    counts[4, 2] = 1
    m = MarkovModel(Alphabet.of_size(6), counts)
    # row: 3 then 1; pads: 5 (3 arrivals), 2 (1), then zero-mass 0 by code
    assert top_k(m, 0, 5) == [3, 1, 5, 2, 0]


def test_top_k_errors():
    m = fit(seq([0, 1]))
    with pytest.raises(ValueError):
        top_k(m, 0, 0)
    with pytest.raises(ValueError):
        top_k(m, 2, 1)


@given(st.lists(st.integers(0, 5), min_size=2, max_size=50), st.integers(1, 8), st.data())
def test_top_k_shape(codes, k, data):
    m = fit(encode_labels(codes)[1])
    s = data.draw(st.integers(0, m.k - 1))
    ranked = top_k(m, s, k)
    assert len(ranked) == min(k, m.k)
    assert len(set(ranked)) == len(ranked)
    assert top_k(m, s, k) == ranked


@given(st.integers(2, 5).flatmap(lambda k: st.tuples(
    st.lists(st.integers(0, k - 1), min_size=2, max_size=60), st.permutations(range(k)))))
def test_relabel_invariance(args):
    codes, perm = args
    k = len(perm)
    s = CategoricalSequence.from_codes(codes, k)
    r = s.relabel(perm)
    m, mr = fit(s), fit(r)
    assert mc_entropy_rate(mr) == pytest.approx(mc_entropy_rate(m), abs=1e-12)
    for state in range(k):
        # permuted ranks agree wherever probabilities are strictly ordered
        probs = transition_probs(m, state).probs
        probs_r = transition_probs(mr, perm[state]).probs
        assert np.allclose(probs_r[list(perm)], probs)


def test_model_dump():
    text = format_model_dump(fit(encode_labels(["x", "y", "x", "x"])[1]))
    assert text.splitlines() == ["source,target,probability", "x,x,0.5", "x,y,0.5", "y,x,1"]


# -- rolling evaluation -------------------------------------------------------


def test_rolling_evaluate_periodic():
    bins_per_day = DAY // 300
    partners = [(b, "BCD"[b % 3]) for b in range(0, 21 * bins_per_day, 12)]
    result = rolling_evaluate(stream_from_partners(partners), "A")
    assert [w.window_index for w in result.windows] == [1, 2]
    assert result.overall_top1 == 1.0
    assert result.overall_top5 == 1.0


def test_rolling_evaluate_counts_single_event():
    week_bins = 7 * DAY // 300
    stream = stream_from_partners([(0, "B"), (1, "C"), (week_bins, "B")])
    result = rolling_evaluate(stream, "A")
    assert result.events_evaluated == 1
    # state C was never left in training: fallback marginal puts C first (tie, lower code)
    assert result.windows[0].hits == {1: 0, 5: 1}


def test_rolling_evaluate_needs_two_windows():
    with pytest.raises(ValueError, match="two evaluation windows"):
        rolling_evaluate(stream_from_partners([(0, "B"), (5, "C")]), "A")


def test_rolling_evaluate_unseen_partner_is_a_miss():
    week_bins = 7 * DAY // 300
    stream = stream_from_partners([(0, "B"), (1, "C"), (week_bins, "Z")])
    assert rolling_evaluate(stream, "A").hits(5) == 0


def test_rolling_evaluate_no_lookahead():
    week_bins = 7 * DAY // 300
    base = [(0, "B"), (1, "C"), (2, "B"), (week_bins, "C"), (week_bins + 1, "B")]
    later = base + [(2 * week_bins + i, "D") for i in range(50)]
    r1 = rolling_evaluate(stream_from_partners(base), "A")
    r2 = rolling_evaluate(stream_from_partners(later), "A")
    assert r1.windows[0] == r2.windows[0]


def test_rolling_evaluate_bridge_flag():
    wb = 7 * DAY // 300
    partners = [(0, "B"), (1, "B"),
                (wb, "C"), (wb + 1, "B"), (wb + 2, "C"), (wb + 3, "B"),
                (2 * wb, "C")]
    stream = stream_from_partners(partners)
    # bridged row B: B->B 1, B->C 2, so C ranks first; unbridged row B ties and B wins
    assert rolling_evaluate(stream, "A").windows[1].hits[1] == 1
    assert rolling_evaluate(stream, "A", bridge=False).windows[1].hits[1] == 0


def test_evaluation_invariants():
    P = stay_matrix(0.7, 4)
    codes = gen_markov(P, 6000, seed=2).codes.tolist()
    stream = stream_from_partners([(b, f"p{c}") for b, c in enumerate(codes)])
    r = rolling_evaluate(stream, "A", window=2 * DAY)
    assert 0 <= r.overall_top1 <= r.overall_top5 <= 1
    assert r.hits(1) == sum(w.top1_hits for w in r.windows)
    assert r.hits(5) == sum(w.top5_hits for w in r.windows)
    assert rolling_evaluate(stream, "A", window=2 * DAY) == r


def test_state_first_seen_in_window_ranks_by_marginal():
    wb = 7 * DAY // 300
    partners = [(0, "B"), (1, "C"), (2, "C"), (wb, "D"), (wb + 1, "C")]
    result = rolling_evaluate(stream_from_partners(partners), "A")
    # D is unknown to the model; marginal targets put C first
    assert result.windows[0].hits == {1: 1, 5: 1}
