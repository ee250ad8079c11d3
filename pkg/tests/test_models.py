import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from seymour import models
from seymour.graph import Tournament, seymour_set
from seymour.models import ModelParams, gen_digraph, gen_tournament, generate, parse_probability, rng_stream

# frozen outputs of the documented stream construction (Philox keyed by SeedSequence)
GOLDEN_T10 = "10\n0111111100\n0000110111\n0100010000\n0110010111\n0011010101\n0000001101\n0111100010\n0010001001\n1010110101\n1010001000\n"
GOLDEN_D6 = "6\n000001\n000000\n100000\n101000\n111000\n001000\n"


def test_golden_streams():
    assert gen_tournament(10, rng_stream(42, 0)).to_text() == GOLDEN_T10
    assert gen_digraph(6, "0.3", rng_stream(42, 3)).to_text() == GOLDEN_D6


def test_same_key_same_graph_different_key_different_graph():
    a = gen_tournament(40, rng_stream(7, 3))
    assert a == gen_tournament(40, rng_stream(7, 3))
    assert a != gen_tournament(40, rng_stream(7, 4))
    assert a != gen_tournament(40, rng_stream(8, 3))


def test_single_vertex():
    t = gen_tournament(1, rng_stream(0, 0))
    assert t.n == 1 and t.arc_count() == 0


def test_p_zero_is_empty_and_half_is_tournament():
    assert gen_digraph(30, 0, rng_stream(1, 0)).arc_count() == 0
    g = gen_digraph(30, "1/2", rng_stream(1, 0))
    Tournament.from_digraph(g)  # validates
    # p = 1/2 consumes the stream exactly like the tournament generator
    assert g == gen_tournament(30, rng_stream(1, 0))


@pytest.mark.parametrize("bad", ["0.51", "1", "-0.1", 0.75])
def test_rejects_p_above_half(bad):
    with pytest.raises(ValueError):
        gen_digraph(5, bad, rng_stream(0, 0))


def test_rejects_n_zero():
    with pytest.raises(ValueError):
        gen_tournament(0, rng_stream(0, 0))
    with pytest.raises(ValueError):
        gen_digraph(0, "0.1", rng_stream(0, 0))
    with pytest.raises(ValueError):
        ModelParams(0)


def test_parse_probability():
    assert parse_probability("0.3") == Fraction(3, 10)
    assert parse_probability("3/10") == Fraction(3, 10)
    assert parse_probability(0.3) == Fraction(3, 10)
    with pytest.raises(ValueError):
        parse_probability("abc")


def test_block_boundaries_do_not_change_the_graph(monkeypatch):
    ref = gen_digraph(90, "0.3", rng_stream(5, 5))
    monkeypatch.setattr(models, "_BLOCK", 100)
    assert gen_digraph(90, "0.3", rng_stream(5, 5)) == ref


def test_generate_dispatch():
    assert isinstance(generate(ModelParams(8, None, 3), 2), Tournament)
    assert generate(ModelParams(8, "0.2", 3), 2) == gen_digraph(8, "0.2", rng_stream(3, 2))


def test_n3_tournaments_uniform():
    pairs = list(itertools.combinations(range(3), 2))
    counts = {}
    trials = 8000
    for t in range(trials):
        m = gen_tournament(3, rng_stream(11, t)).to_matrix()
        key = tuple(bool(m[i, j]) for i, j in pairs)
        counts[key] = counts.get(key, 0) + 1
    assert len(counts) == 8
    sigma = np.sqrt(trials * (1 / 8) * (7 / 8))
    for c in counts.values():
        assert abs(c - trials / 8) <= 3 * sigma
    assert stats.chisquare(list(counts.values())).pvalue > 1e-3


def test_digraph_pair_frequencies():
    n, p, trials = 100, 0.3, 200
    iu = np.triu_indices(n, 1)
    fwd = back = arcs = 0
    for t in range(trials):
        m = gen_digraph(n, "0.3", rng_stream(12, t)).to_matrix()
        fwd += m[iu].sum()
        back += m.T[iu].sum()
    arcs = fwd + back
    pairs = trials * len(iu[0])
    for observed, prob in [(fwd, p), (back, p), (pairs - arcs, 1 - 2 * p)]:
        sigma = np.sqrt(pairs * prob * (1 - prob))
        assert abs(observed - pairs * prob) <= 3 * sigma
    assert abs(arcs / trials - 2970) <= 3 * np.sqrt(4950 * 0.6 * 0.4) / np.sqrt(trials)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 140), st.sampled_from(["0", "0.1", "1/3", "0.45", "1/2"]), st.integers(0, 2**40))
def test_no_antiparallel_pairs(n, p, seed):
    g = gen_digraph(n, p, rng_stream(seed, 0))
    m = g.to_matrix()
    assert not np.any(m & m.T)
    assert not np.any(np.diag(m))


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 140), st.integers(0, 2**40))
def test_generated_tournaments_valid(n, seed):
    t = gen_tournament(n, rng_stream(seed, 9))
    Tournament.from_digraph(t)


def test_adjacent_trials_uncorrelated():
    s = np.array([len(seymour_set(gen_tournament(20, rng_stream(3, t)))) for t in range(3000)])
    r = np.corrcoef(s[:-1], s[1:])[0, 1]
    assert abs(r) < 4 / np.sqrt(len(s))
