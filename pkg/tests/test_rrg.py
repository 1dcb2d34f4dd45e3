import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slfe.errors import GuidanceFormatError, StaleGuidanceError, VertexError
from slfe.fixtures import random_graph
from slfe.graph import build_dual_csr
from slfe.rrg import RRGuidance, default_sources, generate_rrg, load_rrg, make_sources, rrg_oracle, save_rrg


def test_sample_guidance(sample):
    r = generate_rrg(sample, [0])
    assert r.last_iter.tolist() == [0, 1, 2, 1, 3, 3]
    assert r.visited.all()
    assert r == rrg_oracle(sample, [0])


def test_single_vertex():
    r = generate_rrg(build_dual_csr([], 1), [0])
    assert r.records() == [(True, 0)]


def test_two_cycle():
    r = generate_rrg(build_dual_csr([(0, 1), (1, 0)]), [0])
    assert r.records() == [(True, 2), (True, 1)]


def test_star_and_path():
    star = build_dual_csr([(0, i) for i in range(1, 6)])
    assert rrg_oracle(star, [0]).last_iter.tolist() == [0, 1, 1, 1, 1, 1]
    path = build_dual_csr([(0, 1), (1, 2), (2, 3)])
    assert rrg_oracle(path, [0]).last_iter.tolist() == [0, 1, 2, 3]
    assert generate_rrg(path, [0]).last_iter.tolist() == [0, 1, 2, 3]


def test_unreachable_vertices_stay_zero():
    g = build_dual_csr([(0, 1), (2, 3)])
    r = generate_rrg(g, [0])
    assert r.visited.tolist() == [True, True, False, False]
    assert r.last_iter.tolist() == [0, 1, 0, 0]


def test_multiple_sources():
    g = build_dual_csr([(0, 2), (1, 2), (2, 3), (1, 3)])
    assert generate_rrg(g, [0, 1]) == rrg_oracle(g, [0, 1])


@pytest.mark.parametrize("sources", [[9], [0, 0], []])
def test_bad_sources(sample, sources):
    with pytest.raises(VertexError):
        generate_rrg(sample, sources)


def test_default_sources():
    assert default_sources(build_dual_csr([(0, 1), (2, 1)])) == (0, 2)
    assert default_sources(build_dual_csr([(0, 1), (1, 0)])) == (0,)
    assert default_sources(build_dual_csr([], 0)) == ()


def test_default_sources_reproducible(sample):
    assert generate_rrg(sample, default_sources(sample)) == generate_rrg(sample, default_sources(sample))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_matches_oracle_on_random_graphs(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, max_vertices=64)
    k = min(int(rng.integers(1, 4)), g.num_vertices)
    sources = make_sources(g, rng.choice(g.num_vertices, size=k, replace=False))
    r = generate_rrg(g, sources)
    assert r == rrg_oracle(g, sources)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_structural_invariants(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, max_vertices=64)
    root = int(rng.integers(g.num_vertices))
    r = generate_rrg(g, [root])
    levels = r.stats["levels"]
    reachable_non_sources = int(r.visited.sum()) - 1
    # one distance assignment per reachable non-source vertex
    assert r.stats["assignments"] == reachable_non_sources
    assert r.last_iter.max() <= r.stats["rounds"]
    assert r.stats["rounds"] <= levels.max() + 1
    # last_iter is positive exactly for vertices with a reachable in-neighbor
    for v in range(g.num_vertices):
        heard = any(r.visited[u] for u in g.in_neighbors(v).tolist())
        assert (r.last_iter[v] > 0) == heard
        assert r.visited[v] == (levels[v] >= 0)


def test_save_load_round_trip(tmp_path, sample):
    r = generate_rrg(sample, [0])
    path = tmp_path / "g.rrg"
    save_rrg(path, r)
    back = load_rrg(path, sample)
    assert back == r
    assert back.records() == r.records()
    assert path.read_bytes()[:8] == b"SLFERRG1"


def test_load_against_other_graph(tmp_path, sample):
    path = tmp_path / "g.rrg"
    save_rrg(path, generate_rrg(sample, [0]))
    other = build_dual_csr([(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)])
    with pytest.raises(StaleGuidanceError):
        load_rrg(path, other)


def test_empty_guidance_round_trip(tmp_path):
    g = build_dual_csr([], 0)
    r = RRGuidance.empty(g)
    save_rrg(tmp_path / "e.rrg", r)
    assert load_rrg(tmp_path / "e.rrg", g) == r


@pytest.mark.parametrize("mangle", [
    lambda b: b[:10],
    lambda b: b"XXXXXXXX" + b[8:],
    lambda b: b[:-1],
    lambda b: b + b"\x00",
])
def test_corrupt_files(tmp_path, sample, mangle):
    path = tmp_path / "g.rrg"
    save_rrg(path, generate_rrg(sample, [0]))
    path.write_bytes(mangle(path.read_bytes()))
    with pytest.raises(GuidanceFormatError):
        load_rrg(path)
