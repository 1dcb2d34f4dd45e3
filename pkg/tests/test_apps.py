import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slfe import fixtures, oracles
from slfe.apps import (APP_NAMES, MAX, PageRank, SSSP, TunkRank, connected_components, guidance_for,
                       make_app, pagerank, run_app, sssp, tunkrank, widest_path)
from slfe.engine import EngineConfig
from slfe.graph import build_dual_csr
from slfe.rrg import generate_rrg


def rr_for(g, root=0):
    return generate_rrg(g, [root])


def random_dag(rng, max_vertices=64):
    n = int(rng.integers(1, max_vertices + 1))
    m = int(rng.integers(0, 3 * n + 1))
    a, b = rng.integers(0, n, m), rng.integers(0, n, m)
    keep = a < b
    w = rng.integers(1, 10, int(keep.sum())).astype(float)
    return build_dual_csr(list(zip(a[keep], b[keep], w)), n, weighted=True)


# ------------------------------------------------------------------ sssp

def test_sssp_sample(sample):
    assert sssp(sample, rr_for(sample), 0).tolist() == [0, 1, 2, 2, 3, 4]


def test_sssp_root_without_out_edges(sample):
    d = sssp(sample, rr_for(sample, 5), 5)
    assert d[5] == 0 and (d[:5] == MAX).all()


def test_sssp_no_edges():
    g = build_dual_csr([], 4)
    assert sssp(g, rr_for(g, 2), 2).tolist() == [MAX, MAX, 0.0, MAX]


@pytest.mark.parametrize("seed", range(100))
def test_sssp_random_dags_match_dijkstra(seed):
    g = random_dag(np.random.default_rng(seed))
    assert np.array_equal(sssp(g, rr_for(g), 0), oracles.dijkstra(g, 0))


# -------------------------------------------------------------------- cc

def test_cc_sample(sample):
    assert connected_components(sample, guidance_for("cc", sample)).tolist() == [0] * 6


def test_cc_two_disjoint_edges():
    g = build_dual_csr([(0, 1), (2, 3)])
    assert connected_components(g, guidance_for("cc", g)).tolist() == [0, 0, 2, 2]


def test_cc_direction_ignored():
    g = build_dual_csr([(3, 0), (2, 1), (1, 3)])
    assert connected_components(g, guidance_for("cc", g)).tolist() == [0, 0, 0, 0]


@pytest.mark.parametrize("seed", range(100))
def test_cc_random_match_union_find(seed):
    g = fixtures.random_graph(np.random.default_rng(seed), max_vertices=128)
    assert np.array_equal(connected_components(g, guidance_for("cc", g)), oracles.union_find_cc(g))


# -------------------------------------------------------------------- wp

def test_wp_sample(sample):
    w = widest_path(sample, rr_for(sample), 0)
    assert w.tolist() == [MAX, 1.0, 1.0, 2.0, 2.0, 1.0]


def test_wp_single_edge():
    g = build_dual_csr([(0, 1, 7.0)], weighted=True)
    assert widest_path(g, rr_for(g), 0)[1] == 7.0


@pytest.mark.parametrize("seed", range(60))
def test_wp_small_random_match_enumeration(seed):
    g = fixtures.random_graph(np.random.default_rng(seed), max_vertices=32, max_avg_degree=2)
    root = seed % g.num_vertices
    assert np.array_equal(widest_path(g, rr_for(g, root), root), oracles.widest_enumerate(g, root))


# -------------------------------------------------------------------- pr

def test_pr_two_cycle_symmetric():
    g = build_dual_csr([(0, 1), (1, 0)])
    r = pagerank(g, guidance_for("pr", g), max_iters=50)
    assert r[0] == r[1]


def test_pr_single_vertex_one_iteration():
    g = build_dual_csr([], 1)
    assert pagerank(g, guidance_for("pr", g), max_iters=1).tolist() == [0.15 + 0.85 * 1.0]


def test_pr_dangling_rank_undivided():
    g = build_dual_csr([(0, 1)])
    res = run_app(PageRank(), g, None, EngineConfig(rr=False, max_iters=1))
    # vertex 1 has no out-edges: its stored rank is not divided
    assert res.raw[1] == pytest.approx(0.15 + 0.85 * 0.5 / 1)
    assert res.raw[0] == pytest.approx((0.15 + 0.85 * 0.5) / 1)


@pytest.mark.parametrize("seed", range(40))
def test_pr_rr_within_tolerance(seed):
    g = fixtures.random_graph(np.random.default_rng(seed))
    on = pagerank(g, guidance_for("pr", g), max_iters=60)
    off = pagerank(g, guidance_for("pr", g), max_iters=60, config=EngineConfig(rr=False))
    assert np.abs(on - off).sum() <= 1e-3


# -------------------------------------------------------------------- tr

def test_tr_no_edges():
    g = build_dual_csr([], 3)
    assert tunkrank(g, guidance_for("tr", g), max_iters=5).tolist() == [0, 0, 0]


def test_tr_single_edge():
    g = build_dual_csr([(0, 1)])
    assert tunkrank(g, None, max_iters=1, config=EngineConfig(rr=False))[1] == 1.0


def test_tr_chain():
    g = build_dual_csr([(0, 1), (1, 2)])
    r = tunkrank(g, None, max_iters=10, config=EngineConfig(rr=False))
    assert r.tolist() == [0.0, 1.0, 1.5]


@pytest.mark.parametrize("seed", range(40))
def test_tr_rr_within_tolerance(seed):
    g = fixtures.random_graph(np.random.default_rng(seed))
    on = tunkrank(g, guidance_for("tr", g), max_iters=60)
    off = tunkrank(g, guidance_for("tr", g), max_iters=60, config=EngineConfig(rr=False))
    assert np.abs(on - off).sum() <= 1e-3


# ------------------------------------------------------------ properties

@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["sssp", "cc", "wp"]), st.booleans())
def test_minmax_histories_are_monotone(seed, name, rr):
    rng = np.random.default_rng(seed)
    g = fixtures.random_graph(rng, max_vertices=80)
    root = int(rng.integers(g.num_vertices))
    app = make_app(name, root)
    res = run_app(app, g, guidance_for(name, g, root), EngineConfig(rr=rr, record_values=True))
    hist = np.array([app.init(app.graph_for(g))[0]] + res.history)
    step = np.diff(hist, axis=0)
    assert (step >= 0).all() if name == "wp" else (step <= 0).all()


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["sssp", "cc", "wp"]))
def test_minmax_rr_invariance(seed, name):
    rng = np.random.default_rng(seed)
    g = fixtures.random_graph(rng)
    root = int(rng.integers(g.num_vertices))
    rr = guidance_for(name, g, root)
    on = run_app(make_app(name, root), g, rr, EngineConfig())
    off = run_app(make_app(name, root), g, rr, EngineConfig(rr=False))
    assert np.array_equal(on.values, off.values)


def test_make_app_names():
    assert APP_NAMES == ("sssp", "cc", "wp", "pr", "tr")
    assert isinstance(make_app("sssp", 3), SSSP) and make_app("sssp", 3).root == 3
    assert isinstance(make_app("tr", p=0.25), TunkRank)
    with pytest.raises(ValueError):
        make_app("bfs")


def test_guidance_sources_per_family(sample):
    assert guidance_for("sssp", sample, 3).sources == (3,)
    assert guidance_for("pr", sample).sources == (0,)
    # CC propagates over the symmetrized graph
    assert guidance_for("cc", sample).fingerprint == sample.symmetrized().fingerprint()
