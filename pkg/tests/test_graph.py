import json
import random

import numpy as np
import pytest

from crosscomm.errors import ParseError
from crosscomm.graph import (EdgeRecord, Graph, VertexKind, graphs_equal,
                             ingest_edge_list_file, ingest_edge_lists,
                             left_normalize, read_edge_list_tsv)


def test_ingest_sums_counts_across_edge_types():
    g = ingest_edge_lists([EdgeRecord("a", "b", "mention", 2),
                           EdgeRecord("b", "a", "retweet", 3)])
    assert g.n == 2
    assert list(g.edges()) == [(0, 1, 5.0)]


def test_ingest_empty_stream_gives_empty_graph():
    g = ingest_edge_lists([])
    assert g.n == 0
    assert g.num_edges == 0


def test_ingest_hashtag_kind_from_prefix():
    g = ingest_edge_lists([EdgeRecord("a", "#x", "mention", 1)])
    assert g.kinds[g.vertex_id("#x")] == VertexKind.HASHTAG
    assert g.kinds[g.vertex_id("a")] == VertexKind.USER
    assert list(g.edges())[0][2] == 1.0


def test_ingest_order_independent():
    records = [EdgeRecord("a", "b", "t1", 1), EdgeRecord("c", "a", "t2", 4),
               EdgeRecord("b", "c", "t1", 2), EdgeRecord("b", "a", "t3", 7),
               EdgeRecord("d", "d", "t1", 3)]
    g_ref = ingest_edge_lists(records)
    rng = random.Random(5)
    for _ in range(5):
        shuffled = records[:]
        rng.shuffle(shuffled)
        g = ingest_edge_lists(shuffled)
        assert g.labels == g_ref.labels
        assert graphs_equal(g, g_ref)


def test_ingest_rejects_bad_count():
    with pytest.raises(ParseError):
        ingest_edge_lists([EdgeRecord("a", "b", "t", 0)])


def test_strength_path_and_isolated():
    g = Graph.from_weighted_edges({("a", "b"): 2.0}, extra_labels=["z"])
    assert g.strength(g.vertex_id("a")) == 2.0
    assert g.strength(g.vertex_id("z")) == 0.0


def test_strength_triangle():
    g = Graph.from_weighted_edges({("a", "b"): 1.0, ("b", "c"): 2.0, ("a", "c"): 3.0})
    # vertex incident to the 1- and 2-edges
    assert g.strength(g.vertex_id("b")) == 3.0


def test_strength_counts_self_loop_twice():
    g = Graph.from_weighted_edges({("a", "a"): 2.0, ("a", "b"): 1.0})
    assert g.strength(g.vertex_id("a")) == 5.0
    # total strength is twice the total edge weight
    assert sum(g.strength(v) for v in range(g.n)) == pytest.approx(2 * g.total_weight)


def test_strength_out_of_range():
    g = Graph.from_weighted_edges({("a", "b"): 1.0})
    with pytest.raises(IndexError):
        g.strength(2)


def test_left_normalize_star():
    g = Graph.from_weighted_edges({("c", "x"): 1.0, ("c", "y"): 1.0, ("c", "z"): 1.0})
    P, dangling = left_normalize(g)
    c = g.vertex_id("c")
    for leaf in "xyz":
        assert P[c, g.vertex_id(leaf)] == pytest.approx(1 / 3)
    assert not dangling.any()


def test_left_normalize_weighted_row():
    g = Graph.from_weighted_edges({("a", "b"): 1.0, ("a", "c"): 3.0})
    P, _ = left_normalize(g)
    assert P[g.vertex_id("a"), g.vertex_id("c")] == 0.75


def test_left_normalize_flags_isolated_vertex_dangling():
    g = Graph.from_weighted_edges({("a", "b"): 1.0}, extra_labels=["lonely"])
    P, dangling = left_normalize(g)
    v = g.vertex_id("lonely")
    assert dangling[v]
    assert P[v].nnz == 0


def test_left_normalize_rows_sum_to_one():
    rng = np.random.default_rng(3)
    weighted = {}
    labels = [f"v{i}" for i in range(40)]
    for _ in range(120):
        a, b = rng.choice(40, size=2)
        weighted[(labels[a], labels[b])] = float(rng.uniform(0.1, 5.0))
    g = Graph.from_weighted_edges(weighted, extra_labels=labels)
    P, dangling = left_normalize(g)
    sums = np.asarray(P.sum(axis=1)).ravel()
    assert np.all(np.abs(sums[~dangling] - 1.0) <= 1e-12)


def test_tsv_parsing_and_comments(tmp_path):
    path = tmp_path / "edges.tsv"
    path.write_text("// a comment line\n"
                    "a\tb\tmention\t2\n"
                    "#x\ta\tmention\t1\n"  # hashtag label, not a comment
                    "b\ta\tretweet\t3\n",
                    encoding="utf-8")
    g = ingest_edge_list_file(path)
    assert g.has_label("#x")
    ab = tuple(sorted((g.vertex_id("a"), g.vertex_id("b"))))
    weights = {(u, v): w for u, v, w in g.edges()}
    assert weights[ab] == 5.0


@pytest.mark.parametrize("line,msg_part", [
    ("a\tb\tmention", "4 tab-separated"),
    ("a\tb\tmention\tx", "not an integer"),
    ("a\tb\tmention\t0", ">= 1"),
    ("a\t\tmention\t1", "empty vertex label"),
])
def test_tsv_parse_errors_carry_line_number(tmp_path, line, msg_part):
    path = tmp_path / "bad.tsv"
    path.write_text("a\tb\tok\t1\n" + line + "\n", encoding="utf-8")
    with pytest.raises(ParseError) as err:
        list(read_edge_list_tsv(path))
    assert "line 2" in str(err.value)
    assert msg_part in str(err.value)


def test_json_round_trip_idempotent(tmp_path):
    g = ingest_edge_lists([EdgeRecord("a", "#t", "m", 2), EdgeRecord("b", "a", "r", 1),
                           EdgeRecord("c", "c", "m", 4)])
    path = tmp_path / "g.json"
    g.save(path)
    g2 = Graph.load(path)
    assert graphs_equal(g, g2)
    assert g2.to_json_obj() == g.to_json_obj()
    first = path.read_text()
    g2.save(path)
    assert path.read_text() == first


def test_json_shape(tmp_path):
    g = ingest_edge_lists([EdgeRecord("a", "#t", "m", 2)])
    obj = g.to_json_obj()
    assert set(obj) == {"vertices", "edges"}
    assert obj["vertices"][0].keys() == {"label", "kind"}
    assert json.dumps(obj)  # serializable


def test_induced_subgraph_keeps_weights():
    g = Graph.from_weighted_edges({("a", "b"): 2.0, ("b", "c"): 1.0, ("a", "c"): 5.0})
    sub = g.induced_subgraph(["a", "b"])
    assert sub.n == 2
    assert list(sub.edges()) == [(0, 1, 2.0)]
