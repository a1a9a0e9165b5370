"""Graph encoding whose match answer is triangle existence."""

import itertools
import random

import pytest

from semre.baseline import match_dp
from semre.engine import match_semre
from semre.patterns import Refine, iter_nodes
from semre.triangle import (
    UndirectedGraph,
    binary_width,
    brute_force_triangle,
    encode_instance,
    encode_instance_binary,
    graph,
    read_edge_list,
)

K3 = graph(3, [(1, 2), (2, 3), (1, 3)])
PATH3 = graph(3, [(1, 2), (2, 3)])
C5 = graph(5, [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)])


def all_graphs(n):
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    for bits in range(2 ** len(pairs)):
        yield graph(n, [p for t, p in enumerate(pairs) if bits >> t & 1])


# ------------------------------------------------------------ graph basics


def test_graph_canonicalizes_edges():
    g = graph(3, [(3, 1), (1, 3), (2, 1)])
    assert g.edges == frozenset({(1, 3), (1, 2)})


def test_graph_rejects_self_loop():
    with pytest.raises(ValueError):
        graph(3, [(2, 2)])


def test_graph_rejects_out_of_range():
    with pytest.raises(ValueError):
        graph(3, [(1, 4)])


def test_brute_force_examples():
    assert brute_force_triangle(K3)
    assert not brute_force_triangle(PATH3)
    assert not brute_force_triangle(C5)
    # forests never contain triangles
    star5 = graph(5, [(1, k) for k in range(2, 6)])
    assert not brute_force_triangle(star5)


# --------------------------------------------------------------- encoding


def test_unary_string_format():
    _, w, _ = encode_instance(K3)
    assert w == "#11#22#33"


def test_binary_string_format():
    _, w, _ = encode_instance_binary(graph(2, []))
    assert w == "#00#11"
    assert binary_width(2) == 1
    assert binary_width(3) == 2
    assert binary_width(1) == 1


def test_pattern_nests_refinements():
    r, _, _ = encode_instance(K3)
    outer = [n for n in iter_nodes(r) if isinstance(n, Refine)]
    assert len(outer) == 3
    inner_of_outer = [
        n for n in iter_nodes(outer[0]) if isinstance(n, Refine) and n is not outer[0]
    ]
    assert len(inner_of_outer) == 2


def test_edge_oracle_checks_endpoints_only():
    _, _, oracle = encode_instance(K3)
    assert oracle.evaluate("E", "1#2")
    assert oracle.evaluate("E", "2#3")
    assert oracle.evaluate("E", "1xxxxx3")  # only endpoints inspected
    assert not oracle.evaluate("E", "")
    assert not oracle.evaluate("E", "#1")  # delimiter is not a vertex
    assert not oracle.evaluate("E", "11")  # no self-loops


def test_binary_oracle_decodes_blocks():
    _, _, oracle = encode_instance_binary(K3)  # width 2: 00, 01, 10
    assert oracle.evaluate("E", "00#01")
    assert oracle.evaluate("E", "01xxx10")
    assert not oracle.evaluate("E", "0")  # shorter than one block
    assert not oracle.evaluate("E", "11#00")  # 11 decodes past n=3
    assert not oracle.evaluate("E", "0##00")


def test_rejects_empty_graph():
    with pytest.raises(ValueError):
        encode_instance(graph(0, []))
    with pytest.raises(ValueError):
        encode_instance_binary(graph(0, []))


def test_unary_vertex_limit():
    with pytest.raises(ValueError):
        encode_instance(graph(95, []))


# ------------------------------------------------------------ correctness


def test_k3_and_path():
    for enc in (encode_instance, encode_instance_binary):
        r, w, oracle = enc(K3)
        assert match_semre(r, w, oracle)[0]
        r, w, oracle = enc(PATH3)
        assert not match_semre(r, w, oracle)[0]


def test_exhaustive_small_graphs():
    for n in range(1, 4):
        for g in all_graphs(n):
            want = brute_force_triangle(g)
            for enc in (encode_instance, encode_instance_binary):
                r, w, oracle = enc(g)
                assert match_semre(r, w, oracle)[0] == want, (n, g.edges)


def test_random_graphs_match_bruteforce():
    rng = random.Random(20260823)
    for _ in range(40):
        n = rng.randint(1, 10)
        pairs = list(itertools.combinations(range(1, n + 1), 2))
        g = graph(n, [p for p in pairs if rng.random() < 0.35])
        want = brute_force_triangle(g)
        for enc in (encode_instance, encode_instance_binary):
            r, w, oracle = enc(g)
            assert match_semre(r, w, oracle)[0] == want, (g.n, sorted(g.edges))


def test_encodings_agree_with_each_other():
    rng = random.Random(99)
    for _ in range(25):
        n = rng.randint(1, 10)
        pairs = list(itertools.combinations(range(1, n + 1), 2))
        g = graph(n, [p for p in pairs if rng.random() < 0.4])
        ru, wu, ou = encode_instance(g)
        rb, wb, ob = encode_instance_binary(g)
        assert match_semre(ru, wu, ou)[0] == match_semre(rb, wb, ob)[0]


def test_dp_baseline_agrees_on_reduction():
    for g in [K3, PATH3, C5, graph(4, [(1, 2), (2, 3), (3, 4), (1, 3)])]:
        r, w, oracle = encode_instance(g)
        assert match_dp(r, w, oracle)[0] == brute_force_triangle(g)


# ------------------------------------------------------------- edge lists


def test_read_edge_list(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("; a triangle plus a pendant vertex\n1 2\n2 3\n1 3\n3 4\n")
    g = read_edge_list(str(p))
    assert g.n == 4
    assert brute_force_triangle(g)


def test_read_edge_list_explicit_n(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("n 6\n1 2\n")
    g = read_edge_list(str(p))
    assert g.n == 6 and g.edges == frozenset({(1, 2)})


def test_read_edge_list_bad_line(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("1 2 3\n")
    with pytest.raises(ValueError):
        read_edge_list(str(p))
