from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wgl.sort_ops import (
    ComponentBoundError,
    FinSeq,
    GraphInstance,
    SortGraph,
    decode,
    encode,
    fcc_to_sort,
    product_recombine,
    product_translate,
    rationals01,
    restore_zeros,
    sort_d,
    sort_via_fcc,
    strip_zeros_decrement,
    u_partial_sort,
    xc1_via_sort,
)


@st.composite
def finseqs(draw, d=None, min_d=1, max_d=5, tail_nonzero=False):
    d = d or draw(st.integers(min_value=max(min_d, 2 if tail_nonzero else 1), max_value=max_d))
    prefix = draw(st.lists(st.integers(0, d - 1), max_size=20))
    tail = draw(st.integers(1 if tail_nonzero else 0, d - 1))
    return FinSeq(d, tuple(prefix), tail)


def naive_sort(x: FinSeq) -> FinSeq:
    """Sort a long window and read the answer off it."""
    window = x.take(len(x.prefix) + 1)
    finite = sorted(s for s in window[:-1] if s < x.tail)
    return FinSeq(x.d, tuple(finite), x.tail)


def test_examples():
    assert encode(sort_d(decode("0110|1", 2))) == "00|1"
    assert encode(sort_d(decode("2102|2", 3))) == "01|2"
    assert encode(sort_d(decode("|0", 2))) == "|0"
    assert u_partial_sort((2, 1, 0, 2, 1), 2) == (0, 1, 1)
    assert u_partial_sort((2, 1, 0, 2), 2) == (0, 1)
    assert u_partial_sort((1, 2, 3), 0) == ()
    assert u_partial_sort((0, 0, 0), 1) == (0, 0, 0)


def test_finseq_normalises_tail():
    assert FinSeq(2, (0, 1, 1), 1) == FinSeq(2, (0,), 1)
    assert FinSeq(2, (0, 1, 1), 1)[5] == 1
    with pytest.raises(ValueError):
        FinSeq(2, (2,), 0)
    with pytest.raises(ValueError):
        FinSeq(2, (), 2)


def test_text_encoding():
    x = FinSeq(12, (11, 3, 0), 5)
    assert encode(x) == "11,3,0|5"
    assert decode(encode(x), 12) == x
    with pytest.raises(ValueError):
        decode("01", 2)
    with pytest.raises(ValueError):
        decode("0a|1", 2)


@given(finseqs())
def test_sort_matches_naive(x):
    assert sort_d(x) == naive_sort(x)


@given(finseqs())
def test_sort_idempotent_monotone_counts(x):
    y = sort_d(x)
    assert sort_d(y) == y
    window = y.take(len(y.prefix) + 3)
    assert list(window) == sorted(window)
    cx, cy = Counter(x.prefix), Counter(y.prefix)
    for s in range(x.tail):
        assert cx[s] == cy[s]


def test_strip_examples():
    y, z = strip_zeros_decrement(decode("0101|1", 2))
    assert (encode(y), z) == ("|0", 2)
    y, z = strip_zeros_decrement(decode("2012|2", 3))
    assert (encode(y), z) == ("10|1", 1)  # "101|1" with the trailing tail symbol folded in
    with pytest.raises(ValueError):
        strip_zeros_decrement(decode("01|0", 2))


@given(finseqs(tail_nonzero=True))
def test_strip_round_trip(x):
    y, zeros = strip_zeros_decrement(x)
    assert restore_zeros(sort_d(y), zeros) == sort_d(x)


@given(finseqs(d=2))
def test_sort_via_fcc(x):
    assert sort_via_fcc(x) == sort_d(x)
    assert sort_via_fcc(x, pick_zero=False) == sort_d(x)


def test_sort_via_fcc_examples():
    assert encode(sort_via_fcc(decode("0110|1", 2))) == "00|1"
    assert encode(sort_via_fcc(decode("|1", 2))) == "|1"
    assert encode(sort_via_fcc(decode("|0", 2))) == "|0"


def test_sort_graph_has_two_components_for_tail_one():
    g = SortGraph(decode("0110|1", 2))
    comp = g.component(0)
    assert g.pending not in comp
    assert all(v % 2 == 1 or v in comp or v == g.pending for v in range(1, 2 * g.horizon))


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(st.just(n), finseqs(d=n + 1))))
def test_product_recombination(nx):
    n, x = nx
    parts = product_translate(n, x)
    assert len(parts) == n and all(p.d == 2 for p in parts)
    assert product_recombine([sort_d(p) for p in parts]) == sort_d(x)


def test_product_examples():
    x = decode("0110|1", 2)
    assert product_recombine([sort_d(p) for p in product_translate(1, x)]) == sort_d(x)
    x = decode("2102|2", 3)
    assert encode(product_recombine([sort_d(p) for p in product_translate(2, x)])) == "01|2"
    with pytest.raises(ValueError):
        product_translate(3, x)


# -- connected components ------------------------------------------------------


def _find_all(g: GraphInstance) -> dict[int, int]:
    parent = {v: v for v in g.active}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in g.edges:
        parent[find(a)] = find(b)
    return {v: find(v) for v in g.active}


def union_find(g: GraphInstance) -> dict[int, bool]:
    roots = _find_all(g)
    return {v: roots[v] == roots[0] for v in sorted(g.active)}


@st.composite
def graphs(draw):
    n = draw(st.integers(2, 4))
    size = draw(st.integers(1, 9))
    active = {0} | {v for v in range(size) if draw(st.booleans())}
    vs = sorted(active)
    pairs = [(a, b) for i, a in enumerate(vs) for b in vs[i + 1:]]
    edges = {p for p in pairs if draw(st.integers(0, 9)) < 3}
    return GraphInstance(size, frozenset(active), frozenset(edges), n)


@settings(max_examples=300)
@given(graphs())
def test_fcc_matches_union_find(g):
    components = len(set(_find_all(g).values()))
    if components > g.bound:
        with pytest.raises(ComponentBoundError):
            fcc_to_sort(g)
        return
    q, dec = fcc_to_sort(g)
    assert q.d == g.bound
    assert dec(sort_d(q)) == union_find(g)


def test_fcc_examples():
    path = GraphInstance(5, frozenset(range(5)), frozenset((i, i + 1) for i in range(4)), 2)
    q, dec = fcc_to_sort(path)
    # no independent pair ever appears, so symbol 0 recurs forever
    assert encode(q) == "|0"
    assert all(dec(sort_d(q)).values())
    two = GraphInstance.from_edge_list("size 4\nbound 2\n0 1\n2 3\n")
    q, dec = fcc_to_sort(two)
    assert dec(sort_d(q)) == {0: True, 1: True, 2: False, 3: False}
    with pytest.raises(ComponentBoundError):
        fcc_to_sort(GraphInstance.from_edge_list("size 3\nbound 2\n"))


def test_edge_list_format():
    g = GraphInstance.from_edge_list("# demo\nsize 5\nbound 3\nactive 0 1 2 4\n0 1\n4 2\n")
    assert g.active == frozenset({0, 1, 2, 4}) and g.edges == frozenset({(0, 1), (2, 4)})
    assert GraphInstance.from_edge_list(g.to_edge_list()) == g
    with pytest.raises(ValueError):
        GraphInstance.from_edge_list("size 2\n0 1\n")
    with pytest.raises(ValueError):
        GraphInstance.from_edge_list("size 3\nbound 2\nactive 0 1\n1 2\n")
    with pytest.raises(ValueError):
        GraphInstance.from_edge_list("size 3\nbound 2\n0 1 2\n")


# -- convex choice in one dimension --------------------------------------------


def test_rationals_enumeration():
    it = iter(rationals01())
    first = [next(it) for _ in range(7)]
    assert first == [0, 1, Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(1, 4),
                     Fraction(3, 4)]
    it = iter(rationals01())
    many = [next(it) for _ in range(500)]
    assert len(set(many)) == 500


def test_xc1_rational_singleton_pins():
    third = (Fraction(1, 3), Fraction(1, 3))
    q, dec = xc1_via_sort([third] * 6)
    pts = dec(sort_d(q))
    assert pts[-1] == Fraction(1, 3)
    assert all(p == Fraction(1, 3) for p in pts)


def test_xc1_full_interval():
    q, dec = xc1_via_sort([(0, 1)] * 3)
    assert all(0 <= p <= 1 for p in dec(sort_d(q)))


def test_xc1_irrational_nest():
    r = math.sqrt(2) - 1
    ivs = []
    for s in range(10):
        a = Fraction(math.floor(r * 3 ** s), 3 ** s)
        ivs.append((a, a + Fraction(1, 3 ** s)))
    q, dec = xc1_via_sort(ivs)
    pts = dec(sort_d(q))
    for p, (a, b) in zip(pts, ivs):
        assert a <= p <= b
    a_d, b_d = ivs[-1]
    assert abs(pts[-1] - a_d) <= b_d - a_d


@given(st.lists(st.tuples(st.fractions(0, 1, max_denominator=12),
                          st.fractions(0, 1, max_denominator=12)), min_size=1, max_size=6))
def test_xc1_random_nests(pairs):
    ivs = []
    lo, hi = Fraction(0), Fraction(1)
    for a, b in pairs:
        a, b = sorted((a, b))
        lo, hi = max(lo, min(a, hi)), min(hi, max(b, lo))
        ivs.append((lo, hi))
    q, dec = xc1_via_sort(ivs)
    for p, (a, b) in zip(dec(sort_d(q)), ivs):
        assert a <= p <= b


def test_xc1_rejects_non_nested():
    with pytest.raises(ValueError):
        xc1_via_sort([(0, Fraction(1, 2)), (Fraction(1, 4), 1)])
    with pytest.raises(ValueError):
        xc1_via_sort([])
