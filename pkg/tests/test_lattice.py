import itertools
import json

import pytest

from leeyang.lattice import (
    CapExceeded,
    SpinDomain,
    box_edge_count,
    make_box,
    make_rectangle,
    nested_boxes,
)


def brute_edges(verts):
    # all unordered pairs at L1 distance one
    return sum(1 for a, b in itertools.combinations(verts, 2) if sum(abs(x - y) for x, y in zip(a, b)) == 1)


@pytest.mark.parametrize("sides", [[1], [5], [2, 3], [4, 4], [2, 3, 4], [1, 1, 6]])
def test_edge_count_matches_pair_scan(sides):
    dom = make_rectangle(len(sides), sides)
    assert len(dom.edges) == brute_edges(dom.vertices) == box_edge_count(sides)


def test_box_sizes():
    assert make_box(1, 0).num_sites == 1
    assert make_box(2, 1).num_sites == 9
    assert make_box(3, 1).num_sites == 27
    assert len(make_box(2, 3).edges) == 2 * 7 * 6


def test_box_is_centred():
    dom = make_box(2, 2)
    assert dom.vertices[0] == (-2, -2) and dom.vertices[-1] == (2, 2)
    assert dom.side_lengths() == [5, 5]


def test_nested_boxes_are_nested():
    boxes = nested_boxes(2, 3)
    assert [b.num_sites for b in boxes] == [9, 25, 49]
    for small, big in zip(boxes, boxes[1:]):
        assert big.contains(small) and not small.contains(big)


def test_vertex_order_is_canonical():
    a = SpinDomain(2, ((1, 0), (0, 0), (0, 1)))
    b = SpinDomain(2, ((0, 1), (1, 0), (0, 0)))
    assert a == b and a.edges == b.edges
    assert a.index_of((0, 1)) == 1


def test_non_box_has_no_sides():
    ell = SpinDomain(2, ((0, 0), (1, 0), (0, 1)))
    assert ell.side_lengths() is None
    assert len(ell.edges) == 2


def test_bad_input():
    with pytest.raises(ValueError):
        SpinDomain(2, ((0, 0), (0, 0)))
    with pytest.raises(ValueError):
        SpinDomain(2, ((0, 0, 0),))
    with pytest.raises(ValueError):
        SpinDomain(1, ())
    with pytest.raises(ValueError):
        make_rectangle(2, [3])


def test_size_cap():
    with pytest.raises(CapExceeded) as info:
        make_box(2, 10, size_cap=100)
    assert info.value.required == 441 and info.value.cap == 100


def test_json_round_trip():
    dom = make_rectangle(2, [2, 3])
    back = SpinDomain.from_dict(json.loads(dom.to_json()))
    assert back == dom and back.edges == dom.edges


def test_edge_list_is_checked_on_load():
    data = make_rectangle(1, [3]).to_dict()
    data["edges"] = [[0, 2]]
    with pytest.raises(ValueError):
        SpinDomain.from_dict(data)


@pytest.mark.parametrize("dom", [make_box(2, 1), make_rectangle(3, [1, 2, 2]), SpinDomain(2, ((0, 0), (2, 1)))])
def test_description_round_trip(dom):
    assert SpinDomain.from_description(dom.describe()) == dom
