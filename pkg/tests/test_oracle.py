import pytest

from ordsep.action_graph import element_order
from ordsep.amalgam import AmalgamPresentation, AmalgamWord, parse_amalgam_word
from ordsep.errors import CapExceeded
from ordsep.oracle import (
    enumerate_amalgam_homs,
    enumerate_free_homs,
    hom_order,
    hom_to_quotient,
    oracle_consistency,
    oracle_separate,
)
from ordsep.surgery import exact_order_quotient
from ordsep.words import Basis, parse_word

X = Basis(("x",))
XY = Basis(("x", "y"))
A = Basis(("x", "y"))
B = Basis(("s", "t"))
PRES = AmalgamPresentation(A, B, parse_word("x", A), parse_word("s", B))


def w(text, basis=XY):
    return parse_word(text, basis)


def aw(text):
    return parse_amalgam_word(text, PRES)


def test_enumeration_counts():
    assert sum(1 for _ in enumerate_free_homs(1, 2)) == 2
    assert sum(1 for _ in enumerate_free_homs(2, 2)) == 4
    assert sum(1 for _ in enumerate_free_homs(2, 3)) == 36
    for rank, n in ((1, 3), (2, 2), (3, 2)):
        from math import factorial

        assert sum(1 for _ in enumerate_free_homs(rank, n)) == factorial(n) ** rank


def test_enumeration_cap():
    with pytest.raises(CapExceeded):
        list(enumerate_free_homs(1, 6))
    with pytest.raises(CapExceeded):
        oracle_separate(w("x"), w("y"), XY, 6)


def test_enumeration_deterministic_order():
    first = list(enumerate_free_homs(2, 2))
    assert first[0] == (((0, 1), (0, 1)))
    assert first == list(enumerate_free_homs(2, 2))


def test_amalgam_enumeration_filter():
    homs = list(enumerate_amalgam_homs(PRES, 2))
    # the x = s constraint pins one of four axes
    assert len(homs) == 8
    a_word = w("x", A)
    for hom in homs:
        xa = hom[0]
        sb = hom[2]
        assert xa == sb


def test_oracle_separate_power_pair():
    # a transposition already separates x from x^2 (orders 2 vs 1)
    found = oracle_separate(w("x", X), w("x x", X), X, 5)
    assert found is not None
    n, hom = found
    assert n == 2
    assert hom["x"] == (1, 0)
    # cross-check with the plain enumerator
    for degree in (1,):
        for images in enumerate_free_homs(1, degree):
            assert hom_order(images, w("x", X)) == hom_order(images, w("x x", X))


def test_oracle_separate_two_generators():
    found = oracle_separate(w("x"), w("y"), XY, 5)
    assert found is not None
    n, hom = found
    assert n == 2
    assert hom_order((hom["x"], hom["y"]), w("x")) != hom_order(
        (hom["x"], hom["y"]), w("y")
    )


def test_oracle_separate_conjugates_none():
    assert oracle_separate(w("x y"), w("y x"), XY, 4) is None


def test_oracle_matches_plain_enumeration_order():
    # the vectorized scan must report the first hom the generator would
    found = oracle_separate(w("x", X), w("x x x", X), X, 5)
    by_hand = None
    for n in range(1, 6):
        for images in enumerate_free_homs(1, n):
            if hom_order(images, w("x", X)) != hom_order(images, w("x x x", X)):
                by_hand = (n, images[0])
                break
        if by_hand:
            break
    assert found is not None and by_hand is not None
    assert found[0] == by_hand[0]
    assert found[1]["x"] == by_hand[1]


def test_oracle_amalgam_separable_pair():
    found = oracle_separate(aw("A:{y} B:{t}"), aw("A:{y y}"), PRES, 4)
    assert found is not None
    n, hom = found
    images = tuple(hom[name] for name in ("x", "y", "s", "t"))
    assert hom["x"] == hom["s"]


def test_oracle_amalgam_rotation_none():
    u = aw("A:{y} B:{t} A:{y y} B:{t}")
    v = AmalgamWord(u.syllables[2:] + u.syllables[:2])
    assert oracle_separate(u, v, PRES, 4) is None


def test_oracle_consistency_on_engine_output():
    from ordsep.amalgam_graph import separate_orders

    u, v = aw("A:{y}"), aw("A:{y y}")
    res = separate_orders(u, v, PRES)
    assert oracle_consistency(res.quotient, u, v) == "ok"

    tampered = res.quotient
    key = next(iter(tampered.witness_orders))
    tampered.witness_orders[key] += 1
    assert oracle_consistency(tampered, u, v) == "mismatch"


def test_oracle_consistency_equal_orders_mismatch():
    q = exact_order_quotient(w("x"), 4)
    q.witness_orders = {"x": 4, "y": 4}
    assert oracle_consistency(q, w("x"), w("y")) == "mismatch"


def test_hom_to_quotient_round_trip():
    found = oracle_separate(w("x"), w("y"), XY, 3)
    n, hom = found
    q = hom_to_quotient(XY, hom, witnesses=[w("x"), w("y")])
    assert q.graph.degree == n
    assert q.check_witnesses()
    assert element_order(q.graph, w("x")) != element_order(q.graph, w("y"))
