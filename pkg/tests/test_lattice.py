import itertools
import json
from fractions import Fraction as F

import pytest

from novelty_oracle.lattice import NOVELTY, DrawSequence, build_lattice
from novelty_oracle.rules import DeMorgan, Kuipers, TwoParameter
from oracles import two_param_predictive


def seqs(max_len, alphabet="abcd"):
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)


@pytest.fixture
def fig():
    return build_lattice(DrawSequence.parse("r,b"), TwoParameter(0.5, 1))


def test_two_draw_lattice_shape(fig):
    assert [s.name for s in fig.spaces] == ["{•}", "{r,•}", "{b,•}", "{r,b,•}"]
    assert [s.origin for s in fig.spaces] == ["realized", "realized", "counterfactual", "realized"]
    assert fig.to_graph_text() == (
        '"{•}" -> "{r,•}"\n"{•}" -> "{b,•}"\n"{r,•}" -> "{r,b,•}"\n"{b,•}" -> "{r,b,•}"\n'
    )
    assert fig.bottom.name == "{•}" and fig.top.name == "{r,b,•}"


def test_two_draw_annotations_follow_the_rule(fig):
    # independent route: the predictive formulas instantiated in exact arithmetic
    a, th = F(1, 2), F(1)
    top = two_param_predictive(a, th, (1, 2))
    assert top == [F(1, 6), F(1, 6), F(2, 3)]
    assert fig.top.predictive == pytest.approx({"r": 1 / 6, "b": 1 / 6, NOVELTY: 2 / 3}, rel=1e-15)
    after_r = two_param_predictive(a, th, (1,))
    assert fig.space({"r"}).predictive == pytest.approx({"r": float(after_r[0]), NOVELTY: float(after_r[1])})
    assert fig.space({"b"}).predictive == pytest.approx({"b": 0.25, NOVELTY: 0.75})
    assert fig.bottom.predictive == {NOVELTY: 1}


def test_two_draw_annotations_at_theta_zero():
    top = build_lattice(DrawSequence.parse("r,b"), TwoParameter(0.5, 0)).top.predictive
    assert top == pytest.approx({"r": 0.25, "b": 0.25, NOVELTY: 0.5}, rel=1e-15)


def test_projections(fig):
    assert fig.projection({"r", "b"}, {"r"}) == {"r": "r", "b": NOVELTY, NOVELTY: NOVELTY}
    assert fig.project(fig.top, fig.bottom, "b") == NOVELTY
    assert fig.project({"r", "b"}, {"b"}, "b") == "b"
    with pytest.raises(ValueError):
        fig.projection({"r"}, {"b"})
    with pytest.raises(KeyError):
        fig.project({"r"}, set(), "b")
    with pytest.raises(KeyError):
        fig.space({"z"})


def test_repeat_draws_and_three_objects():
    lat = build_lattice(DrawSequence.parse("r,r,b,g"), DeMorgan())
    names = {s.name for s in lat.spaces}
    assert {"{•}", "{r,•}", "{r,b,•}", "{r,b,g,•}", "{b,•}", "{g,•}", "{r,g,•}"} <= names
    assert lat.space({"r"}).history == ("r", "r")  # the later realized prefix wins
    assert lat.space({"r"}).predictive == pytest.approx({"r": 2 / 3, NOVELTY: 1 / 3})


def test_lattice_axioms_exhaustive():
    for draws in seqs(4):
        check_lattice(draws)


def check_lattice(draws):
    lat = build_lattice(DrawSequence(draws), Kuipers(2, 2))
    sets = [s.objects for s in lat.spaces]
    assert len(set(sets)) == len(sets)
    for x, y in itertools.combinations(sets, 2):
        assert x | y in sets and x & y in sets
    assert lat.bottom.objects == frozenset() and lat.top.objects == frozenset(draws)
    for s in lat.spaces:
        if s.predictive is not None:
            assert sum(s.predictive.values()) == pytest.approx(1)
            assert set(s.predictive) == set(s.objects) | {NOVELTY}
    # covering edges: strict inclusion with nothing in between
    for a, b in lat.edges:
        assert a < b and not any(a < c < b for c in sets)
    # functoriality: composed projections equal the direct one
    for x, y, z in itertools.permutations(sets, 3):
        if z <= y <= x:
            direct = lat.projection(x, z)
            via = lat.projection(y, z)
            step = lat.projection(x, y)
            assert all(via[step[e]] == direct[e] for e in direct)


def test_relabeling_invariance():
    base = build_lattice(DrawSequence.parse("a,b,a,c"), TwoParameter(0.3, 2))
    ren = {"a": "x", "b": "y", "c": "z"}
    other = build_lattice(DrawSequence(tuple(ren[c] for c in "abac")), TwoParameter(0.3, 2))
    assert len(base.spaces) == len(other.spaces)
    for s, t in zip(base.spaces, other.spaces):
        assert tuple(ren[c] for c in s.order) == t.order
        assert s.origin == t.origin
        if s.predictive is not None:
            assert {ren.get(k, k): v for k, v in s.predictive.items()} == t.predictive


def test_empty_draws():
    lat = build_lattice(DrawSequence.parse(""), DeMorgan())
    assert [s.name for s in lat.spaces] == ["{•}"] and lat.edges == []


def test_bad_labels():
    with pytest.raises(ValueError):
        DrawSequence.parse("r,,b")
    with pytest.raises(ValueError):
        DrawSequence((NOVELTY,))


def test_json(fig):
    j = json.loads(json.dumps(fig.to_json()))
    assert j["schema_version"] == 1
    assert [s["name"] for s in j["spaces"]] == ["{•}", "{r,•}", "{b,•}", "{r,b,•}"]
    assert ["{r,•}", "{r,b,•}"] in j["edges"]
    proj = {(p["from"], p["to"]): p["map"] for p in j["projections"]}
    assert proj[("{r,b,•}", "{b,•}")] == {"r": NOVELTY, "b": "b", NOVELTY: NOVELTY}
    assert j["spaces"][2]["history"] == ["b"] and j["spaces"][2]["time"] == 1
