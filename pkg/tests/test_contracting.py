import pytest
from hypothesis import given
from hypothesis import strategies as st

from boundarylab.contracting import (AdmissiblePath, Axis, barrier_hits, bounded_intersection, certify_contracting,
                                     cyclic_reduction, extend, fellow_travel_check, find_barriers, path_steps,
                                     primitive_root, proj_distance, project, truncate, verify_admissible)
from boundarylab.errors import InconclusiveWindow, SearchFailure, WordError
from boundarylab.space import IDENTITY, preset

from conftest import words


def naive_projection(space, X, y):
    d = {w: space.distance(y, w) for w in X.words}
    m = min(d.values())
    return m, {w for w, v in d.items() if v == m}


def test_axis_normalisation(f2):
    assert Axis(f2, f2.word("b a b^-1")).root == f2.word("a")
    X = Axis(f2, f2.word("b a b a b^-1"))
    assert f2.length(X.root) == 3
    assert Axis(f2, f2.word("(a b)^3")).key == Axis(f2, f2.word("b^-1 a^-1")).key
    with pytest.raises(WordError):
        Axis(f2, IDENTITY)
    conj, core = cyclic_reduction(f2, f2.word("b a b^-1"))
    assert core == f2.word("a")
    assert primitive_root(f2, f2.word("(a b)^4")) == f2.word("a b")


def test_projection_examples(f2):
    X = Axis(f2, f2.word("a"), window=10)
    res = project(f2, X, f2.word("b a b^-1"))
    assert res.points == (IDENTITY,)
    assert res.distance == 3
    assert proj_distance(f2, X, f2.word("a^3 b"), f2.word("a^-2 b")) == 5


def test_projection_window_edge(f2):
    X = Axis(f2, f2.word("a"), window=4)
    assert not project(f2, X, f2.word("a^9 b")).conclusive
    with pytest.raises(InconclusiveWindow):
        proj_distance(f2, X, f2.word("a^9 b"), IDENTITY)


@given(st.data())
def test_projection_matches_naive(data):
    name = data.draw(st.sampled_from(["f2", "z2", "z2z"]))
    sp = preset(name)
    base = data.draw(words(sp, 4).filter(bool))
    X = Axis(sp, base, window=14)
    y = data.draw(words(sp, 8))
    res = project(sp, X, y)
    m, pts = naive_projection(sp, X, y)
    assert res.distance == m
    assert set(res.points) == pts


@given(st.data())
def test_projection_distance_triangle(data):
    sp = preset("f2")
    X = Axis(sp, sp.word("a b"), window=30)
    x, y, z = (data.draw(words(sp, 7)) for _ in range(3))
    d = lambda u, v: proj_distance(sp, X, u, v)  # noqa: E731
    assert d(x, z) <= d(x, y) + d(y, z)


def test_certify_tree_axis(f2):
    cert = certify_contracting(f2, Axis(f2, f2.word("a b"), window=20), 0, 6)
    assert cert.certified and cert.verdict == "certified"


def test_certify_lattice_counterexample(z2):
    cert = certify_contracting(z2, Axis(z2, z2.word("a"), window=20), 2, 8)
    assert not cert.certified
    assert cert.counterexample["projection_diameter"] > 2
    # the reported ball is real: recompute its projection diameter by brute force
    c = cert.counterexample["center"]
    r = cert.counterexample["radius"]
    X = Axis(z2, z2.word("a"), window=20)
    # balls are taken inside B(o, 8): breadth-first search confined to the region
    region = set(z2.ball(8))
    reach = {c: 0}
    frontier = [c]
    for _ in range(r):
        frontier = [y for x in frontier for y in z2.neighbors(x) if y in region and y not in reach]
        for y in frontier:
            reach[y] = 1
    pts = set()
    for w in reach:
        pts |= naive_projection(z2, X, w)[1]
    assert max(z2.distance(a, b) for a in pts for b in pts) == cert.counterexample["projection_diameter"]
    assert z2.distance(c, IDENTITY) - r > 0


def test_bounded_intersection(f2):
    X = Axis(f2, f2.word("a b"), window=12)
    assert bounded_intersection(f2, X, Axis(f2, f2.word("a b"), f2.word("b"), 12), 0) == 0
    a = bounded_intersection(f2, X, Axis(f2, f2.word("a b^-1"), window=12), 1)
    b = bounded_intersection(f2, Axis(f2, f2.word("a b"), window=20), Axis(f2, f2.word("a b^-1"), window=20), 1)
    assert a == b == 3


def test_barriers_on_periodic_geodesic(f2):
    gamma = f2.geodesic(IDENTITY, f2.word("(a b)^4"))
    hs = [f2.format(b.h) for b in find_barriers(f2, gamma, [f2.word("a b")], 0)]
    assert hs == ["1", "a b", "a b a b", "a b a b a b"]


def test_barrier_definition_holds(f2):
    gamma = f2.geodesic(IDENTITY, f2.word("(a b)^4 b (a b^-1)^4"))
    F = [f2.word("a b"), f2.word("a b^-1")]
    for b in find_barriers(f2, gamma, F, 1):
        hf = f2.multiply(b.h, b.f)
        assert min(f2.distance(b.h, v) for v in gamma) <= 1
        assert min(f2.distance(hf, v) for v in gamma) <= 1


@given(st.data())
def test_tree_fast_path_matches_generic(data):
    sp = preset("f2")
    end = data.draw(words(sp, 14))
    verts = sp.geodesic(IDENTITY, end).vertices
    f = data.draw(st.sampled_from(["a b", "a^2", "a b^-1 a"]))
    r = data.draw(st.integers(0, 1))
    F = [sp.word(f)]
    steps = path_steps(sp, verts)
    fast = {(i, w, j) for _, i, w, j in barrier_hits(sp, steps, F, r)}
    brute = set()
    for i, h in enumerate(verts):
        hf = sp.multiply(h, F[0])
        for j, v in enumerate(verts):
            if sp.distance(hf, v) <= r:
                brute.add((i, j))
    # every brute-force pair with h on the path appears among the hits
    assert {(i, j) for i, w, j in fast if w == IDENTITY} == brute


def test_truncate_and_verify(f2):
    gamma = f2.geodesic(IDENTITY, f2.word("(a b)^4"))
    bars = find_barriers(f2, gamma, [f2.word("a b")], 0)
    path = truncate(f2, gamma, bars)
    assert isinstance(path, AdmissiblePath)
    assert path.start == IDENTITY and path.end == f2.word("(a b)^4")
    assert verify_admissible(f2, path).passed
    assert fellow_travel_check(f2, path, 2).passed


def test_truncate_two_axes(f2):
    gamma = f2.geodesic(IDENTITY, f2.word("(a b)^4 b (a b^-1)^4"))
    bars = find_barriers(f2, gamma, [f2.word("a b"), f2.word("a b^-1")], 0)
    path = truncate(f2, gamma, bars)
    assert len(path.saturation) == 2
    assert verify_admissible(f2, path).passed
    assert fellow_travel_check(f2, path, 2).passed


def test_extend(f2):
    F = [f2.word("(a b)^3"), f2.word("(a b^-1)^3"), f2.word("(b a)^3")]
    f, wit = extend(f2, f2.word("b^5"), F, 2)
    assert wit.h == f2.word("b^5")
    with pytest.raises(SearchFailure) as exc:
        extend(f2, f2.word("b^5"), [f2.word("b^-1 a")], 0)
    assert exc.value.diagnostics
