import pytest
from hypothesis import given
from hypothesis import strategies as st

from boundarylab.errors import EnumerationCapError, WordError
from boundarylab.space import IDENTITY, AnnulusSpec, ModelSpace, SubgroupPredicate, bfs_ball, preset

from conftest import SPACE_NAMES, words
from oracles import bfs_distances, reduced_words, rewrite_normal_form


def test_multiply_examples(f2, z2z):
    assert f2.multiply(f2.word("a"), f2.word("a^-1")) == IDENTITY
    assert f2.multiply(f2.word("a b"), f2.word("b^-1 a")) == f2.word("a^2")
    prod = z2z.multiply(z2z.word("a^2 t"), z2z.word("t^-1 b"))
    assert prod == ((0, (2, 1)),)


def test_distance_examples(f2, z2, z2z):
    assert f2.distance(IDENTITY, f2.word("a b a^-1")) == 3
    assert z2.distance(IDENTITY, z2.word("a^2 b^-3")) == 5
    assert z2z.distance(IDENTITY, z2z.word("a^2 t b")) == 4


def test_geodesic_examples(f2, z2):
    assert f2.geodesic(IDENTITY, f2.word("a b")).vertices == (IDENTITY, f2.word("a"), f2.word("a b"))
    assert z2.geodesic(IDENTITY, z2.word("a b")).vertices == (IDENTITY, z2.word("a"), z2.word("a b"))
    x = f2.word("a b^2")
    assert f2.geodesic(x, x).vertices == (x,)


def test_annulus_examples(f2, z2):
    assert sorted(map(f2.format, f2.enumerate_annulus(AnnulusSpec(IDENTITY, 1)))) == ["a", "a^-1", "b", "b^-1"]
    assert sum(1 for _ in f2.enumerate_annulus(AnnulusSpec(IDENTITY, 3))) == 36
    for n in range(1, 6):
        assert sum(1 for _ in z2.enumerate_annulus(AnnulusSpec(IDENTITY, n))) == 4 * n


def test_constrained_count_small_example(f2):
    # reduced words of length 2 with zero a-exponent: b^2 and b^-2
    H = SubgroupPredicate.exponent_sum(f2, {"a": 1})
    brute = [s for s in reduced_words("ab", 2) if s.count("a") == s.count("A")]
    assert sorted(brute) == ["BB", "bb"]
    assert f2.count_annulus_constrained(AnnulusSpec(IDENTITY, 2), H) == 2
    assert f2.count_annulus_constrained(AnnulusSpec(IDENTITY, 0), H) == 1
    assert f2.sphere_counts(14)[14] == 4 * 3 ** 13


def test_parse_format_round_trip(z2z):
    for text in ["a^2 t b^-1", "t^3", "a b t^-1 a^-2 b^3", "1"]:
        w = z2z.parse(text)
        assert z2z.parse(z2z.format(w)) == w
    assert z2z.parse("  a^2   t  b^-1 ") == z2z.parse("a^2 t b^-1")
    assert preset("f2").parse("(a b)^3") == preset("f2").power(preset("f2").word("a b"), 3)


def test_parse_errors(f2):
    with pytest.raises(WordError):
        f2.parse("a ^ x")
    with pytest.raises(WordError):
        f2.parse("c")
    with pytest.raises(WordError):
        f2.parse("(a b")
    with pytest.raises(WordError):
        f2.validate(((0, (0,)),))


def test_cap_guard():
    sp = ModelSpace.free(2, max_radius=5)
    with pytest.raises(EnumerationCapError):
        list(sp.sphere(6))


@pytest.mark.parametrize("name", SPACE_NAMES)
def test_bfs_oracle_distances(name):
    sp = preset(name)
    dist = bfs_ball(sp, 6 if name != "z3" else 5)
    for w, d in dist.items():
        assert sp.length(w) == d
        g = sp.geodesic(IDENTITY, w)
        assert len(g) == d + 1
        assert all(sp.distance(a, b) == 1 for a, b in zip(g.vertices, g.vertices[1:]))


@pytest.mark.parametrize("name", SPACE_NAMES)
def test_ball_enumeration_complete(name):
    sp = preset(name)
    r = 6 if name != "z3" else 4
    assert set(sp.ball(r)) == set(bfs_ball(sp, r))


def test_bfs_oracle_independent_of_multiply():
    # BFS over letter strings with the rewriting oracle, no package arithmetic
    factors = ["ab", "t"]
    sp = preset("z2z")

    def nbrs(letters):
        return [letters + c for c in "abtABT"]

    seen = {}
    for letters, d in bfs_distances(nbrs, "", 5).items():
        nf = rewrite_normal_form(letters, factors)
        seen[nf] = min(seen.get(nf, d), d)
    ball = {w for w in sp.ball(3)}
    assert {nf for nf, d in seen.items() if d <= 3 and sp.length(nf) <= 3} <= ball
    for w in ball:
        assert sp.length(w) == seen[w]


@pytest.mark.parametrize("name", SPACE_NAMES)
def test_dp_counts_match_streaming(name):
    sp = preset(name)
    preds = [SubgroupPredicate.whole(), SubgroupPredicate.exponent_sum(sp, {"a": 1}),
             SubgroupPredicate.parity(sp, {lab: 1 for lab in sp.labels})]
    n_max = 8 if name in ("f2", "z2", "z2z") else 5
    for pred in preds:
        for n in range(n_max + 1):
            spec = AnnulusSpec(IDENTITY, n)
            assert sp.count_annulus_constrained(spec, pred, "dp") == sp.count_annulus_constrained(spec, pred, "stream")


def test_free_counts_match_string_oracle():
    sp = preset("f2")
    for n in range(7):
        assert sp.sphere_counts(n)[n] == sum(1 for _ in reduced_words("ab", n))


@given(st.data())
def test_left_invariance(data):
    name = data.draw(st.sampled_from(SPACE_NAMES))
    sp = preset(name)
    g, x, y = (data.draw(words(sp)) for _ in range(3))
    assert sp.distance(sp.multiply(g, x), sp.multiply(g, y)) == sp.distance(x, y)


@given(st.data())
def test_group_laws(data):
    sp = preset(data.draw(st.sampled_from(SPACE_NAMES)))
    x, y, z = (data.draw(words(sp)) for _ in range(3))
    assert sp.multiply(sp.multiply(x, y), z) == sp.multiply(x, sp.multiply(y, z))
    assert sp.multiply(x, sp.inverse(x)) == IDENTITY
    assert sp.distance(x, z) <= sp.distance(x, y) + sp.distance(y, z)
    assert sp.distance(x, y) == sp.distance(y, x)


@given(st.lists(st.sampled_from("abtABT"), max_size=16))
def test_normal_form_matches_rewriting(letters):
    sp = preset("z2z")
    s = "".join(letters)
    w = IDENTITY
    for ch in s:
        exp = 1 if ch.islower() else -1
        w = sp.multiply(w, sp.word(f"{ch.lower()}^{exp}"))
    assert w == rewrite_normal_form(s, ["ab", "t"])


@given(st.data())
def test_geodesic_translation(data):
    sp = preset(data.draw(st.sampled_from(SPACE_NAMES)))
    g, x, y = (data.draw(words(sp, 6)) for _ in range(3))
    path = sp.geodesic(x, y)
    moved = path.translate(sp, g)
    assert len(moved) == sp.distance(x, y) + 1
    assert all(sp.distance(a, b) == 1 for a, b in zip(moved.vertices, moved.vertices[1:]))
