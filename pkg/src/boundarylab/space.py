"""Exact word metrics on free products of free abelian groups.

Every model group is a free product ``Z^{m_1} * ... * Z^{m_p}`` with the
standard generators of each factor:

* ``Free(k)`` is the product of ``k`` copies of ``Z``;
* ``Lattice(m)`` is a single factor ``Z^m``;
* ``FreeProductAbelian`` is anything in between, e.g. ``Z^2 * Z``.

A word is stored as a tuple of syllables ``(factor, vector)``, which is the
unique normal form: vectors are non-zero and adjacent syllables live in
different factors.  The word length is the sum of L1 norms of the vectors,
so ``d(x, y) = |x^{-1} y|`` is computed without any search.  Group elements
double as vertices of the Cayley graph, with the basepoint at the identity.
"""

from __future__ import annotations

import re
import string
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .errors import CapabilityError, ConfigError, EnumerationCapError, WordError

Syllable = tuple  # (factor index, tuple of ints)
Word = tuple  # tuple of syllables
IDENTITY: Word = ()

DEFAULT_CAP = 10**8
DEFAULT_MAX_RADIUS = 64


@lru_cache(maxsize=None)
def lattice_sphere(rank: int, norm: int) -> tuple:
    """All vectors of ``Z^rank`` with L1 norm exactly ``norm``, in a fixed order."""
    if rank == 0:
        return ((),) if norm == 0 else ()
    if rank == 1:
        return ((norm,), (-norm,)) if norm else ((0,),)
    out = []
    for head in range(-norm, norm + 1):
        for tail in lattice_sphere(rank - 1, norm - abs(head)):
            out.append((head,) + tail)
    return tuple(out)


@lru_cache(maxsize=None)
def lattice_sphere_size(rank: int, norm: int) -> int:
    if rank == 0:
        return 1 if norm == 0 else 0
    if norm == 0:
        return 1
    if rank == 1:
        return 2
    return sum(
        (1 if h == 0 else 2) * lattice_sphere_size(rank - 1, norm - h)
        for h in range(norm + 1)
    )


def _l1(v) -> int:
    return sum(abs(x) for x in v)


@lru_cache(maxsize=1 << 18)
def _cumulative(w) -> tuple:
    """Prefix sums of syllable lengths (cached, words are immutable)."""
    out = [0]
    for _, v in w:
        out.append(out[-1] + _l1(v))
    return tuple(out)


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class AnnulusSpec:
    """The set ``{v : |d(center, v) - n| <= width}``."""

    center: Word
    n: int
    width: int = 0

    def __post_init__(self):
        if self.n < 0 or self.width < 0:
            raise ValueError("annulus radius and width must be non-negative")


@dataclass(frozen=True)
class GeodesicPath:
    vertices: tuple

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def __getitem__(self, i):
        return self.vertices[i]

    @property
    def start(self) -> Word:
        return self.vertices[0]

    @property
    def end(self) -> Word:
        return self.vertices[-1]

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    def translate(self, space: "ModelSpace", g: Word) -> "GeodesicPath":
        return GeodesicPath(tuple(space.multiply(g, v) for v in self.vertices))


@dataclass(frozen=True)
class SubgroupPredicate:
    """Subgroup given as the kernel of a homomorphism to ``Z`` or ``Z/m``.

    ``weights[i][j]`` is the image of the ``j``-th generator of factor ``i``.
    ``modulus=None`` means the target is ``Z``; ``weights=None`` is the whole
    group.  Membership is decided from the normal form, and the image is a
    small integer state, which is what makes transfer counting possible.
    """

    weights: Optional[tuple] = None
    modulus: Optional[int] = None
    name: str = "whole"

    @classmethod
    def whole(cls) -> "SubgroupPredicate":
        return cls()

    @classmethod
    def from_labels(cls, space: "ModelSpace", label_weights: dict, modulus=None, name=None):
        unknown = set(label_weights) - set(space.labels)
        if unknown:
            raise ConfigError("weights", f"unknown generator labels {sorted(unknown)}")
        weights = []
        k = 0
        for rank in space.ranks:
            weights.append(tuple(int(label_weights.get(space.labels[k + j], 0)) for j in range(rank)))
            k += rank
        if modulus is not None and modulus < 2:
            raise ConfigError("modulus", "must be at least 2")
        if name is None:
            body = ",".join(f"{lab}:{w}" for lab, w in label_weights.items())
            name = f"ker[{body}]" + (f"mod{modulus}" if modulus else "")
        return cls(tuple(weights), modulus, name)

    @classmethod
    def exponent_sum(cls, space, label_weights: dict) -> "SubgroupPredicate":
        return cls.from_labels(space, label_weights, None)

    @classmethod
    def parity(cls, space, label_weights: dict) -> "SubgroupPredicate":
        return cls.from_labels(space, label_weights, 2)

    @property
    def is_whole(self) -> bool:
        return self.weights is None or not any(any(w) for w in self.weights)

    def syllable_value(self, factor: int, vector) -> int:
        if self.weights is None:
            return 0
        return sum(w * x for w, x in zip(self.weights[factor], vector))

    def image(self, word: Word) -> int:
        v = sum(self.syllable_value(f, vec) for f, vec in word)
        return v % self.modulus if self.modulus else v

    def reduce(self, value: int) -> int:
        return value % self.modulus if self.modulus else value

    def contains(self, word: Word) -> bool:
        return self.image(word) == 0

    __call__ = contains


class ModelSpace:
    """Cayley graph of ``Z^{m_1} * ... * Z^{m_p}`` with its word metric.

    Instances are immutable; all methods are pure.
    """

    def __init__(self, ranks: Sequence[int], labels: Optional[Sequence[str]] = None,
                 family: Optional[str] = None, cap: int = DEFAULT_CAP,
                 max_radius: int = DEFAULT_MAX_RADIUS, name: Optional[str] = None):
        ranks = tuple(int(r) for r in ranks)
        if not ranks or any(r < 1 for r in ranks):
            raise ConfigError("ranks", "need at least one factor, each of rank >= 1")
        ngen = sum(ranks)
        if labels is None:
            labels = tuple(string.ascii_lowercase[:ngen])
        labels = tuple(labels)
        if len(labels) != ngen:
            raise ConfigError("labels", f"expected {ngen} generator labels, got {len(labels)}")
        if len(set(labels)) != ngen:
            raise ConfigError("labels", "labels must be distinct")
        for lab in labels:
            if not re.fullmatch(r"[A-Za-z][A-Za-z_]*", lab):
                raise ConfigError("labels", f"invalid label {lab!r}")
        if family is None:
            if len(ranks) == 1:
                family = "lattice"
            elif all(r == 1 for r in ranks):
                family = "free"
            else:
                family = "product"
        self.ranks = ranks
        self.labels = labels
        self.family = family
        self.cap = int(cap)
        self.max_radius = int(max_radius)
        self.name = name or self._default_name()
        self._label_index = {}
        k = 0
        for i, r in enumerate(ranks):
            for j in range(r):
                self._label_index[labels[k]] = (i, j)
                k += 1
        gens = []
        for i, r in enumerate(ranks):
            for j in range(r):
                for s in (1, -1):
                    vec = tuple(s if t == j else 0 for t in range(r))
                    gens.append(((i, vec),))
        self.generators: tuple = tuple(gens)

    # construction -----------------------------------------------------

    @classmethod
    def free(cls, k: int = 2, labels=None, **kw) -> "ModelSpace":
        if k < 2:
            raise ConfigError("rank", "free group needs rank >= 2")
        return cls([1] * k, labels, family="free", **kw)

    @classmethod
    def lattice(cls, m: int = 2, labels=None, **kw) -> "ModelSpace":
        return cls([m], labels, family="lattice", **kw)

    @classmethod
    def product(cls, ranks, free_rank: int = 0, labels=None, **kw) -> "ModelSpace":
        ranks = list(ranks) + [1] * free_rank
        if len(ranks) < 2:
            raise ConfigError("ranks", "a free product needs at least two factors")
        return cls(ranks, labels, family="product", **kw)

    @classmethod
    def from_config(cls, cfg: dict) -> "ModelSpace":
        """Build a space from the ``space`` section of a run config.

        Keys: ``family`` (free | product | lattice | a preset name),
        ``rank`` (free, lattice), ``ranks`` and ``free_rank`` (product),
        ``labels`` (list or string of single letters), ``cap``, ``max_radius``.
        """
        if not isinstance(cfg, dict):
            raise ConfigError("space", "must be a mapping")
        family = cfg.get("family")
        if family is None:
            raise ConfigError("family", "missing")
        labels = cfg.get("labels")
        if isinstance(labels, str):
            labels = list(labels.replace(",", " ").split()) if " " in labels or "," in labels else list(labels)
        kw = {}
        for key in ("cap", "max_radius"):
            if key in cfg:
                try:
                    kw[key] = int(cfg[key])
                except (TypeError, ValueError):
                    raise ConfigError(key, "must be an integer") from None
        unknown = set(cfg) - {"family", "rank", "ranks", "free_rank", "labels", "cap", "max_radius"}
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown key")
        if family in PRESETS:
            base = preset(family)
            return cls(base.ranks, labels or base.labels, family=base.family, name=family, **kw)
        try:
            given = cfg.get("ranks")
            if family == "free":
                return cls.free(int(cfg.get("rank", len(given) if given else 2)), labels, **kw)
            if family == "lattice":
                return cls.lattice(int(cfg.get("rank", given[0] if given else 2)), labels, **kw)
            if family == "product":
                ranks = cfg.get("ranks")
                if not isinstance(ranks, (list, tuple)):
                    raise ConfigError("ranks", "must be a list of positive integers")
                return cls.product([int(r) for r in ranks], int(cfg.get("free_rank", 0)), labels, **kw)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError("rank", str(exc)) from None
        raise ConfigError("family", f"unknown family {family!r}")

    def to_config(self) -> dict:
        return {"family": self.family, "ranks": list(self.ranks), "labels": list(self.labels),
                "cap": self.cap, "max_radius": self.max_radius}

    def _default_name(self) -> str:
        return "*".join(f"Z^{r}" if r > 1 else "Z" for r in self.ranks)

    def __repr__(self):
        return f"ModelSpace({self.name}, labels={''.join(self.labels)})"

    def __eq__(self, other):
        return isinstance(other, ModelSpace) and (self.ranks, self.labels) == (other.ranks, other.labels)

    def __hash__(self):
        return hash((self.ranks, self.labels))

    @property
    def is_tree(self) -> bool:
        return all(r == 1 for r in self.ranks)

    # words ------------------------------------------------------------

    def validate(self, w) -> Word:
        if not isinstance(w, tuple):
            raise WordError(f"word must be a tuple of syllables, got {type(w).__name__}")
        prev = None
        for syl in w:
            if not (isinstance(syl, tuple) and len(syl) == 2):
                raise WordError(f"malformed syllable {syl!r}")
            f, vec = syl
            if not (isinstance(f, int) and 0 <= f < len(self.ranks)):
                raise WordError(f"bad factor index in syllable {syl!r}")
            if not (isinstance(vec, tuple) and len(vec) == self.ranks[f]
                    and all(isinstance(x, int) for x in vec)):
                raise WordError(f"bad vector in syllable {syl!r}")
            if not any(vec):
                raise WordError(f"empty syllable {syl!r}")
            if f == prev:
                raise WordError(f"adjacent syllables in the same factor {f}")
            prev = f
        return w

    def multiply(self, g: Word, h: Word) -> Word:
        if not g:
            return h
        if not h:
            return g
        out = list(g)
        i = 0
        nh = len(h)
        while out and i < nh and out[-1][0] == h[i][0]:
            f, v = out.pop()
            w = tuple(a + b for a, b in zip(v, h[i][1]))
            i += 1
            if any(w):
                out.append((f, w))
                break
        return tuple(out) + h[i:]

    def product_of(self, *words: Word) -> Word:
        out = IDENTITY
        for w in words:
            out = self.multiply(out, w)
        return out

    def inverse(self, w: Word) -> Word:
        return tuple((f, tuple(-x for x in v)) for f, v in reversed(w))

    def power(self, w: Word, n: int) -> Word:
        base = w if n >= 0 else self.inverse(w)
        out = IDENTITY
        for _ in range(abs(n)):
            out = self.multiply(out, base)
        return out

    def length(self, w: Word) -> int:
        return sum(_l1(v) for _, v in w)

    def distance(self, x: Word, y: Word) -> int:
        n = min(len(x), len(y))
        k = 0
        while k < n and x[k] == y[k]:
            k += 1
        cx = _cumulative(x)
        cy = _cumulative(y)
        if k < len(x) and k < len(y) and x[k][0] == y[k][0]:
            d = sum(abs(a - b) for a, b in zip(x[k][1], y[k][1]))
            k1 = k + 1
        else:
            d = 0
            k1 = k
        return d + cx[-1] - cx[k1] + cy[-1] - cy[k1]

    def neighbors(self, w: Word) -> list:
        return [self.multiply(w, s) for s in self.generators]

    def letters(self, w: Word) -> list:
        """The canonical generator sequence spelling ``w``.

        Within a syllable the steps go along the generator axes in order,
        all steps of the first generator first, signs toward the target.
        """
        out = []
        for f, vec in w:
            r = len(vec)
            for j, x in enumerate(vec):
                if x:
                    s = _sign(x)
                    step = ((f, tuple(s if t == j else 0 for t in range(r))),)
                    out.extend([step] * abs(x))
        return out

    def path_from_identity(self, w: Word) -> list:
        verts = [IDENTITY]
        cur = IDENTITY
        for step in self.letters(w):
            cur = self.multiply(cur, step)
            verts.append(cur)
        return verts

    def geodesic(self, x: Word, y: Word) -> GeodesicPath:
        """Canonical geodesic from ``x`` to ``y`` (left translate of the one from o)."""
        rel = self.multiply(self.inverse(x), y)
        return GeodesicPath(tuple(self.multiply(x, v) for v in self.path_from_identity(rel)))

    # string form -------------------------------------------------------

    def format(self, w: Word) -> str:
        if not w:
            return "1"
        parts = []
        k0 = [0]
        for r in self.ranks[:-1]:
            k0.append(k0[-1] + r)
        for f, vec in w:
            for j, x in enumerate(vec):
                if x:
                    lab = self.labels[k0[f] + j]
                    parts.append(lab if x == 1 else f"{lab}^{x}")
        return " ".join(parts)

    def parse(self, text: str) -> Word:
        """Parse ``a^2 t b^-1``; parenthesised groups take powers, ``(a b)^3``."""
        s = re.sub(r"\s+", "", text)
        if s in ("", "1", "e") and (s != "e" or "e" not in self._label_index):
            return IDENTITY
        labs = sorted(self._label_index, key=len, reverse=True)
        pat = re.compile("(" + "|".join(map(re.escape, labs)) + r")")
        power = re.compile(r"\^(-?\d+)")
        stack = [IDENTITY]
        pos = 0

        def exponent():
            nonlocal pos
            m = power.match(s, pos)
            if m:
                pos = m.end()
                return int(m.group(1))
            return 1

        while pos < len(s):
            ch = s[pos]
            if ch == "(":
                stack.append(IDENTITY)
                pos += 1
                continue
            if ch == ")":
                if len(stack) == 1:
                    raise WordError(f"unbalanced ')' in {text!r}")
                pos += 1
                inner = stack.pop()
                stack[-1] = self.multiply(stack[-1], self.power(inner, exponent()))
                continue
            m = pat.match(s, pos)
            if not m:
                raise WordError(f"cannot parse {text!r} at position {pos}")
            pos = m.end()
            i, j = self._label_index[m.group(1)]
            e = exponent()
            if e:
                vec = tuple(e if t == j else 0 for t in range(self.ranks[i]))
                stack[-1] = self.multiply(stack[-1], ((i, vec),))
        if len(stack) != 1:
            raise WordError(f"unbalanced '(' in {text!r}")
        return stack[0]

    def word(self, text) -> Word:
        """Coerce a string or a syllable tuple to a validated word."""
        if isinstance(text, str):
            return self.parse(text)
        return self.validate(text)

    # enumeration --------------------------------------------------------

    def _check_radius(self, r: int):
        if r > self.max_radius:
            raise EnumerationCapError("max_radius", self.max_radius)

    def sphere(self, n: int, first_factor_not: Optional[int] = None) -> Iterator[Word]:
        """Normal forms of length exactly ``n`` in a fixed deterministic order."""
        self._check_radius(n)
        ranks = self.ranks
        cap = self.cap
        count = 0

        def rec(remaining, last):
            if remaining == 0:
                yield ()
                return
            for f, r in enumerate(ranks):
                if f == last:
                    continue
                for ell in range(1, remaining + 1):
                    for vec in lattice_sphere(r, ell):
                        head = ((f, vec),)
                        for tail in rec(remaining - ell, f):
                            yield head + tail

        for w in rec(n, first_factor_not):
            count += 1
            if count > cap:
                raise EnumerationCapError("cap", cap)
            yield w

    def ball(self, n: int) -> Iterator[Word]:
        for k in range(n + 1):
            yield from self.sphere(k)

    def enumerate_annulus(self, spec: AnnulusSpec) -> Iterator[Word]:
        self._check_radius(spec.n + spec.width)
        lo = max(0, spec.n - spec.width)
        visited = 0
        for k in range(lo, spec.n + spec.width + 1):
            for w in self.sphere(k):
                visited += 1
                if visited > self.cap:
                    raise EnumerationCapError("cap", self.cap)
                yield self.multiply(spec.center, w)

    # counting ------------------------------------------------------------

    def sphere_counts(self, n_max: int, first_factor_not: Optional[int] = None) -> list:
        """Exact sphere sizes ``|S(o, n)|`` for ``n = 0..n_max``."""
        counts = self.constrained_sphere_counts(n_max, SubgroupPredicate.whole(), first_factor_not)
        return counts

    def _syllable_table(self, pred: SubgroupPredicate, n_max: int) -> list:
        # table[f][ell] = Counter(value -> number of vectors of norm ell)
        table = []
        for f, r in enumerate(self.ranks):
            rows = [Counter()]
            for ell in range(1, n_max + 1):
                c = Counter()
                if pred.is_whole:
                    c[0] = lattice_sphere_size(r, ell)
                elif r == 1:
                    w = pred.weights[f][0]
                    c[pred.reduce(w * ell)] += 1
                    c[pred.reduce(-w * ell)] += 1
                else:
                    for vec in lattice_sphere(r, ell):
                        c[pred.reduce(pred.syllable_value(f, vec))] += 1
                rows.append(c)
            table.append(rows)
        return table

    def constrained_sphere_counts(self, n_max: int, pred: SubgroupPredicate,
                                  first_factor_not: Optional[int] = None,
                                  offset: int = 0) -> list:
        """Transfer count of length-``n`` normal forms ``w`` with ``offset + phi(w) = 0``.

        State is (length, last factor, image value).
        """
        table = self._syllable_table(pred, n_max)
        nf = len(self.ranks)
        # layers[n] = dict (last, value) -> count
        layers = [{(first_factor_not, pred.reduce(offset)): 1}]
        for n in range(1, n_max + 1):
            cur = Counter()
            for ell in range(1, n + 1):
                prev = layers[n - ell]
                for (last, val), cnt in prev.items():
                    for f in range(nf):
                        if f == last:
                            continue
                        for dv, m in table[f][ell].items():
                            cur[(f, pred.reduce(val + dv))] += cnt * m
            layers.append(dict(cur))
        out = []
        for layer in layers:
            out.append(sum(c for (_, v), c in layer.items() if v == 0))
        return out

    def count_annulus_constrained(self, spec: AnnulusSpec, constraint=None, method: str = "auto") -> int:
        """Exact ``|A(spec) ∩ H|`` for a subgroup predicate ``H``.

        ``method='dp'`` forces transfer counting (only for ``SubgroupPredicate``),
        ``'stream'`` forces a filter over the enumerated annulus.
        """
        if constraint is None:
            constraint = SubgroupPredicate.whole()
        is_pred = isinstance(constraint, SubgroupPredicate)
        if method == "dp" or (method == "auto" and is_pred):
            if not is_pred:
                raise CapabilityError(
                    f"transfer counting needs a SubgroupPredicate, got {type(constraint).__name__}")
            hi = spec.n + spec.width
            lo = max(0, spec.n - spec.width)
            offset = constraint.image(spec.center)
            counts = self.constrained_sphere_counts(hi, constraint, offset=offset)
            return sum(counts[lo:hi + 1])
        if method not in ("auto", "stream"):
            raise CapabilityError(f"unknown counting method {method!r}")
        test = constraint if callable(constraint) else None
        if test is None:
            raise CapabilityError("constraint must be callable for streaming counts")
        return sum(1 for v in self.enumerate_annulus(spec) if test(v))

    # cones of the canonical geodesic ----------------------------------------

    def _cone_parts(self, v: Word):
        """Decompose the cone ``{z : v on canonical [o, z]}``.

        Returns ``(prefix, factor, extensions)`` where ``extensions(delta)``
        lists last-syllable vectors of norm ``|u| + delta`` whose canonical
        route passes through the last syllable ``u`` of ``v``.
        """
        prefix = v[:-1]
        f, u = v[-1]
        j = max(t for t, x in enumerate(u) if x)
        r = len(u)
        s = _sign(u[j])

        def extensions(delta):
            out = []
            for e in range(delta + 1):
                for tail in lattice_sphere(r - 1 - j, delta - e):
                    out.append(u[:j] + (u[j] + s * e,) + tail)
            return out

        def ext_count(delta):
            return sum(lattice_sphere_size(r - 1 - j, delta - e) for e in range(delta + 1))

        return prefix, f, extensions, ext_count

    def cone_sphere_counts(self, v: Word, n_max: int) -> list:
        """``|{z in cone(v) : |z| = n}|`` for ``n = 0..n_max`` (canonical geodesics)."""
        if not v:
            return self.sphere_counts(n_max)
        _, f, _, ext_count = self._cone_parts(v)
        tails = self.sphere_counts(n_max, first_factor_not=f)
        dv = self.length(v)
        out = [0] * (n_max + 1)
        for n in range(dv, n_max + 1):
            out[n] = sum(ext_count(delta) * tails[n - dv - delta] for delta in range(n - dv + 1))
        return out

    def enumerate_cone(self, v: Word, max_len: int) -> Iterator[Word]:
        """Elements ``z`` with ``|z| <= max_len`` whose canonical geodesic from o meets ``v``."""
        if not v:
            yield from self.ball(max_len)
            return
        prefix, f, extensions, _ = self._cone_parts(v)
        dv = self.length(v)
        for delta in range(max_len - dv + 1):
            for ext in extensions(delta):
                head = prefix + ((f, ext),)
                for k in range(max_len - dv - delta + 1):
                    for tail in self.sphere(k, first_factor_not=f):
                        yield head + tail


PRESETS = {
    "f2": lambda: ModelSpace.free(2, name="f2"),
    "f3": lambda: ModelSpace.free(3, name="f3"),
    "z2": lambda: ModelSpace.lattice(2, name="z2"),
    "z3": lambda: ModelSpace.lattice(3, name="z3"),
    "z2z": lambda: ModelSpace([2, 1], ("a", "b", "t"), family="product", name="z2z"),
}


def preset(name: str) -> ModelSpace:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ConfigError("space", f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def bfs_ball(space: ModelSpace, radius: int, center: Word = IDENTITY) -> dict:
    """Breadth-first distances from ``center`` in the Cayley graph (oracle)."""
    dist = {center: 0}
    frontier = [center]
    for d in range(1, radius + 1):
        nxt = []
        for w in frontier:
            for s in space.generators:
                x = space.multiply(w, s)
                if x not in dist:
                    dist[x] = d
                    nxt.append(x)
        frontier = nxt
    return dist
