"""Horofunctions on finite balls, shadows, conical and Myrberg witnesses.

A :class:`HoroVector` is a horofunction restricted to ``B(o, R)``.  Limits of
``b_y`` along a sequence are detected by finite stabilization: the last
``w`` vectors must agree entry by entry.  This is sound for the ball but says
nothing beyond it.

Shadow membership uses the canonical geodesic by default.  The ``"some"``
semantics asks whether any geodesic ``[x, z]`` qualifies; a vertex ``v`` lies
on some geodesic exactly when ``d(x, v) + d(v, z) = d(x, z)``, so this is
decided by scanning the ball around the target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .contracting import (Axis, InconclusiveWindow, barrier_hits, certify_contracting,
                          find_barriers, path_steps)
from .errors import SearchFailure, WordError
from .space import IDENTITY, GeodesicPath, ModelSpace, Word


# -- horofunctions ------------------------------------------------------------------

@dataclass(frozen=True)
class HoroVector:
    radius: int
    points: tuple
    values: tuple
    source: str = ""

    def __post_init__(self):
        if len(self.points) != len(self.values):
            raise ValueError("points and values differ in length")

    @property
    def as_dict(self) -> dict:
        return dict(zip(self.points, self.values))

    def __getitem__(self, x: Word) -> int:
        try:
            return self.values[self._index[x]]
        except KeyError:
            raise KeyError(f"point outside B(o, {self.radius})") from None

    @property
    def _index(self) -> dict:
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {p: i for i, p in enumerate(self.points)}
            object.__setattr__(self, "_idx", idx)
        return idx

    def restrict(self, radius: int, space: ModelSpace) -> "HoroVector":
        keep = [(p, v) for p, v in zip(self.points, self.values) if space.length(p) <= radius]
        return HoroVector(radius, tuple(p for p, _ in keep), tuple(v for _, v in keep), self.source)

    def record(self, space: ModelSpace) -> dict:
        return {"radius": self.radius, "source": self.source,
                "values": {space.format(p): v for p, v in zip(self.points, self.values)}}


def horofunction_vector(space: ModelSpace, y: Word, R: int) -> HoroVector:
    """Exact ``b_y(x) = d(x, y) - d(o, y)`` on ``B(o, R)``."""
    if R < 0:
        raise ValueError("R must be non-negative")
    pts = tuple(space.ball(R))
    dy = space.length(y)
    return HoroVector(R, pts, tuple(space.distance(x, y) - dy for x in pts), space.format(y))


@dataclass
class DivergenceReport:
    radius: int
    window: int
    oscillating: list
    source: str = ""

    def record(self, space: ModelSpace) -> dict:
        return {"radius": self.radius, "window": self.window, "stabilized": False,
                "oscillating": [space.format(x) for x in self.oscillating[:50]],
                "n_oscillating": len(self.oscillating)}


def horo_limit(space: ModelSpace, ys: Sequence[Word], R: int, w: int = 5):
    """Stabilized horovector of the sequence, or a :class:`DivergenceReport`."""
    if len(ys) < w:
        raise ValueError(f"sequence shorter than the stabilization window {w}")
    tail = [horofunction_vector(space, y, R) for y in ys[-w:]]
    first = tail[0].values
    bad = [tail[0].points[i] for i in range(len(first))
           if any(v.values[i] != first[i] for v in tail[1:])]
    label = f"limit of {len(ys)} points"
    if bad:
        return DivergenceReport(R, w, bad, label)
    return HoroVector(R, tail[0].points, first, label)


def finite_difference(b1: HoroVector, b2: HoroVector) -> int:
    """``max |b1 - b2|`` over the ball; a lower bound for the sup norm."""
    if b1.radius != b2.radius or b1.points != b2.points:
        raise ValueError("horovectors live on different balls")
    return max((abs(a - b) for a, b in zip(b1.values, b2.values)), default=0)


def busemann_cocycle(b: HoroVector, x: Word, y: Word) -> int:
    return b[x] - b[y]


# -- shadows ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShadowSpec:
    source: Word
    target: Word
    r: int = 0
    partial: bool = False
    F: tuple = ()
    semantics: str = "canonical"

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("r must be non-negative")
        if self.partial and not self.F:
            raise ValueError("partial shadows need a non-empty F")
        if self.semantics not in ("canonical", "some"):
            raise ValueError("semantics is 'canonical' or 'some'")


def _ball_around(space: ModelSpace, c: Word, r: int) -> list:
    return [space.multiply(c, v) for v in space.ball(r)]


def in_shadow(space: ModelSpace, spec: ShadowSpec, z: Word) -> bool:
    x, y, r = spec.source, spec.target, spec.r
    d = space.distance
    if spec.semantics == "canonical":
        verts = space.geodesic(x, z).vertices
        if not spec.partial:
            # the canonical geodesic is a left translate, so only vertices with
            # |d(x,v) - d(x,y)| <= r can be close to y
            dxy = d(x, y)
            lo = max(0, dxy - r)
            return any(d(v, y) <= r for v in verts[lo:dxy + r + 1])
        near_y = min(d(v, y) for v in verts)
        if near_y > r:
            return False
        for f in spec.F:
            yf = space.multiply(y, f)
            if min(d(v, yf) for v in verts) <= r:
                return True
        return False
    dxz = d(x, z)
    ys = [v for v in _ball_around(space, y, r) if d(x, v) + d(v, z) == dxz]
    if not spec.partial:
        return bool(ys)
    if not ys:
        return False
    for f in spec.F:
        yf = space.multiply(y, f)
        for v2 in _ball_around(space, yf, r):
            if d(x, v2) + d(v2, z) != dxz:
                continue
            for v1 in ys:
                a, b = (v1, v2) if d(x, v1) <= d(x, v2) else (v2, v1)
                if d(x, a) + d(a, b) + d(b, z) == dxz:
                    return True
    return False


def shadow_members(space: ModelSpace, spec: ShadowSpec, candidates: Iterable[Word]) -> Iterator[Word]:
    for z in candidates:
        if in_shadow(space, spec, z):
            yield z


# -- conical witnesses ------------------------------------------------------------------------

def _spread(space: ModelSpace, f: Word, h: Word, x: Word, y: Word, start: int, limit: int):
    """``d_X(x, y)`` for ``X = h Ax(f)``, doubling the window until conclusive."""
    W = start
    while True:
        X = Axis(space, f, h, W)
        try:
            a = X.project_indices(x)
            b = X.project_indices(y)
            if a[2] and b[2]:
                ts = [X.points[k][1] for k in a[1] + b[1]]
                return X, max(ts) - min(ts)
        except InconclusiveWindow:
            pass
        if W >= limit:
            raise InconclusiveWindow(f"window {W} too small for {X!r}", axis=X)
        W = min(2 * W, limit)


@dataclass
class ConicalWitness:
    L: int
    axes: list
    spreads: list
    barriers: list = field(default_factory=list)

    def record(self, space: ModelSpace) -> dict:
        return {"L": self.L, "count": len(self.axes),
                "axes": [X.label() for X in self.axes], "spreads": self.spreads,
                "barriers": [b.record(space) for b in self.barriers]}


def conical_witness(space: ModelSpace, ray: Sequence[Word], F: Sequence[Word], r: int, L: int,
                    x: Word = IDENTITY) -> ConicalWitness:
    """Translated ``F``-axes met by the ray with ``d_X(x, ray end) >= L``.

    The axes are found through ``(r, f)``-barriers on the ray.
    """
    gamma = GeodesicPath(tuple(ray))
    if any(space.distance(a, b) != 1 for a, b in zip(ray, ray[1:])):
        raise WordError("ray vertices are not consecutive")
    if space.distance(ray[0], ray[-1]) != len(ray) - 1:
        raise WordError("ray prefix is not geodesic")
    if not F:
        return ConicalWitness(L, [], [], [])
    bars = find_barriers(space, gamma, F, r)
    seen = {}
    for b in bars:
        X = Axis(space, b.f, b.h, 4 * space.length(b.f) + 2 * r)
        if X.key in seen:
            continue
        seen[X.key] = b
    axes, spreads, wits = [], [], []
    limit = 2 * len(ray) + 4 * max(space.length(f) for f in F) + 2 * r
    for key, b in seen.items():
        X, sp = _spread(space, b.f, b.h, x, ray[-1], 4 * space.length(b.f) + 2 * r, limit)
        if sp >= L:
            axes.append(X)
            spreads.append(sp)
            wits.append(b)
    return ConicalWitness(L, axes, spreads, wits)


# -- Myrberg statistics ------------------------------------------------------------------------------

@dataclass
class MyrbergStats:
    length: int
    r: int
    depths: tuple
    counts: dict

    def positive(self) -> bool:
        return all(c[-1] > 0 for c in self.counts.values()) if self.counts else False

    def record(self, space: ModelSpace) -> dict:
        return {"length": self.length, "r": self.r, "depths": list(self.depths),
                "counts": {space.format(f): c for f, c in self.counts.items()}}


def random_reduced_ray(space: ModelSpace, length: int, rng: np.random.Generator) -> list:
    """Unit steps of a uniformly random geodesic ray in a free group."""
    if not space.is_tree:
        raise ValueError("random reduced rays are defined for free groups")
    gens = space.generators
    inv = {i: gens.index(space.inverse(g)) for i, g in enumerate(gens)}
    k = len(gens)
    out = []
    prev = None
    for _ in range(length):
        if prev is None:
            i = int(rng.integers(k))
        else:
            i = int(rng.integers(k - 1))
            if i >= inv[prev]:
                i += 1
        out.append(gens[i])
        prev = i
    return out


def myrberg_stats(space: ModelSpace, steps: Sequence[Word], F: Sequence[Word], r: int) -> MyrbergStats:
    """Distinct ``(r, f)``-barriers on the prefixes of length N/4, N/2, N.

    ``steps`` are the unit increments of the ray from o.  A barrier is
    identified by its relative position, so long rays are never multiplied out.
    """
    N = len(steps)
    depths = (N // 4, N // 2, N)
    counts = {}
    for f in F:
        first_seen = {}
        for _, i, w, j in barrier_hits(space, steps, [f], r):
            key = _canonical_offset(space, steps, i, w, r)
            # both h and hf must be near the prefix, so the barrier appears at max(i, j)
            end = max(i, j)
            if key not in first_seen or end < first_seen[key]:
                first_seen[key] = end
        ends = sorted(first_seen.values())
        counts[f] = [int(np.searchsorted(ends, dd, side="right")) for dd in depths]
    return MyrbergStats(N, r, depths, counts)


def _canonical_offset(space: ModelSpace, steps, i: int, w: Word, r: int) -> tuple:
    """Name ``h = gamma_i w`` by its nearest ray vertex ``k`` and ``gamma_k^{-1} h``."""
    best = (space.length(w), i, w)
    seg = IDENTITY
    for k in range(i + 1, min(len(steps), i + r) + 1):
        seg = space.multiply(seg, steps[k - 1])          # gamma_i^{-1} gamma_k
        off = space.multiply(space.inverse(seg), w)
        best = min(best, (space.length(off), k, off))
    seg = IDENTITY
    for k in range(i - 1, max(0, i - r) - 1, -1):
        seg = space.multiply(seg, space.inverse(steps[k]))
        off = space.multiply(space.inverse(seg), w)
        best = min(best, (space.length(off), k, off))
    return best[1], best[2]


# -- north-south dynamics ------------------------------------------------------------------------------

def ns_dynamics(space: ModelSpace, h: Word, U: ShadowSpec, V: ShadowSpec, samples: Sequence[Word],
                n_max: int) -> int:
    """Least ``n <= n_max`` with ``h^n z`` in ``U`` for all samples outside ``V`` and
    ``h^-n z`` in ``V`` for all samples outside ``U``."""
    if not h:
        raise SearchFailure("the identity has no north-south dynamics", [])
    outside_v = [z for z in samples if not in_shadow(space, V, z)]
    outside_u = [z for z in samples if not in_shadow(space, U, z)]
    hp = IDENTITY
    hm = IDENTITY
    hinv = space.inverse(h)
    worst = None
    for n in range(n_max + 1):
        bad = [z for z in outside_v if not in_shadow(space, U, space.multiply(hp, z))]
        bad += [z for z in outside_u if not in_shadow(space, V, space.multiply(hm, z))]
        if not bad:
            return n
        worst = bad[0]
        hp = space.multiply(hp, h)
        hm = space.multiply(hm, hinv)
    raise SearchFailure(f"no n <= {n_max} works", [{"worst_sample": space.format(worst)}])


# -- finite-difference invariants ----------------------------------------------------------------------

@dataclass
class DifferenceInstance:
    bound: int
    value: int
    C: int
    stabilized: bool

    @property
    def passed(self) -> bool:
        return self.stabilized and self.value <= self.bound


def _stable_vector(space: ModelSpace, seq: Sequence[Word], R: int, w: int):
    res = horo_limit(space, seq, R, w)
    return res if isinstance(res, HoroVector) else None


def exiting_projection_instance(space: ModelSpace, X_base: Word, C: int, tails: tuple, R: int,
                                k0: int = 6, w: int = 5, g: Word = IDENTITY) -> DifferenceInstance:
    """Interleaved sequence ``y_k = g u^k t_{k mod 2}``: its projections to
    ``g Ax(u)`` exit, and the two subsequences give horovectors that must
    differ by at most ``4C``."""
    u = Axis(space, X_base).root
    ys = [space.product_of(g, space.power(u, k), tails[k % 2]) for k in range(k0, k0 + 4 * w)]
    b1 = _stable_vector(space, ys[0::2], R, w)
    b2 = _stable_vector(space, ys[1::2], R, w)
    if b1 is None or b2 is None:
        return DifferenceInstance(4 * C, -1, C, False)
    return DifferenceInstance(4 * C, finite_difference(b1, b2), C, True)


def exiting_axes_instance(space: ModelSpace, ray_steps: Sequence[Word], f: Word, C: int, tails: tuple,
                          R: int, k0: int = 6, w: int = 5) -> DifferenceInstance:
    """Axes ``X_k = p_k Ax(f)`` along a ray prefix ``p_k`` exit; points
    ``y_k = p_k f^2 t`` have ``[o, y_k]`` through ``N_C(X_k)``.  Two tail
    choices give horovectors that must differ by at most ``20C``."""
    prefixes = [IDENTITY]
    for st in ray_steps:
        prefixes.append(space.multiply(prefixes[-1], st))
    ks = range(k0, min(len(prefixes), k0 + 2 * w))
    f2 = space.power(f, 2)
    seqs = []
    for t in tails:
        seq = [space.product_of(prefixes[k], f2, t) for k in ks]
        for k, y in zip(ks, seq):
            X = Axis(space, f, prefixes[k], 2 * space.length(f2) + 4)
            gam = space.geodesic(IDENTITY, y).vertices
            if min(X.distance_to(v) for v in gam) > C:
                raise SearchFailure("constructed point misses N_C of its axis", [{"k": k}])
        seqs.append(seq)
    b1 = _stable_vector(space, seqs[0], R, w)
    b2 = _stable_vector(space, seqs[1], R, w)
    if b1 is None or b2 is None:
        return DifferenceInstance(20 * C, -1, C, False)
    return DifferenceInstance(20 * C, finite_difference(b1, b2), C, True)


def random_word(space: ModelSpace, length: int, rng: np.random.Generator, first_factor_not=None) -> Word:
    """Random word of the given length built from random generator steps without cancellation."""
    gens = space.generators
    w = IDENTITY
    tries = 0
    while space.length(w) < length:
        g = gens[int(rng.integers(len(gens)))]
        nxt = space.multiply(w, g)
        if space.length(nxt) <= space.length(w):
            continue
        if not w and first_factor_not is not None and g[0][0] == first_factor_not:
            tries += 1
            if tries > 1000:
                raise RuntimeError("cannot start word outside the given factor")
            continue
        w = nxt
    return w
