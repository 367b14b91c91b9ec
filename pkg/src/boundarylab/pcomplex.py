"""Projection axioms, projection complexes and visual spheres over axis families.

A family stores, for every ordered pair ``(U, V)`` of distinct axes, the
parameter interval ``[lo, hi]`` on ``U`` spanned by ``pi_U(V)``.  Axes are
geodesic paths, so ``d_U(V, W)`` is the length of the hull of two intervals
and every triple scan reduces to array arithmetic.

Raw projection distances are used throughout.  No symmetrisation is applied.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cmp_to_key
from typing import Optional, Sequence

import numpy as np

from .contracting import (AdmissibilityError, AdmissiblePath, Axis, fellow_travel_check,
                          measured_constants, path_on_axis_pieces, verify_admissible)
from .errors import CapabilityError, EnumerationCapError, InconclusiveWindow, OrderError
from .space import IDENTITY, ModelSpace, Word


# -- family ------------------------------------------------------------------------

def family_axes(space: ModelSpace, F: Sequence[Word], R_fam: int, window: int) -> list:
    """Distinct axes ``g Ax(f)`` with ``|g| <= R_fam``, centred at their closest point to o.

    Ordered by type (position of ``f`` in ``F``), then by the length and normal
    form of the closest point.  Types sharing a root collapse onto the first.
    """
    seen = {}
    for t, f in enumerate(F):
        base = Axis(space, f, IDENTITY, window)
        for g in space.ball(R_fam):
            X = Axis(space, base.root, g, window)
            if X.key not in seen:
                seen[X.key] = (t, X)
    out = []
    for key, (t, X) in seen.items():
        out.append((t, space.length(key[1]), key[1], X.recentered(window)))
    out.sort(key=lambda e: (e[0], e[1], e[2]))
    return [(t, X) for t, _, _, X in out]


class AxisFamily:
    """Finite piece of the family of translated axes, with its projection table."""

    def __init__(self, space: ModelSpace, F: Sequence[Word], R_fam: int,
                 window: Optional[int] = None, axes: Optional[Sequence[Axis]] = None,
                 types: Optional[Sequence[int]] = None):
        self.space = space
        self.F = tuple(F)
        self.R_fam = R_fam
        if window is None:
            longest = max(Axis(space, f).root_length for f in F)
            window = 2 * R_fam + 2 * longest + 4
        self.window = window
        if axes is None:
            pairs = family_axes(space, F, R_fam, window)
            axes = [X for _, X in pairs]
            types = [t for t, _ in pairs]
        self.axes = list(axes)
        self.types = list(types) if types is not None else [0] * len(self.axes)
        self._lo = None
        self._hi = None

    @classmethod
    def from_axes(cls, space: ModelSpace, axes: Sequence[Axis], types=None) -> "AxisFamily":
        uniq = {}
        for i, X in enumerate(axes):
            uniq.setdefault(X.key, (X, types[i] if types else 0))
        fam = cls(space, [X.root for X, _ in uniq.values()], 0,
                  window=max(X.window for X, _ in uniq.values()),
                  axes=[X for X, _ in uniq.values()], types=[t for _, t in uniq.values()])
        return fam

    def __len__(self):
        return len(self.axes)

    def labels(self) -> list:
        return [X.label() for X in self.axes]

    def index(self, X: Axis) -> int:
        for i, Y in enumerate(self.axes):
            if Y.key == X.key:
                return i
        raise KeyError(repr(X))

    def boundary_flags(self) -> list:
        """Axes whose closest point to o sits on the outer shell of the family."""
        return [self.space.length(X.key[1]) >= self.R_fam for X in self.axes]

    def _check_work(self, amount: int, what: str):
        if amount > self.space.cap:
            raise EnumerationCapError(what, self.space.cap)

    def projection_interval(self, i: int, j: int) -> tuple:
        """Parameter interval of ``pi_{U_i}(U_j)`` on ``U_i``."""
        U, V = self.axes[i], self.axes[j]
        lo = hi = None
        for y in V.words:
            _, idx, conclusive = U.project_indices(y)
            if not conclusive:
                raise InconclusiveWindow(f"projection of {V!r} onto {U!r} reaches the window edge",
                                         axis=U, point=y)
            for k in idx:
                t = U.points[k][1]
                lo = t if lo is None or t < lo else lo
                hi = t if hi is None or t > hi else hi
        return lo, hi

    def table(self):
        """``(LO, HI)`` integer arrays indexed ``[U, V]``; the diagonal is unused."""
        if self._lo is None:
            n = len(self.axes)
            self._check_work(n * n, "projection_pairs")
            lo = np.zeros((n, n), dtype=np.int64)
            hi = np.zeros((n, n), dtype=np.int64)
            for i in range(n):
                for j in range(n):
                    if i != j:
                        lo[i, j], hi[i, j] = self.projection_interval(i, j)
            self._lo, self._hi = lo, hi
        return self._lo, self._hi

    def pi_diameter(self, i: int, j: int) -> int:
        lo, hi = self.table()
        return int(hi[i, j] - lo[i, j])

    def d(self, u: int, v: int, w: int) -> int:
        """``d_U(V, W)`` for family indices."""
        lo, hi = self.table()
        return int(max(hi[u, v], hi[u, w]) - min(lo[u, v], lo[u, w]))

    def d_matrix(self, u: int) -> np.ndarray:
        """``M[v, w] = d_U(V, W)`` for fixed ``U``."""
        lo, hi = self.table()
        return np.maximum.outer(hi[u], hi[u]) - np.minimum.outer(lo[u], lo[u])

    def d_point(self, u: int, x: Word, y: Word) -> int:
        """``d_U(x, y)`` for points."""
        U = self.axes[u]
        ts = []
        for p in (x, y):
            if p in U.word_set:
                # a point of the window is its own unique nearest point
                ts.append(U.points[U.index_of[p]][1])
                continue
            _, idx, conclusive = U.project_indices(p)
            if not conclusive:
                raise InconclusiveWindow(f"projection onto {U!r} reaches the window edge", axis=U, point=p)
            ts += [U.points[k][1] for k in idx]
        return max(ts) - min(ts)


# -- axioms ------------------------------------------------------------------------------

@dataclass
class AxiomReport:
    kappa: int
    axiom1: bool
    axiom2: bool
    axiom3: bool
    violation1: Optional[tuple] = None
    violation2: Optional[tuple] = None
    max_large_set: int = 0
    minimal_kappa: Optional[int] = None
    size: int = 0

    @property
    def passed(self) -> bool:
        return self.axiom1 and self.axiom2 and self.axiom3

    def record(self) -> dict:
        return {"kappa": self.kappa, "passed": self.passed, "axiom1": self.axiom1,
                "axiom2": self.axiom2, "axiom3": self.axiom3,
                "violation1": self.violation1, "violation2": self.violation2,
                "max_large_set": self.max_large_set, "minimal_kappa": self.minimal_kappa,
                "size": self.size}


def check_axioms(family: AxisFamily, kappa: Optional[int] = None) -> AxiomReport:
    """Exhaustive check over ordered triples.  ``kappa=None`` scans for the least value.

    Axiom (3) is finite by construction; the largest set
    ``{U : d_U(V, W) > kappa}`` is reported.
    """
    n = len(family)
    if n <= 1:
        return AxiomReport(kappa or 0, True, True, True, minimal_kappa=0, size=n)
    family._check_work(n ** 3, "axiom_triples")
    lo, hi = family.table()
    off = ~np.eye(n, dtype=bool)
    diam = np.where(off, hi - lo, -1)
    k1 = int(diam.max())
    # k2 = max over distinct (U, V, W) of min(d_V(U, W), d_U(V, W))
    k2 = 0
    worst2 = None
    mats = [family.d_matrix(u) for u in range(n)]
    for v in range(n):
        Dv = mats[v]                       # Dv[u, w] = d_V(U, W)
        Du = np.stack([mats[u][v] for u in range(n)])   # Du[u, w] = d_U(V, W)
        m = np.minimum(Dv, Du)
        m[v, :] = -1
        m[:, v] = -1
        np.fill_diagonal(m, -1)
        a = int(m.max())
        if a > k2:
            k2 = a
            u, w = np.unravel_index(int(m.argmax()), m.shape)
            worst2 = (int(u), v, int(w))
    minimal = max(k1, k2)
    if kappa is None:
        kappa = minimal
    ok1 = k1 <= kappa
    v1 = None
    if not ok1:
        u, v = np.unravel_index(int(diam.argmax()), diam.shape)
        v1 = (int(u), int(v), k1)
    ok2 = k2 <= kappa
    v2 = None
    if not ok2:
        # first violating triple in index order
        for v in range(n):
            Dv = mats[v]
            Du = np.stack([mats[u][v] for u in range(n)])
            bad = (Dv > kappa) & (Du > kappa)
            bad[v, :] = False
            bad[:, v] = False
            np.fill_diagonal(bad, False)
            if bad.any():
                u, w = np.argwhere(bad)[0]
                v2 = (int(u), v, int(w))
                break
    counts = np.zeros((n, n), dtype=np.int64)
    for u in range(n):
        M = mats[u] > kappa
        M[u, :] = False
        M[:, u] = False
        counts += M
    np.fill_diagonal(counts, 0)
    largest = int(counts.max())
    return AxiomReport(kappa, ok1, ok2, True, v1, v2, largest, minimal, n)


def large_projections(family: AxisFamily, v: int, w: int, threshold: int) -> list:
    """The exact set ``{U : d_U(V, W) > threshold}`` (``U`` distinct from ``V``, ``W``)."""
    out = []
    for u in range(len(family)):
        if u not in (v, w) and family.d(u, v, w) > threshold:
            out.append(u)
    return out


# -- intervals --------------------------------------------------------------------------------

def _order_key(family: AxisFamily, v: int, labels):
    lo, hi = family.table()

    def cmp(a, b):
        if a == b:
            return 0
        if a == v:
            return -1
        if b == v:
            return 1
        da = family.d(a, v, b)
        db = family.d(b, v, a)
        if da != db:
            return -1 if da > db else 1
        return -1 if labels[a] < labels[b] else 1

    return cmp


@dataclass
class Interval:
    v: int
    w: int
    K: int
    members: list
    sandwich_D: int = 0

    def record(self, family: AxisFamily) -> dict:
        return {"V": family.axes[self.v].label(), "W": family.axes[self.w].label(), "K": self.K,
                "members": [family.axes[i].label() for i in self.members], "D": self.sandwich_D}


def sandwich_defect(family: AxisFamily, members: Sequence[int]) -> int:
    """Least ``D`` with the order sandwich inequalities on all ordered triples of ``members``.

    The upper comparison ``d_{U1}(U0, U2) <= d_{U1}(V, W)`` is given the same
    slack ``D``; with raw projections it can exceed by an overlap length.
    """
    if len(members) < 3:
        return 0
    v, w = members[0], members[-1]
    D = 0
    for i, j, k in itertools.combinations(range(len(members)), 3):
        a, b, c = members[i], members[j], members[k]
        ref = family.d(b, v, w) if b not in (v, w) else 0
        mid = family.d(b, a, c)
        D = max(D, ref - mid, mid - ref, family.d(a, b, c), family.d(c, a, b))
    return D


def interval_set(family: AxisFamily, K: int, v: int, w: int, D: Optional[int] = None) -> Interval:
    """``F_K[V, W]`` in its total order, least element ``V`` and greatest ``W``.

    ``U < U'`` when ``d_U(V, U') > d_{U'}(V, U)``; ties break by label.  The
    order is checked to be consistent on every pair; with ``D`` given the
    sandwich inequalities are enforced too.
    """
    if v == w:
        return Interval(v, w, K, [v])
    labels = family.labels()
    inner = large_projections(family, v, w, K)
    cmp = _order_key(family, v, labels)
    members = [v] + sorted(inner, key=cmp_to_key(cmp)) + [w]
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            a, b = members[i], members[j]
            if b == w:
                continue
            if cmp(a, b) >= 0:
                raise OrderError(f"order not total at K={K}", triple=(v, a, b))
    dd = sandwich_defect(family, members)
    if D is not None and dd > D:
        raise OrderError(f"sandwich needs D={dd} > {D} at K={K}", triple=(v, w, dd))
    return Interval(v, w, K, members, dd)


def all_intervals(family: AxisFamily, K: int) -> dict:
    n = len(family)
    out = {}
    for v in range(n):
        for w in range(n):
            if v != w:
                out[v, w] = interval_set(family, K, v, w)
    return out


# -- the complex --------------------------------------------------------------------------------

@dataclass
class PCGraph:
    K: int
    labels: list
    adjacency: list
    warnings: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def edges(self) -> list:
        return [(i, j) for i, nb in enumerate(self.adjacency) for j in nb if i < j]

    def distances_from(self, src: int) -> list:
        dist = [-1] * self.n
        dist[src] = 0
        q = deque([src])
        while q:
            x = q.popleft()
            for y in self.adjacency[x]:
                if dist[y] < 0:
                    dist[y] = dist[x] + 1
                    q.append(y)
        return dist

    def distance_matrix(self) -> np.ndarray:
        return np.array([self.distances_from(i) for i in range(self.n)], dtype=np.int64)

    def is_connected(self) -> bool:
        return self.n == 0 or min(self.distances_from(0)) >= 0

    def to_text(self) -> str:
        """Adjacency list: ``index<TAB>label<TAB>neighbour indices``."""
        lines = [f"# projection complex K={self.K} vertices={self.n} edges={len(self.edges)}"]
        for i, (lab, nb) in enumerate(zip(self.labels, self.adjacency)):
            lines.append(f"{i}\t{lab}\t{' '.join(map(str, sorted(nb)))}")
        return "\n".join(lines) + "\n"

    def to_networkx(self):
        import networkx as nx
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g


def separated_pairs(family: AxisFamily, K: int) -> np.ndarray:
    """``S[v, w]`` true when some third ``U`` has ``d_U(V, W) > K``."""
    n = len(family)
    S = np.zeros((n, n), dtype=bool)
    for u in range(n):
        M = family.d_matrix(u) > K
        M[u, :] = False
        M[:, u] = False
        S |= M
    np.fill_diagonal(S, False)
    return S


def build_complex(family: AxisFamily, K: int, check_intervals: bool = True) -> PCGraph:
    """Edge ``U V`` iff ``F_K(U, V)`` is empty.  Connectivity and interval paths are checked."""
    n = len(family)
    S = separated_pairs(family, K)
    adj = [[j for j in range(n) if j != i and not S[i, j]] for i in range(n)]
    g = PCGraph(K, family.labels(), adj)
    if not g.is_connected():
        g.warnings.append(f"disconnected at K={K}")
    if check_intervals:
        adjset = [set(a) for a in adj]
        for v in range(n):
            for w in range(v + 1, n):
                iv = interval_set(family, K, v, w).members
                for a, b in zip(iv, iv[1:]):
                    if b not in adjset[a]:
                        g.warnings.append(f"interval path {v}->{w} not adjacent at {a},{b}")
                        break
    return g


def scan_K(family: AxisFamily, lo: int = 0, hi: int = 64) -> tuple:
    """Least ``K`` where every interval is totally ordered and every interval path is a graph path."""
    last = None
    for K in range(lo, hi + 1):
        try:
            ivs = all_intervals(family, K)
        except OrderError as exc:
            last = exc
            continue
        g = build_complex(family, K, check_intervals=False)
        adjset = [set(a) for a in g.adjacency]
        if all(b in adjset[a] for iv in ivs.values() for a, b in zip(iv.members, iv.members[1:])):
            return K, ivs
    raise OrderError(f"no K in [{lo}, {hi}] orders every interval", triple=getattr(last, "triple", None))


def forcing_check(family: AxisFamily, graph: PCGraph, K_hat: int, dist: Optional[np.ndarray] = None):
    """Members of ``F_{K_hat}(X, Z)`` that are off some graph geodesic from X to Z."""
    if dist is None:
        dist = graph.distance_matrix()
    n = len(family)
    bad = []
    for x in range(n):
        for z in range(x + 1, n):
            for u in large_projections(family, x, z, K_hat):
                if dist[x, u] + dist[u, z] != dist[x, z]:
                    bad.append((x, u, z))
    return bad


def scan_K_hat(family: AxisFamily, graph: PCGraph, hi: int = 64) -> int:
    dist = graph.distance_matrix()
    for K_hat in range(graph.K, hi + 1):
        if not forcing_check(family, graph, K_hat, dist):
            return K_hat
    raise OrderError(f"forcing fails up to {hi}")


def tripod_check(family: AxisFamily, intervals: dict) -> list:
    """Triples where ``F_K[U,V]`` leaves ``F_K[U,W] ∪ F_K[W,V]`` in more than two consecutive members."""
    n = len(family)
    sets = {k: frozenset(iv.members) for k, iv in intervals.items()}
    bad = []
    for u in range(n):
        for v in range(n):
            if u == v:
                continue
            order = intervals[u, v].members
            pos = {x: i for i, x in enumerate(order)}
            for w in range(n):
                if w in (u, v):
                    continue
                extra = sets[u, v] - sets[u, w] - sets[w, v]
                if not extra:
                    continue
                idx = sorted(pos[x] for x in extra)
                if len(idx) > 2 or idx[-1] - idx[0] > 1:
                    bad.append((u, v, w))
    return bad


def hyperbolicity_scan(graph: PCGraph, exhaustive_cap: int = 400, samples: int = 20000, seed: int = 0) -> dict:
    """Four-point delta: max over quadruples of half the gap between the two largest pair sums.

    Under this convention a tree has 0 and the 8-cycle has 2.  Above
    ``exhaustive_cap`` vertices a sampled lower bound is returned.
    """
    n = graph.n
    if not graph.is_connected():
        raise CapabilityError("hyperbolicity needs a connected graph")
    D = graph.distance_matrix().astype(np.int64)
    if n < 4:
        return {"delta": 0.0, "mode": "exhaustive", "n": n}
    if n <= exhaustive_cap:
        best = 0
        for x in range(n):
            for y in range(x + 1, n):
                s1 = D[x, y] + D                      # d(x,y) + d(z,w)
                s2 = D[x][:, None] + D[y][None, :]    # d(x,z) + d(y,w)
                s3 = s2.T                              # d(x,w) + d(y,z)
                st = np.sort(np.stack([s1, s2, s3]), axis=0)
                best = max(best, int((st[2] - st[1]).max()))
        return {"delta": best / 2, "mode": "exhaustive", "n": n}
    rng = np.random.default_rng(seed)
    q = rng.integers(0, n, size=(samples, 4))
    x, y, z, w = q.T
    sums = np.stack([D[x, y] + D[z, w], D[x, z] + D[y, w], D[x, w] + D[y, z]])
    sums.sort(axis=0)
    return {"delta": float((sums[2] - sums[1]).max()) / 2, "mode": "sampled_lower_bound", "n": n,
            "seed": seed, "samples": samples}


# -- lifting -------------------------------------------------------------------------------------------

def _projection_point(family: AxisFamily, i: int, j: int) -> Word:
    """A point of ``pi_{U_i}(U_j)`` (the one with the least parameter)."""
    lo, _ = family.table()
    U = family.axes[i]
    t = int(lo[i, j])
    for _, tt, w in U.points:
        if tt == t:
            return w
    raise InconclusiveWindow("projection parameter outside window", axis=U)


def lift_path(family: AxisFamily, K: int, u: Word, v: Word, U: int, V: int) -> AdmissiblePath:
    """Admissible path from ``u`` on ``U`` to ``v`` on ``V`` with saturation ``F_K[U, V]``."""
    space = family.space
    if u not in family.axes[U] or v not in family.axes[V]:
        raise AdmissibilityError("endpoints must lie on their axes")
    if U == V:
        return AdmissiblePath((space.geodesic(u, v),), (family.axes[U],), 0, 0)
    S = interval_set(family, K, U, V).members
    points = [u]
    for a, b in zip(S, S[1:]):
        points += [_projection_point(family, a, b), _projection_point(family, b, a)]
    points.append(v)
    axes = [family.axes[i] for i in S]
    path = path_on_axis_pieces(space, points, axes, 0, 0)
    L, B = measured_constants(space, path)
    path = AdmissiblePath(path.pieces, path.axes, L, B)
    report = verify_admissible(space, path)
    if not report.passed:
        raise AdmissibilityError(f"lifted path not admissible at K={K}", report)
    return path


# -- visual spheres -----------------------------------------------------------------------------------

@dataclass
class VisualSphere:
    n: int
    vertices: list
    points: frozenset
    flagged: list = field(default_factory=list)

    def net(self, family: AxisFamily, L: int) -> frozenset:
        """``T_n'(L)``: points ``v`` of each vertex window with ``d_V(o, v) > L``."""
        out = set()
        for i in self.vertices:
            for w in family.axes[i].orbit_points:
                if family.d_point(i, IDENTITY, w) > L:
                    out.add(w)
        return frozenset(out)

    def slab(self, family: AxisFamily, L: int, delta: int) -> frozenset:
        """``V(L, delta)`` unioned over the sphere's vertices."""
        out = set()
        for i in self.vertices:
            for w in family.axes[i].orbit_points:
                if abs(family.d_point(i, IDENTITY, w) - L) <= delta:
                    out.add(w)
        return frozenset(out)


def visual_spheres(family: AxisFamily, graph: PCGraph, base: int, n_max: int) -> dict:
    """Spheres ``S_n`` around ``base`` with point sets ``T_n`` (windowed orbit points)."""
    dist = graph.distances_from(base)
    flags = family.boundary_flags()
    spheres = []
    for n in range(n_max + 1):
        verts = [i for i, d in enumerate(dist) if d == n]
        pts = frozenset(w for i in verts for w in family.axes[i].orbit_points)
        spheres.append(VisualSphere(n, verts, pts, [i for i in verts if flags[i]]))
    mult = {}
    for sp in spheres:
        for w in sp.points:
            mult[w] = mult.get(w, 0) + 1
    cover = {}
    for i, X in enumerate(family.axes):
        if dist[i] < 0 or dist[i] > n_max:
            continue
        for w in X.orbit_points:
            cover[w] = cover.get(w, 0) + 1
    hist = {}
    for c in cover.values():
        hist[c] = hist.get(c, 0) + 1
    return {"spheres": spheres, "multiplicity": mult,
            "max_multiplicity": max(cover.values(), default=0),
            "min_multiplicity": min(cover.values(), default=0),
            "cover_histogram": dict(sorted(hist.items())),
            "unreached": [i for i, d in enumerate(dist) if d < 0]}


def tn_series(space: ModelSpace, spheres: Sequence[VisualSphere], s: float) -> dict:
    """Per-sphere sums of ``exp(-s |g|)`` with ratio and submultiplicativity tables."""
    sums = [math.fsum(math.exp(-s * space.length(w)) for w in sp.points) for sp in spheres]
    ratios = [sums[n + 1] / sums[n] if sums[n] > 0 else math.inf for n in range(len(sums) - 1)]
    defects = {}
    for n in range(len(sums)):
        for m in range(len(sums) - n):
            if sums[n] > 0 and sums[m] > 0:
                defects[n, m] = sums[n + m] / (sums[n] * sums[m])
    available = [n for n, x in enumerate(sums) if x > 0]
    positive = [sums[n] for n in available]
    # spread over the non-empty spheres; ``complete`` says whether any sphere was empty
    spread = max(positive) / min(positive) if positive else math.inf
    return {"s": s, "sums": sums, "ratios": ratios, "defects": defects,
            "max_defect": max(defects.values(), default=0.0), "spread": spread,
            "available": available, "complete": len(available) == len(sums)}
