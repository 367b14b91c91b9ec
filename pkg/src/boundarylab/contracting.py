"""Shortest projections, contracting certificates, barriers and admissible paths.

An :class:`Axis` is a windowed piece of ``g E(f) o``.  The stabilizer ``E(f)``
is taken to be the cyclic group generated by the primitive root of ``f``
(after cyclic reduction), optionally enlarged by an explicit list of coset
representatives.  Consecutive orbit points are joined by canonical geodesics,
so the point set is a bi-infinite path cut to parameters ``|t| <= W``.
Orbit points are the vertices with parameter divisible by the root length.

Projection minima attained at the last few window parameters are reported as
inconclusive; downstream operations refuse them with
:class:`~boundarylab.errors.InconclusiveWindow` instead of guessing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .errors import AdmissibilityError, InconclusiveWindow, SearchFailure, WordError
from .space import IDENTITY, GeodesicPath, ModelSpace, Word, bfs_ball


# -- elementary group structure ----------------------------------------------

def cyclic_reduction(space: ModelSpace, f: Word):
    """Return ``(c, u)`` with ``f = c u c^{-1}`` and ``u`` cyclically reduced."""
    c = IDENTITY
    u = f
    while len(u) >= 2 and u[0][0] == u[-1][0]:
        x = (u[0],)
        u = space.multiply(space.multiply(space.inverse(x), u), x)
        c = space.multiply(c, x)
    return c, u


def primitive_root(space: ModelSpace, u: Word) -> Word:
    """Smallest ``r`` with ``u = r^k``, for cyclically reduced ``u``."""
    if not u:
        raise WordError("the identity has no axis")
    if len(u) == 1:
        fac, vec = u[0]
        g = 0
        for x in vec:
            g = math.gcd(g, x)
        return ((fac, tuple(x // g for x in vec)),)
    n = len(u)
    for p in range(1, n + 1):
        if n % p == 0 and u[:p] * (n // p) == u:
            return u[:p]
    return u


def word_order_key(space: ModelSpace, w: Word):
    return (space.length(w), w)


def coset_representative(space: ModelSpace, g: Word, u: Word) -> Word:
    """Shortest element of ``g<u>`` (ties broken by normal form order)."""
    lu = space.length(u)
    span = 2 * space.length(g) // max(lu, 1) + 2
    best = None
    for n in range(-span, span + 1):
        x = space.multiply(g, space.power(u, n))
        key = word_order_key(space, x)
        if best is None or key < best:
            best = key
    return best[1]


# -- axes ----------------------------------------------------------------------

class Axis:
    """Windowed axis ``g . Ax(f)``.

    ``window`` is measured in path length: the points are the vertices with
    parameter ``t`` in ``[-window, window]`` where ``t = 0`` is the translate.
    """

    def __init__(self, space: ModelSpace, base: Word, translate: Word = IDENTITY,
                 window: int = 12, cosets: Sequence[Word] = ()):
        if not base:
            raise WordError("an axis needs a non-trivial base element")
        self.space = space
        self.base = base
        self.translate = translate
        self.window = int(window)
        self.cosets = tuple(cosets)
        conj, core = cyclic_reduction(space, base)
        root = primitive_root(space, core)
        inv = space.inverse(root)
        if space.format(inv) < space.format(root):
            root = inv
        self.root = root
        self.root_length = space.length(root)
        self.anchor = space.multiply(translate, conj)

    def __repr__(self):
        s = self.space
        return f"Axis({s.format(self.anchor)} . Ax({s.format(self.root)}), W={self.window})"

    @cached_property
    def key(self):
        """Identity of the underlying infinite set ``anchor . E(root) o``."""
        return (self.root, coset_representative(self.space, self.anchor, self.root), self.cosets)

    def __eq__(self, other):
        return isinstance(other, Axis) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def label(self) -> str:
        s = self.space
        return f"{s.format(self.key[1])}|{s.format(self.root)}"

    def translated(self, h: Word) -> "Axis":
        return Axis(self.space, self.base, self.space.multiply(h, self.translate), self.window, self.cosets)

    def with_window(self, window: int) -> "Axis":
        return Axis(self.space, self.base, self.translate, window, self.cosets)

    def recentered(self, window: Optional[int] = None) -> "Axis":
        """Same infinite axis, window centred at the point closest to o."""
        rep = self.key[1]
        # base is replaced by the root: same E(f), anchor becomes the coset rep
        return Axis(self.space, self.root, rep, self.window if window is None else window, self.cosets)

    @cached_property
    def points(self) -> tuple:
        """Tuple of ``(sheet, t, word)`` for every window vertex."""
        s = self.space
        steps = s.path_from_identity(self.root)[:-1]
        lu = self.root_length
        out = []
        for sheet, c in enumerate((IDENTITY,) + self.cosets):
            start = s.multiply(self.anchor, c)
            nmin = -((self.window + lu - 1) // lu) - 1
            nmax = self.window // lu + 1
            cur = s.multiply(start, s.power(self.root, nmin))
            for n in range(nmin, nmax + 1):
                for j, p in enumerate(steps):
                    t = n * lu + j
                    if -self.window <= t <= self.window:
                        out.append((sheet, t, s.multiply(cur, p)))
                cur = s.multiply(cur, self.root)
        return tuple(out)

    @cached_property
    def words(self) -> tuple:
        return tuple(w for _, _, w in self.points)

    @cached_property
    def word_set(self) -> frozenset:
        return frozenset(self.words)

    @cached_property
    def index_of(self) -> dict:
        out = {}
        for i, w in enumerate(self.words):
            out.setdefault(w, i)
        return out

    @cached_property
    def orbit_points(self) -> tuple:
        lu = self.root_length
        return tuple(w for _, t, w in self.points if t % lu == 0)

    @cached_property
    def _edge_indices(self) -> frozenset:
        lu = self.root_length
        return frozenset(i for i, (_, t, _) in enumerate(self.points)
                         if t > self.window - lu or t < -self.window + lu)

    @property
    def is_path_geodesic(self) -> bool:
        return not self.cosets

    def __contains__(self, w):
        return w in self.word_set

    def distance_to(self, y: Word) -> int:
        d = self.space.distance
        return min(d(y, w) for w in self.words)

    def project_indices(self, y: Word):
        """``(distance, [indices of minimizers], conclusive)``.

        Along a sheet the path is geodesic, so ``t -> d(y, P_t)`` is
        1-Lipschitz; indices whose lower bound exceeds the current best are
        skipped.  The result is the exact minimizer set.
        """
        d = self.space.distance
        words = self.words
        n = len(words)
        if not self.is_path_geodesic:
            vals = [d(y, w) for w in words]
            best = min(vals)
            idx = [i for i, v in enumerate(vals) if v == best]
        else:
            best = min(d(y, words[0]), d(y, words[n // 2]), d(y, words[-1]))
            idx = []
            i = 0
            while i < n:
                v = d(y, words[i])
                if v < best:
                    best = v
                    idx = [i]
                elif v == best:
                    idx.append(i)
                i += max(1, v - best)
        conclusive = not any(i in self._edge_indices for i in idx)
        return best, idx, conclusive

    def diameter_of(self, indices: Iterable[int]) -> int:
        indices = list(indices)
        if not indices:
            return 0
        if self.is_path_geodesic:
            ts = [self.points[i][1] for i in indices]
            return max(ts) - min(ts)
        d = self.space.distance
        ws = [self.words[i] for i in indices]
        return max(d(a, b) for a in ws for b in ws)

    def mask_diameter(self, mask: int) -> int:
        if self.is_path_geodesic:
            lo = (mask & -mask).bit_length() - 1
            hi = mask.bit_length() - 1
            return self.points[hi][1] - self.points[lo][1]
        return self.diameter_of(i for i in range(mask.bit_length()) if mask >> i & 1)


def axis_from_text(space: ModelSpace, text: str, window: int = 12) -> Axis:
    """Parse ``"f"`` or ``"g . f"`` (translate, dot, base)."""
    if "." in text:
        g, f = text.split(".", 1)
        return Axis(space, space.parse(f), space.parse(g), window)
    return Axis(space, space.parse(text), IDENTITY, window)


# -- projections -------------------------------------------------------------------

@dataclass(frozen=True)
class ProjectionResult:
    points: tuple
    indices: tuple
    diameter: int
    distance: int
    conclusive: bool = True


def project(space: ModelSpace, X: Axis, y: Word) -> ProjectionResult:
    """Exact nearest-point set of ``y`` on the window of ``X``."""
    dist, idx, conclusive = X.project_indices(y)
    return ProjectionResult(tuple(X.words[i] for i in idx), tuple(idx),
                            X.diameter_of(idx), dist, conclusive)


def _require(res: ProjectionResult, X: Axis, y) -> ProjectionResult:
    if not res.conclusive:
        raise InconclusiveWindow(f"projection of {X.space.format(y)} onto {X!r} hits the window edge; "
                                 "enlarge the window", axis=X, point=y)
    return res


def project_set(space: ModelSpace, X: Axis, ys: Iterable[Word]) -> tuple:
    """Union of projections; returns ``(index set, min distance)``; raises on inconclusive."""
    idx = set()
    dmin = None
    for y in ys:
        res = _require(project(space, X, y), X, y)
        idx.update(res.indices)
        dmin = res.distance if dmin is None else min(dmin, res.distance)
    return frozenset(idx), dmin


def proj_distance(space: ModelSpace, U: Axis, x: Word, y: Word) -> int:
    """``d_U(x, y)``: diameter of ``pi_U(x) ∪ pi_U(y)``."""
    a = _require(project(space, U, x), U, x)
    b = _require(project(space, U, y), U, y)
    return U.diameter_of(set(a.indices) | set(b.indices))


# -- contracting certificates ----------------------------------------------------------

@dataclass(frozen=True)
class ContractingCertificate:
    axis: str
    C: int
    radius: int
    certified: bool
    counterexample: Optional[dict] = None
    max_diameter: int = 0
    balls_tested: int = 0

    @property
    def verdict(self) -> str:
        return "certified" if self.certified else "counterexample"

    def record(self, space: ModelSpace) -> dict:
        out = {"axis": self.axis, "C": self.C, "radius": self.radius, "verdict": self.verdict,
               "max_diameter": self.max_diameter, "balls_tested": self.balls_tested,
               "counterexample": None}
        if self.counterexample:
            ce = dict(self.counterexample)
            ce["center"] = space.format(ce["center"])
            out["counterexample"] = ce
        return out


def ball_projection_scan(space: ModelSpace, X: Axis, R_v: int):
    """For every centre ``c`` in ``B(o, R_v)`` off ``X``, the projection diameter
    of the largest ball ``B(c, d(c, X) - 1)`` disjoint from ``X``.

    Balls are restricted to ``B(o, R_v)``: a point belongs to the tested ball if
    it is reached from the centre by at most ``radius`` steps inside the region.
    Yields ``(center, radius, diameter)``.
    """
    region = list(space.ball(R_v))
    index = {w: i for i, w in enumerate(region)}
    nbrs = [[index[x] for x in space.neighbors(w) if x in index] for w in region]
    masks = []
    radii = []
    for w in region:
        dist, idx, conclusive = X.project_indices(w)
        if not conclusive:
            raise InconclusiveWindow(f"projection of {space.format(w)} onto {X!r} hits the window "
                                     "edge; enlarge the window", axis=X, point=w)
        m = 0
        for i in idx:
            m |= 1 << i
        masks.append(m)
        radii.append(dist - 1)
    cur = masks
    for rho in range(0, max(radii) + 1):
        if rho:
            cur = [m | _or_all(cur, nb) for m, nb in zip(cur, nbrs)]
        for i, r in enumerate(radii):
            if r == rho:
                yield region[i], rho, X.mask_diameter(cur[i])


def _or_all(masks, idx):
    out = 0
    for j in idx:
        out |= masks[j]
    return out


def certify_contracting(space: ModelSpace, X: Axis, C: int, R_v: int) -> ContractingCertificate:
    """Exhaustive ball test of the C-contracting property within ``B(o, R_v)``.

    On failure the reported counterexample is the ball with the largest
    projection diameter (first in scan order among ties).
    """
    if C < 0:
        raise ValueError("C must be non-negative")
    worst = None
    tested = 0
    max_diam = 0
    for center, rho, diam in ball_projection_scan(space, X, R_v):
        tested += 1
        max_diam = max(max_diam, diam)
        if diam > C and (worst is None or diam > worst["projection_diameter"]):
            worst = {"center": center, "radius": rho, "projection_diameter": diam}
    return ContractingCertificate(X.label(), C, R_v, worst is None, worst, max_diam, tested)


def smallest_passing(test, lo: int = 0, hi: int = 64) -> Optional[int]:
    """Smallest integer in ``[lo, hi]`` accepted by ``test`` (linear scan)."""
    for v in range(lo, hi + 1):
        if test(v):
            return v
    return None


def contracting_constant(space: ModelSpace, X: Axis, R_v: int) -> int:
    """Smallest ``C`` certified within ``R_v`` (the largest ball projection diameter)."""
    return max((d for _, _, d in ball_projection_scan(space, X, R_v)), default=0)


# -- bounded intersection -----------------------------------------------------------------

def _neighborhood(space: ModelSpace, words: Iterable[Word], r: int) -> dict:
    """Map ``z -> d(z, words)`` for ``z`` within ``r`` of the set (multi-source search)."""
    dist = {}
    frontier = []
    for w in words:
        if w not in dist:
            dist[w] = 0
            frontier.append(w)
    for d in range(1, r + 1):
        nxt = []
        for w in frontier:
            for x in space.neighbors(w):
                if x not in dist:
                    dist[x] = d
                    nxt.append(x)
        frontier = nxt
    return dist


def bounded_intersection(space: ModelSpace, X: Axis, Y: Axis, r: int) -> int:
    """Diameter of ``N_r(X) ∩ N_r(Y)`` over the windows."""
    if X == Y:
        raise ValueError("bounded_intersection needs distinct axes")
    nx = _neighborhood(space, X.words, r)
    ny = _neighborhood(space, Y.words, r)
    common = [z for z in nx if z in ny]
    for A, near in ((X, _neighborhood(space, [X.words[i] for i in X._edge_indices], r)),
                    (Y, _neighborhood(space, [Y.words[i] for i in Y._edge_indices], r))):
        if any(z in near for z in common):
            raise InconclusiveWindow(f"intersection reaches the window edge of {A!r}", axis=A)
    if not common:
        return 0
    d = space.distance
    return max(d(a, b) for a in common for b in common)


# -- barriers --------------------------------------------------------------------------------

@dataclass(frozen=True)
class BarrierWitness:
    h: Word
    f: Word
    r: int
    position_h: int
    position_hf: int

    def record(self, space: ModelSpace) -> dict:
        return {"h": space.format(self.h), "f": space.format(self.f), "r": self.r,
                "positions": [self.position_h, self.position_hf]}


def path_steps(space: ModelSpace, vertices: Sequence[Word]) -> list:
    inv = space.inverse
    return [space.multiply(inv(a), b) for a, b in zip(vertices, vertices[1:])]


def _barrier_table(space: ModelSpace, f: Word, r: int) -> dict:
    """``{w f w' : |w|, |w'| <= r}`` mapped to the set of left parts ``w``."""
    ball = list(space.ball(r))
    table = {}
    for w in ball:
        wf = space.multiply(w, f)
        for w2 in ball:
            table.setdefault(space.multiply(wf, w2), set()).add(w)
    return table


def barrier_hits(space: ModelSpace, steps: Sequence[Word], F: Sequence[Word], r: int):
    """Barriers on a geodesic given by its unit steps from a start vertex.

    Yields ``(f, i, w, j)``: the barrier is ``h = gamma_i w`` with
    ``d(h f, gamma_j) <= r``.  Works on relative data only, so rays with
    ``10^5`` vertices never materialise long words.
    """
    if space.is_tree:
        yield from _tree_barrier_hits(space, steps, F, r)
        return
    n = len(steps)
    for f in F:
        table = _barrier_table(space, f, r)
        lf = space.length(f)
        lo_len, hi_len = max(0, lf - 2 * r), lf + 2 * r
        for i in range(n + 1):
            # forward segments gamma_i^{-1} gamma_j for j >= i
            seg = IDENTITY
            for j in range(i, min(n, i + hi_len) + 1):
                if j > i:
                    seg = space.multiply(seg, steps[j - 1])
                if j - i >= lo_len and seg in table:
                    for w in table[seg]:
                        yield f, i, w, j
            seg = IDENTITY
            for j in range(i - 1, max(0, i - hi_len) - 1, -1):
                seg = space.multiply(seg, space.inverse(steps[j]))
                if i - j >= lo_len and seg in table:
                    for w in table[seg]:
                        yield f, i, w, j


def _tree_barrier_hits(space: ModelSpace, steps, F, r):
    """Same output as the generic scan.  In a tree the segment between two
    vertices of a geodesic is spelled by the substring of its letters, so
    the lookup runs on strings."""
    code = {g: chr(65 + k) for k, g in enumerate(space.generators)}
    text = "".join(code[((st[0][0], st[0][1]),)] if len(st) == 1 else "?" for st in steps)

    def spell(w):
        return "".join(code[x] for x in space.letters(w))

    n = len(steps)
    for f in F:
        table = _barrier_table(space, f, r)
        fwd = {spell(k): v for k, v in table.items()}
        bwd = {spell(space.inverse(k)): v for k, v in table.items()}
        lengths = sorted({len(k) for k in fwd})
        hits = []
        for i in range(n + 1):
            for m in lengths:
                if i + m <= n:
                    seg = text[i:i + m]
                    if seg in fwd:
                        for w in fwd[seg]:
                            hits.append((i, w, i + m))
                if m and i - m >= 0:
                    seg = text[i - m:i]
                    if seg in bwd:
                        for w in bwd[seg]:
                            hits.append((i, w, i - m))
        for i, w, j in hits:
            yield f, i, w, j


def _nearest_index(space: ModelSpace, vertices, h: Word, around: int, r: int) -> int:
    lo = max(0, around - r)
    hi = min(len(vertices) - 1, around + r)
    best = min(range(lo, hi + 1), key=lambda k: (space.distance(vertices[k], h), k))
    return best


def find_barriers(space: ModelSpace, gamma: GeodesicPath, F: Sequence[Word], r: int) -> list:
    """All ``(r, f)``-barriers ``h`` on ``gamma`` for ``f`` in ``F``."""
    if r < 0:
        raise ValueError("r must be non-negative")
    if not F:
        raise ValueError("F must be non-empty")
    verts = gamma.vertices
    steps = path_steps(space, verts)
    seen = {}
    for f, i, w, j in barrier_hits(space, steps, F, r):
        h = space.multiply(verts[i], w)
        key = (h, f)
        if key in seen:
            continue
        hf = space.multiply(h, f)
        seen[key] = BarrierWitness(h, f, r, _nearest_index(space, verts, h, i, r),
                                   _nearest_index(space, verts, hf, j, r))
    return sorted(seen.values(), key=lambda b: (b.position_h, b.position_hf, word_order_key(space, b.h)))


# -- admissible paths ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdmissiblePath:
    """Pieces ``p_0 q_1 p_1 ... q_n p_n``; ``axes[i]`` is the axis of ``p_i``.

    End pieces may be single vertices with axis ``None``.
    """

    pieces: tuple
    axes: tuple
    L: int
    B: int

    def __post_init__(self):
        if len(self.pieces) % 2 != 1:
            raise WordError("an admissible path has an odd number of pieces")
        if len(self.axes) != (len(self.pieces) + 1) // 2:
            raise WordError("need one axis per p-piece")

    @property
    def p_pieces(self):
        return self.pieces[0::2]

    @property
    def q_pieces(self):
        return self.pieces[1::2]

    @property
    def start(self):
        return self.pieces[0].start

    @property
    def end(self):
        return self.pieces[-1].end

    @property
    def saturation(self):
        return [X for X in self.axes if X is not None]

    def vertices(self) -> list:
        out = list(self.pieces[0].vertices)
        for p in self.pieces[1:]:
            out.extend(p.vertices[1:])
        return out


@dataclass
class AdmissibleReport:
    passed: bool
    L: int
    B: int
    rows: list = field(default_factory=list)

    def record(self) -> dict:
        return {"passed": self.passed, "L": self.L, "B": self.B, "rows": self.rows}


def verify_admissible(space: ModelSpace, path: AdmissiblePath) -> AdmissibleReport:
    """Check Long Local and Bounded Projection piece by piece."""
    pieces = path.pieces
    for a, b in zip(pieces, pieces[1:]):
        if a.end != b.start:
            raise WordError("pieces of an admissible path do not concatenate")
    n = len(path.axes) - 1
    rows = []
    ok = True
    for i, X in enumerate(path.axes):
        p = pieces[2 * i]
        row = {"index": i, "length": p.length}
        if X is None:
            row.update(on_axis=None, LL=True, BP=True)
            if 0 < i < n:
                row["LL"] = False
            rows.append(row)
            ok &= row["LL"]
            continue
        need_start = i > 0
        need_end = i < n
        on_axis = (not need_start or p.start in X) and (not need_end or p.end in X)
        long_enough = p.length > path.L if 0 < i < n else True
        bp = []
        for q_index in (2 * i - 1, 2 * i + 1):
            if 0 < q_index < len(pieces):
                idx, _ = project_set(space, X, pieces[q_index].vertices)
                bp.append(X.diameter_of(idx))
        bp_ok = all(x <= path.B for x in bp)
        row.update(on_axis=on_axis, LL=on_axis and long_enough, BP=bp_ok, projection_diameters=bp)
        ok &= row["LL"] and bp_ok
        rows.append(row)
    return AdmissibleReport(ok, path.L, path.B, rows)


@dataclass
class FellowTravelReport:
    passed: bool
    r: int
    z: list
    w: list
    violation: Optional[int] = None
    geodesic_length: int = 0

    def record(self) -> dict:
        return {"passed": self.passed, "r": self.r, "z": self.z, "w": self.w,
                "violation": self.violation, "geodesic_length": self.geodesic_length}


def fellow_travel_check(space: ModelSpace, path: AdmissiblePath, r: int) -> FellowTravelReport:
    """Greedy search for linearly ordered ``z_i, w_i`` on the canonical geodesic."""
    alpha = space.geodesic(path.start, path.end).vertices
    d = space.distance
    zs, ws = [], []
    pos = 0
    for i, p in enumerate(path.p_pieces):
        for target, out in ((p.start, zs), (p.end, ws)):
            k = pos
            while k < len(alpha) and d(alpha[k], target) > r:
                k += 1
            if k == len(alpha):
                return FellowTravelReport(False, r, zs, ws, i, len(alpha) - 1)
            out.append(k)
            pos = k
    return FellowTravelReport(True, r, zs, ws, None, len(alpha) - 1)


def path_on_axis_pieces(space: ModelSpace, points: Sequence[Word], axes: Sequence[Optional[Axis]],
                        L: int, B: int) -> AdmissiblePath:
    """Admissible path through ``points = [x_0, y_0, x_1, y_1, ...]`` with ``p_i = [x_i, y_i]``."""
    pieces = []
    for i in range(0, len(points), 2):
        if i:
            pieces.append(space.geodesic(points[i - 1], points[i]))
        pieces.append(space.geodesic(points[i], points[i + 1]))
    return AdmissiblePath(tuple(pieces), tuple(axes), L, B)


def measured_constants(space: ModelSpace, path: AdmissiblePath) -> tuple:
    """``(L, B)`` that the path attains: ``L`` one below the shortest interior p-piece."""
    n = len(path.axes) - 1
    interior = [path.pieces[2 * i].length for i in range(1, n)]
    L = min(interior) - 1 if interior else 0
    B = 0
    for i, X in enumerate(path.axes):
        if X is None:
            continue
        for q_index in (2 * i - 1, 2 * i + 1):
            if 0 < q_index < len(path.pieces):
                idx, _ = project_set(space, X, path.pieces[q_index].vertices)
                B = max(B, X.diameter_of(idx))
    return max(L, 0), B


# -- truncation and extension ----------------------------------------------------------------

def barrier_axis(space: ModelSpace, witness: BarrierWitness, window: int) -> Axis:
    return Axis(space, witness.f, witness.h, window)


def truncate(space: ModelSpace, gamma: GeodesicPath, barriers: Sequence[BarrierWitness],
             C: int = 0, window: Optional[int] = None) -> AdmissiblePath:
    """Admissible path with the endpoints of ``gamma`` and the barrier axes as saturation.

    Witnesses sharing an axis are merged.  Distinct axes whose stretches along
    ``gamma`` (entry to exit in ``N_C``) interleave are rejected.
    """
    verts = gamma.vertices
    if not barriers:
        piece = GeodesicPath((verts[0],)), gamma, GeodesicPath((verts[-1],))
        return AdmissiblePath(piece, (None, None), 0, 0)
    if window is None:
        window = 2 * len(verts) + 2 * max(b.r for b in barriers) + max(space.length(b.f) for b in barriers)
    axes = {}
    for b in barriers:
        X = barrier_axis(space, b, window)
        axes.setdefault(X.key, X)
    stretches = []
    for X in axes.values():
        near = [k for k, v in enumerate(verts) if X.distance_to(v) <= C]
        if not near:
            raise AdmissibilityError(f"barrier axis {X!r} never enters N_C of the geodesic")
        stretches.append((near[0], near[-1], X))
    stretches.sort(key=lambda s: (s[0], s[1]))
    for (a0, a1, X), (b0, b1, Y) in zip(stretches, stretches[1:]):
        if b0 <= a1:
            raise AdmissibilityError(
                f"barrier axes {X!r} and {Y!r} overlap along the geodesic ({a0}-{a1} vs {b0}-{b1})")
    points = [verts[0], verts[0]]
    ax = [None]
    for entry, exit_, X in stretches:
        z = _require(project(space, X, verts[entry]), X, verts[entry]).points[0]
        w = _require(project(space, X, verts[exit_]), X, verts[exit_]).points[-1]
        points += [z, w]
        ax.append(X)
    points += [verts[-1], verts[-1]]
    ax.append(None)
    path = path_on_axis_pieces(space, points, ax, 0, 0)
    L, B = measured_constants(space, path)
    return AdmissiblePath(path.pieces, path.axes, L, B)


def extend(space: ModelSpace, g: Word, F: Sequence[Word], r: int, probe: Optional[Word] = None):
    """Pick ``f`` in ``F`` so that ``g o`` is an ``(r, f)``-barrier on ``[o, g f probe]``.

    Returns ``(f, witness)``; raises :class:`SearchFailure` with per-``f``
    distances when no choice works.
    """
    if probe is None:
        probe = space.generators[0]
    diagnostics = []
    for f in F:
        gf = space.multiply(g, f)
        end = space.multiply(gf, probe)
        gamma = space.geodesic(IDENTITY, end)
        verts = gamma.vertices
        dg = min(space.distance(g, v) for v in verts)
        dgf = min(space.distance(gf, v) for v in verts)
        diagnostics.append({"f": space.format(f), "d(g,gamma)": dg, "d(gf,gamma)": dgf})
        if max(dg, dgf) <= r:
            for b in find_barriers(space, gamma, [f], r):
                if b.h == g:
                    return f, b
    raise SearchFailure(f"no f in F extends {space.format(g)} at r={r}", diagnostics)
