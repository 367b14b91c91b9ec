"""Poincare series, critical exponents, Patterson-Sullivan estimates and cogrowth.

Sums of exponentials go through ``math.fsum``; counts stay exact integers.

Two measure modes share one interface:

* ``estimator``: atoms ``exp(-s d(x, g))`` over ``|g| <= R`` normalised by the
  truncated series at ``o``;
* ``exact``: the limiting measure on the boundary of a free group, given by
  cylinder counting.  Cylinder masses at other basepoints are obtained by
  splitting into cylinders deep enough that the Busemann cocycle is constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .boundary import ShadowSpec, in_shadow, random_word
from .contracting import find_barriers
from .errors import CapabilityError, EnumerationCapError
from .space import IDENTITY, ModelSpace, SubgroupPredicate, Word


def _counts(space: ModelSpace, pred: Optional[SubgroupPredicate], n_max: int) -> list:
    if pred is None or pred.is_whole:
        return space.sphere_counts(n_max)
    return space.constrained_sphere_counts(n_max, pred)


# -- Poincare series -------------------------------------------------------------------

@dataclass
class PoincareEstimate:
    s: float
    R: int
    total: float
    counts: list
    contributions: list

    def record(self) -> dict:
        return {"s": self.s, "R": self.R, "total": self.total,
                "counts": [int(c) for c in self.counts], "contributions": self.contributions}


def poincare_partial(space: ModelSpace, pred: Optional[SubgroupPredicate], s: float,
                     x: Word = IDENTITY, y: Word = IDENTITY, R: int = 20) -> PoincareEstimate:
    """Truncated ``sum_{g in Gamma, d(x, g y) <= R} exp(-s d(x, g y))``."""
    if s < 0:
        raise ValueError("s must be non-negative")
    if not x and not y:
        counts = _counts(space, pred, R)
    else:
        counts = [0] * (R + 1)
        reach = R + space.length(x) + space.length(y)
        for g in space.ball(reach):
            if pred is not None and not pred.contains(g):
                continue
            dd = space.distance(x, space.multiply(g, y))
            if dd <= R:
                counts[dd] += 1
    contrib = [c * math.exp(-s * n) for n, c in enumerate(counts)]
    return PoincareEstimate(s, R, math.fsum(contrib), counts, contrib)


@dataclass
class ExponentEstimate:
    omega_hat: float
    n_max: int
    width: int
    curve: list
    trend: float
    skipped: list = field(default_factory=list)

    def record(self) -> dict:
        return {"omega_hat": self.omega_hat, "n_max": self.n_max, "width": self.width,
                "trend": self.trend, "skipped": self.skipped,
                "curve": [{"n": n, "count": int(c), "quotient": q, "log_ratio": lr}
                          for n, c, q, lr in self.curve]}


def critical_exponent(space: ModelSpace, pred: Optional[SubgroupPredicate], n_max: int,
                      width: int = 0) -> ExponentEstimate:
    """Raw quotients ``log |A(o, n, width) ∩ Gamma| / n``; the estimate is the one at ``n_max``.

    ``trend`` is the change of the quotient over the last step.  The discrete
    derivative ``log(c_n / c_{n-1})`` is reported alongside for comparison.
    """
    counts = _counts(space, pred, n_max + width)
    curve = []
    skipped = []
    prev = None
    for n in range(1, n_max + 1):
        c = sum(counts[max(0, n - width):n + width + 1])
        if c == 0:
            skipped.append(n)
            prev = None
            continue
        q = math.log(c) / n
        lr = math.log(c / prev) if prev else None
        curve.append((n, c, q, lr))
        prev = c
    if not curve:
        return ExponentEstimate(float("nan"), n_max, width, [], 0.0, skipped)
    omega = curve[-1][2] if curve[-1][0] == n_max else float("nan")
    trend = curve[-1][2] - curve[-2][2] if len(curve) > 1 else 0.0
    return ExponentEstimate(omega, n_max, width, curve, trend, skipped)


# -- measures ------------------------------------------------------------------------------

class MeasureEstimate:
    """Patterson-Sullivan style measure at basepoint ``x``.

    Masses are computed for sets given as shadows; atoms are never stored.
    """

    def __init__(self, space: ModelSpace, s: float, x: Word = IDENTITY, R: int = 12,
                 mode: str = "estimator", omega: Optional[float] = None):
        if mode not in ("estimator", "exact"):
            raise ValueError("mode is 'estimator' or 'exact'")
        if mode == "exact" and not space.is_tree:
            raise CapabilityError("exact-limit mode exists for free groups only")
        self.space = space
        self.s = s
        self.x = x
        self.R = R
        self.mode = mode
        k = len(space.generators)
        self.omega = omega if omega is not None else (math.log(k - 1) if mode == "exact" else s)
        self.normalizer = poincare_partial(space, None, s, R=R).total if mode == "estimator" else 1.0
        self.warning = None
        if mode == "estimator":
            est = critical_exponent(space, None, min(R, 14)).omega_hat
            if s <= est:
                self.warning = f"s={s} at or below the estimated exponent {est:.4f}"

    def record(self) -> dict:
        return {"mode": self.mode, "s": self.s, "R": self.R, "x": self.space.format(self.x),
                "normalizer": self.normalizer, "warning": self.warning}

    # exact mode ---------------------------------------------------------------

    def _cylinder_mass_o(self, v: Word) -> float:
        n = self.space.length(v)
        if n == 0:
            return 1.0
        k = len(self.space.generators)
        return 1.0 / (k * (k - 1) ** (n - 1))

    def _exact_cylinder(self, v: Word) -> float:
        sp = self.space
        if not self.x:
            return self._cylinder_mass_o(v)
        depth = max(sp.length(v), sp.length(self.x) + 1)
        terms = []
        for ext in sp.sphere(depth - sp.length(v)):
            c = sp.multiply(v, ext)
            if sp.length(c) != depth:
                continue
            busemann = sp.distance(self.x, c) - sp.length(c)
            terms.append(math.exp(-self.omega * busemann) * self._cylinder_mass_o(c))
        return math.fsum(terms)

    # estimator mode --------------------------------------------------------------

    def _estimator_cone(self, v: Word) -> float:
        sp = self.space
        if not self.x:
            counts = sp.cone_sphere_counts(v, self.R)
            return math.fsum(c * math.exp(-self.s * n) for n, c in enumerate(counts)) / self.normalizer
        terms = [math.exp(-self.s * sp.distance(self.x, z)) for z in sp.enumerate_cone(v, self.R)]
        return math.fsum(terms) / self.normalizer

    def cylinder_mass(self, v: Word) -> float:
        """Mass of the plain shadow ``Pi_o(v, 0)`` (the canonical cone of ``v``)."""
        if self.mode == "exact":
            return self._exact_cylinder(v)
        return self._estimator_cone(v)

    def total_mass(self) -> float:
        return self.cylinder_mass(IDENTITY)

    def shadow_mass(self, spec: ShadowSpec) -> float:
        """Mass of a general shadow, by enumeration of the atoms (estimator mode)."""
        if spec.source == IDENTITY and spec.r == 0 and not spec.partial and spec.semantics == "canonical":
            return self.cylinder_mass(spec.target)
        if self.mode == "exact":
            raise CapabilityError("exact mode handles plain cylinders only")
        sp = self.space
        terms = [math.exp(-self.s * sp.distance(self.x, z)) for z in sp.ball(self.R) if in_shadow(sp, spec, z)]
        return math.fsum(terms) / self.normalizer


def ps_measure(space: ModelSpace, s: float, x: Word = IDENTITY, R: int = 12, mode: str = "estimator",
               omega: Optional[float] = None) -> MeasureEstimate:
    return MeasureEstimate(space, s, x, R, mode, omega)


# -- shadow lemma ------------------------------------------------------------------------------

@dataclass
class ShadowReport:
    omega: float
    rows: list
    overlap: dict

    @property
    def ratios(self) -> list:
        return [r["ratio"] for r in self.rows]

    @property
    def min_ratio(self) -> float:
        return min(self.ratios)

    @property
    def max_ratio(self) -> float:
        return max(self.ratios)

    @property
    def spread(self) -> float:
        return self.max_ratio / self.min_ratio

    def record(self, space: ModelSpace, rows: bool = False) -> dict:
        out = {"omega": self.omega, "targets": len(self.rows), "min_ratio": self.min_ratio,
               "max_ratio": self.max_ratio, "spread": self.spread, "overlap": self.overlap}
        if rows:
            out["rows"] = [dict(r, target=space.format(r["target"])) for r in self.rows]
        return out


def _overlap_counts(space: ModelSpace, n: int, r: int, depth: int, samples: int, rng) -> list:
    """For random atoms at ``depth``, how many targets of the sphere ``S_n``
    have the atom in their ``r``-shadow."""
    out = []
    for _ in range(samples):
        z = random_word(space, depth, rng)
        verts = space.geodesic(IDENTITY, z).vertices
        near = set()
        for k in range(max(0, n - r), min(len(verts), n + r + 1)):
            for dv in space.ball(r):
                v = space.multiply(verts[k], dv)
                if space.length(v) == n:
                    near.add(v)
        out.append(sum(1 for v in near if in_shadow(space, ShadowSpec(IDENTITY, v, r), z)))
    return out


def shadow_report(space: ModelSpace, measure: MeasureEstimate, omega: float, r: int = 0,
                  partial: bool = False, F: Sequence[Word] = (), annuli: Sequence[int] = (1, 4),
                  overlap_samples: int = 50, seed: int = 0) -> ShadowReport:
    """Ratios ``mass(Pi_o(v, r)) * exp(omega |v|)`` for every ``v`` in the annuli."""
    n1, n2 = annuli
    rows = []
    for n in range(n1, n2 + 1):
        for v in space.sphere(n):
            spec = ShadowSpec(IDENTITY, v, r, partial, tuple(F))
            m = measure.shadow_mass(spec)
            rows.append({"target": v, "n": n, "mass": m, "ratio": m * math.exp(omega * n)})
    rng = np.random.default_rng(seed)
    overlap = {}
    if not partial and overlap_samples:
        depth = max(n2 + r + 2, measure.R if measure.mode == "estimator" else n2 + 4)
        for n in range(n1, n2 + 1):
            c = _overlap_counts(space, n, r, depth, overlap_samples, rng)
            overlap[n] = max(c) if c else 0
    return ShadowReport(omega, rows, overlap)


@dataclass
class ConformalityRow:
    target: Word
    mass_g: float
    mass_o: float
    busemann: Optional[int]
    defect: Optional[float]


def conformality_check(space: ModelSpace, s: float, g: Word, targets: Sequence[Word], R: int = 12,
                       mode: str = "estimator", omega: Optional[float] = None) -> list:
    """Compare ``mu_{g o}(A) / mu_o(A)`` with ``exp(-s B_xi(g o, o))`` on cylinders ``A``.

    ``B_xi(g, o)`` must be constant on the cylinder: it is read off the
    cylinder's own word when ``|v| >= |g|``; otherwise the row is flagged
    with ``busemann=None``.
    """
    mu_o = ps_measure(space, s, IDENTITY, R, mode, omega)
    mu_g = ps_measure(space, s, g, R, mode, omega)
    expo = mu_o.omega if mode == "exact" else s
    rows = []
    for v in targets:
        a = mu_g.cylinder_mass(v)
        b = mu_o.cylinder_mass(v)
        if space.length(v) >= space.length(g):
            bus = space.distance(g, v) - space.length(v)
            defect = (a / b) / math.exp(-expo * bus) if b > 0 else None
        else:
            bus, defect = None, None
        rows.append(ConformalityRow(v, a, b, bus, defect))
    return rows


# -- HTS evidence -----------------------------------------------------------------------------

def hts_evidence(space: ModelSpace, pred: Optional[SubgroupPredicate], omega_hat: float, R: int,
                 F: Sequence[Word] = (), r: int = 0, samples: int = 100, seed: int = 0) -> dict:
    """Divergence signature, purely exponential growth and a conical-mass proxy."""
    counts = _counts(space, pred, R)
    partial = []
    acc = []
    for n, c in enumerate(counts):
        acc.append(c * math.exp(-omega_hat * n))
        partial.append(math.fsum(acc))
    half = len(partial) // 2
    slope = (partial[-1] - partial[half]) / max(1, (len(partial) - 1 - half))
    normalized = [c / math.exp(omega_hat * n) for n, c in enumerate(counts)]
    out = {"omega_hat": omega_hat, "R": R, "partial_sums": partial, "late_slope": slope,
           "growth_ratio_min": min(normalized), "growth_ratio_max": max(normalized),
           "degenerate": omega_hat <= 0}
    if F and space.is_tree:
        rng = np.random.default_rng(seed)
        mid = R // 2
        hits = 0
        for _ in range(samples):
            z = random_word(space, R, rng)
            bars = find_barriers(space, space.geodesic(IDENTITY, z), F, r)
            if any(abs(space.length(b.h) - mid) <= r for b in bars):
                hits += 1
        out["conical_proxy"] = hits / samples
        out["seed"] = seed
    return out


# -- cogrowth ------------------------------------------------------------------------------------

@dataclass
class CogrowthReport:
    omega_G: float
    omega_H: float
    curve_G: list
    curve_H: list
    audit: Optional[dict] = None

    @property
    def verdict(self) -> bool:
        return self.omega_H > self.omega_G / 2

    def record(self) -> dict:
        return {"omega_G": self.omega_G, "omega_H": self.omega_H, "half_omega_G": self.omega_G / 2,
                "verdict": self.verdict, "audit": self.audit}


def separated_subset(space: ModelSpace, points: Sequence[Word], R: int) -> list:
    """Greedy maximal subset with pairwise distances ``> R`` (scan order)."""
    blocked = set()
    chosen = []
    ball = list(space.ball(R))
    for p in points:
        if p in blocked:
            continue
        chosen.append(p)
        for dv in ball:
            blocked.add(space.multiply(p, dv))
    return chosen


def doubling_audit(space: ModelSpace, H: SubgroupPredicate, F: Sequence[Word], n: int, r: int = 0,
                   width: int = 0) -> dict:
    """Map ``g -> g f g^{-1}`` on a maximal separated subset of ``A(o, n, width)``.

    ``f`` is the first element of ``F`` for which ``g`` is an ``(r, f)``-barrier on
    ``[o, g f g^{-1}]``.  Checks membership in ``H``, injectivity and the length window.
    """
    normF = max(space.length(f) for f in F)
    R_sep = normF + 4 * r + 4 * width
    annulus = [w for k in range(max(0, n - width), n + width + 1) for w in space.sphere(k)]
    B = separated_subset(space, annulus, R_sep)
    images = {}
    failures = []
    outside_H = 0
    out_of_window = 0
    lo, hi = 2 * n - normF - 4 * r, 2 * n + normF + 4 * r
    for g in B:
        ginv = space.inverse(g)
        chosen = None
        for f in F:
            img = space.product_of(g, f, ginv)
            bars = find_barriers(space, space.geodesic(IDENTITY, img), [f], r)
            if any(b.h == g for b in bars):
                chosen = (f, img)
                break
        if chosen is None:
            failures.append(space.format(g))
            continue
        f, img = chosen
        if not H.contains(img):
            outside_H += 1
        if not lo <= space.length(img) - 2 * (space.length(g) - n) <= hi:
            out_of_window += 1
        images.setdefault(img, []).append(g)
    collisions = sum(len(v) - 1 for v in images.values() if len(v) > 1)
    return {"n": n, "R_sep": R_sep, "separated": len(B), "annulus": len(annulus),
            "images": len(images), "collisions": collisions, "injective": collisions == 0,
            "outside_H": outside_H, "out_of_window": out_of_window, "extension_failures": failures,
            "passed": collisions == 0 and outside_H == 0 and out_of_window == 0 and not failures}


def cogrowth_check(space: ModelSpace, H: SubgroupPredicate, n_max: int, F_H: Sequence[Word] = (),
                   n_audit: Optional[int] = None, r: int = 0) -> CogrowthReport:
    G = critical_exponent(space, None, n_max)
    Hc = critical_exponent(space, H, n_max)
    audit = doubling_audit(space, H, F_H, n_audit, r) if F_H and n_audit is not None else None
    return CogrowthReport(G.omega_hat, Hc.omega_hat, G.curve, Hc.curve, audit)


def kernel_elements(space: ModelSpace, H: SubgroupPredicate) -> list:
    """Three pairwise independent elements of an exponent-sum kernel in a free group:
    a power of a generator killed by ``H`` and two of its conjugates."""
    if not space.is_tree:
        raise CapabilityError("default kernel elements are built for free groups")
    gens = space.generators[::2]
    killed = [g for g in gens if H.contains(g)]
    other = [g for g in gens if not H.contains(g)]
    if not killed:
        raise CapabilityError("no generator lies in H; supply F explicitly")
    b = space.power(killed[0], 3)
    a = other[0] if other else gens[1] if killed[0] == gens[0] else gens[0]
    ai = space.inverse(a)
    return [b, space.product_of(a, b, ai), space.product_of(ai, b, a)]
