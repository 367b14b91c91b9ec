"""Brute-force oracles that do not use the package's normal-form code.

Words are handled here as strings of letters over a symmetric alphabet
(lower case = generator, upper case = inverse).  Each oracle is slow and
obviously correct; tests compare the package against them.
"""

import itertools
import math
from collections import deque


def free_reduce(s: str) -> str:
    out = []
    for ch in s:
        if out and out[-1] == ch.swapcase():
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def reduced_words(labels: str, n: int):
    """All freely reduced words of length exactly n, by filtering all strings."""
    alphabet = labels + labels.upper()
    for tup in itertools.product(alphabet, repeat=n):
        s = "".join(tup)
        if free_reduce(s) == s:
            yield s


def rewrite_normal_form(letters: str, factors: list) -> tuple:
    """Normal form in a free product of free abelian groups by repeated rewriting.

    ``factors`` lists the labels of each factor, e.g. ``["ab", "t"]``.
    Returns a tuple of (factor index, exponent vector) syllables.
    """
    where = {}
    for i, labs in enumerate(factors):
        for j, lab in enumerate(labs):
            where[lab] = (i, j)
    syl = []
    for ch in letters:
        i, j = where[ch.lower()]
        vec = [0] * len(factors[i])
        vec[j] = 1 if ch.islower() else -1
        syl.append((i, tuple(vec)))
    changed = True
    while changed:
        changed = False
        out = []
        for f, v in syl:
            if not any(v):
                changed = True
                continue
            if out and out[-1][0] == f:
                out[-1] = (f, tuple(a + b for a, b in zip(out[-1][1], v)))
                changed = True
            else:
                out.append((f, v))
        syl = out
    return tuple(syl)


def bfs_distances(neighbors, start, radius):
    dist = {start: 0}
    q = deque([start])
    while q:
        x = q.popleft()
        if dist[x] == radius:
            continue
        for y in neighbors(x):
            if y not in dist:
                dist[y] = dist[x] + 1
                q.append(y)
    return dist


def cylinder_mass_by_counting(prefix: str, depth: int, labels: str = "ab") -> float:
    """Share of reduced words of length ``depth`` that start with ``prefix``."""
    total = 0
    hit = 0
    for s in reduced_words(labels, depth):
        total += 1
        hit += s.startswith(prefix)
    return hit / total


def four_point_delta(dist) -> float:
    """Exact Gromov four-point delta of a finite metric given as a matrix."""
    n = len(dist)
    best = 0.0
    for x, y, z, w in itertools.combinations(range(n), 4):
        s = sorted([dist[x][y] + dist[z][w], dist[x][z] + dist[y][w], dist[x][w] + dist[y][z]])
        best = max(best, (s[2] - s[1]) / 2)
    return best


def srw_tree_speed(k: int) -> float:
    return (2 * k - 2) / (2 * k)


def closed_form_poincare_f2(s: float, R: int) -> float:
    return 1 + math.fsum(4 * 3 ** (n - 1) * math.exp(-s * n) for n in range(1, R + 1))
