import math

import numpy as np
import pytest

from boundarylab.errors import ConfigError
from boundarylab.randwalk import (StepDistribution, boundary_convergence, diffusive_band, drift, gromov_product,
                                  simulate, tree_drift)
from boundarylab.space import IDENTITY, preset

from oracles import srw_tree_speed


def test_distribution_validation(f2):
    with pytest.raises(ConfigError):
        StepDistribution(f2, [f2.word("a")], [0.5])
    with pytest.raises(ConfigError):
        StepDistribution(f2, [f2.word("a"), f2.word("b")], [1.0, -0.0])
    assert StepDistribution.srw(f2).irreducible
    assert not StepDistribution.dirac(f2, f2.word("a")).irreducible
    mu = StepDistribution.from_config(f2, {"a": 0.5, "a^-1": 0.2, "b": 0.2, "b^-1": 0.1})
    assert mu.irreducible


def test_dirac_walk(f2):
    tr = simulate(f2, StepDistribution.dirac(f2, f2.word("a")), 40, seed=1)
    assert tr.final == f2.power(f2.word("a"), 40)
    assert drift(tr)["terminal"] == 1.0
    conv = boundary_convergence(f2, tr, 3)
    assert conv.stabilized
    assert conv.limit[f2.word("a")] == -1 and conv.limit[f2.word("b")] == 1


def test_determinism(f2):
    mu = StepDistribution.srw(f2)
    a = simulate(f2, mu, 100, seed=5, spacing=1)
    b = simulate(f2, mu, 100, seed=5, spacing=1)
    assert a.positions == b.positions and a.checkpoints == b.checkpoints
    c = simulate(f2, mu, 100, seed=6, spacing=1)
    assert a.positions != c.positions


def test_positions_are_products(f2):
    mu = StepDistribution.srw(f2)
    tr = simulate(f2, mu, 60, seed=3, spacing=1, keep_increments=True)
    w = IDENTITY
    for n, i in enumerate(tr.increments, start=1):
        w = f2.multiply(w, mu.support[i])
        assert tr.positions[n] == w
        assert tr.lengths[n] == f2.length(w)


def test_srw_drift_f2():
    f2 = preset("f2")
    mu = StepDistribution.srw(f2)
    vals = [drift(simulate(f2, mu, 20000, seed=s))["terminal"] for s in range(5)]
    assert abs(np.mean(vals) - srw_tree_speed(2)) < 0.02
    assert tree_drift(2) == srw_tree_speed(2)


def test_srw_lattice_diffusive(z2):
    tr = simulate(z2, StepDistribution.srw(z2), 10000, seed=2)
    assert diffusive_band(tr)
    curve = [d for _, d in drift(tr)["curve"]]
    assert curve[-1] < 0.1


def test_gromov_products_grow(f2):
    tr = simulate(f2, StepDistribution.srw(f2), 20000, seed=4)
    conv = boundary_convergence(f2, tr, 4, F=[f2.word("(a b)^3"), f2.word("(a b^-1)^3")])
    assert conv.stabilized
    assert conv.late_min_gromov > 1000
    assert conv.myrberg.positive()
    x, y = tr.positions[10], tr.positions[20]
    assert gromov_product(f2, x, y) == (f2.length(x) + f2.length(y) - f2.distance(x, y)) / 2


def test_z2z_walk_stabilizes_majority():
    sp = preset("z2z")
    mu = StepDistribution.srw(sp)
    ok = 0
    for seed in range(10):
        tr = simulate(sp, mu, 5000, seed=seed)
        ok += boundary_convergence(sp, tr, 3).stabilized
    assert ok > 5
