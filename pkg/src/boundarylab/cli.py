"""Command line front end.

Every record carries ``schema_version``.  The first record of every run is
the effective configuration; feeding it back with ``--config`` reproduces
the run.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import click
import numpy as np
import yaml

from . import __version__
from .boundary import (ShadowSpec, conical_witness, horo_limit, horofunction_vector, in_shadow,
                       myrberg_stats, ns_dynamics, random_reduced_ray, random_word)
from .contracting import Axis, certify_contracting, contracting_constant, find_barriers, fellow_travel_check, \
    truncate, verify_admissible
from .density import cogrowth_check, critical_exponent, hts_evidence, kernel_elements, ps_measure, shadow_report
from .errors import BoundaryLabError, ConfigError
from .pcomplex import AxisFamily, build_complex, check_axioms, hyperbolicity_scan, scan_K, tn_series, visual_spheres
from .randwalk import RNG_NAME, StepDistribution, boundary_convergence, drift, simulate
from .space import IDENTITY, PRESETS, ModelSpace, SubgroupPredicate

SCHEMA_VERSION = 1
EXIT_VERDICT = 9
SHIPPED_F = "(a b)^3,(a b^-1)^3,(a^2 b)^3"
EXIT_USAGE = 64

EXIT_CODES = """\b
Exit codes:
  0   success
  1   internal error
  2   malformed word or config (the message names the field)
  3   enumeration cap exceeded
  4   capability not available for this space
  5   projection inconclusive at an axis window edge
  6   interval order inconsistent
  7   constructive search failed
  8   path not admissible
  9   a verdict failed (counterexample, failed check)
  64  unknown option or bad usage
"""

CONFIG_KEYS = {"schema_version", "kind", "command", "space", "params", "constants", "seed", "format", "threads"}


# -- config and output ----------------------------------------------------------------------------

def load_config(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        cfg = json.loads(text) if path.endswith(".json") else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError("<file>", f"not parsable: {exc}") from None
    if cfg is None:
        return {}
    if not isinstance(cfg, dict):
        raise ConfigError("<root>", "must be a mapping")
    unknown = set(cfg) - CONFIG_KEYS
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown key")
    for key in ("params", "constants"):
        if key in cfg and not isinstance(cfg[key], dict):
            raise ConfigError(key, "must be a mapping")
    return cfg


def build_space(spec) -> ModelSpace:
    if isinstance(spec, str):
        if spec not in PRESETS:
            raise ConfigError("space", f"unknown preset {spec!r}")
        return ModelSpace.from_config({"family": spec})
    return ModelSpace.from_config(spec)


class Emitter:
    def __init__(self, fmt: str, out):
        self.fmt = fmt
        self.out = out

    def _stamp(self, kind: str, data: dict) -> dict:
        rec = {"schema_version": SCHEMA_VERSION, "kind": kind}
        rec.update(data)
        return rec

    def record(self, kind: str, data: dict):
        rec = self._stamp(kind, data)
        if self.fmt == "jsonl":
            self.out.write(json.dumps(_jsonable(rec)) + "\n")
        else:
            flat = {k: (v if isinstance(v, (int, float, str, bool)) or v is None else json.dumps(_jsonable(v)))
                    for k, v in rec.items()}
            self._csv([flat])

    def table(self, kind: str, rows: list):
        if self.fmt == "jsonl":
            for row in rows:
                self.out.write(json.dumps(_jsonable(self._stamp(kind, row))) + "\n")
        else:
            self._csv([self._stamp(kind, row) for row in rows])

    def _csv(self, rows: list):
        if not rows:
            return
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: _jsonable(v) for k, v in row.items()})
        self.out.write(buf.getvalue() + "\n")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k) if not isinstance(k, str) else k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


class Run:
    """Shared state handed to subcommands."""

    def __init__(self, space, fmt, seed, threads, cfg):
        self.space = space
        self.seed = seed
        self.threads = threads
        self.cfg = cfg
        self.out = Emitter(fmt, sys.stdout)
        self.fmt = fmt
        self.failed = False

    def words(self, text: Optional[str]) -> list:
        if not text:
            return []
        return [self.space.parse(t) for t in text.split(",") if t.strip()]

    def word(self, text: str):
        return self.space.parse(text)

    def start(self, command: str, params: dict):
        eff = {"command": command, "space": self.space.to_config(), "seed": self.seed,
               "format": self.fmt, "threads": self.threads, "params": params}
        self.out.record("config", eff)

    def verdict(self, ok: bool):
        if not ok:
            self.failed = True



def _params(ctx: click.Context) -> dict:
    return dict(sorted(ctx.params.items()))


def _predicate(space: ModelSpace, text: str) -> SubgroupPredicate:
    """``whole``, ``kernel:a=1,b=0`` or ``parity:a=1,b=1``."""
    if text in ("", "whole"):
        return SubgroupPredicate.whole()
    kind, _, body = text.partition(":")
    weights = {}
    for part in body.split(","):
        if not part.strip():
            continue
        label, _, val = part.partition("=")
        try:
            weights[label.strip()] = int(val)
        except ValueError:
            raise ConfigError("subgroup", f"bad weight {part!r}") from None
    if kind == "kernel":
        return SubgroupPredicate.exponent_sum(space, weights)
    if kind == "parity":
        return SubgroupPredicate.parity(space, weights)
    raise ConfigError("subgroup", f"unknown subgroup kind {kind!r}")


# -- group ----------------------------------------------------------------------------------------------

@click.group(epilog=EXIT_CODES, context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="YAML or JSON run config (an emitted config record is accepted).")
@click.option("--space", "space_name", default=None, help="Space preset: " + ", ".join(PRESETS) + ".")
@click.option("--format", "fmt", type=click.Choice(["jsonl", "csv"]), default=None, help="Output format.")
@click.option("--seed", type=int, default=None, help="Seed for every sampled step.")
@click.option("--threads", type=int, default=None, help="Worker cap for parallel parts.")
@click.version_option(__version__)
@click.pass_context
def main(ctx, config_path, space_name, fmt, seed, threads):
    """Contracting axes, projection complexes, horofunction boundaries and growth statistics
    on Cayley graphs of free products of free abelian groups."""
    cfg = load_config(config_path) if config_path else {}
    space = build_space(space_name or cfg.get("space", "f2"))
    seed = seed if seed is not None else int(cfg.get("seed", 0))
    fmt = fmt or cfg.get("format", "jsonl")
    if fmt not in ("jsonl", "csv"):
        raise ConfigError("format", "must be jsonl or csv")
    threads = threads or int(cfg.get("threads", 1))
    params = dict(cfg.get("constants", {}))
    params.update(cfg.get("params", {}))
    if cfg.get("command") and ctx.invoked_subcommand and cfg["command"] != ctx.invoked_subcommand:
        raise ConfigError("command", f"config is for {cfg['command']!r}, not {ctx.invoked_subcommand!r}")
    if params and ctx.invoked_subcommand:
        cmd = main.commands.get(ctx.invoked_subcommand)
        if cmd is not None:
            names = {p.name for p in cmd.params}
            bad = [k for k in cfg.get("params", {}) if k not in names]
            if bad:
                raise ConfigError(f"params.{bad[0]}", f"not an option of {ctx.invoked_subcommand}")
            ctx.default_map = {ctx.invoked_subcommand: {k: v for k, v in params.items() if k in names}}
    ctx.obj = Run(space, fmt, seed, threads, cfg)


def _finish(run: Run):
    if run.failed:
        sys.exit(EXIT_VERDICT)


# -- space --------------------------------------------------------------------------------------------------

@main.command("space")
@click.option("--nmax", type=int, default=6, show_default=True, help="Sphere counts up to this radius.")
@click.option("--word", "words", default="", help="Comma-separated words to normalise.")
@click.option("--subgroup", default="whole", show_default=True, help="whole | kernel:a=1,b=0 | parity:a=1")
@click.pass_context
def cmd_space(ctx, nmax, words, subgroup):
    """Describe the space, normalise words, and count spheres."""
    run: Run = ctx.obj
    sp = run.space
    run.start("space", _params(ctx))
    run.out.record("space", {"name": sp.name, "family": sp.family, "ranks": list(sp.ranks),
                             "generators": [sp.format(g) for g in sp.generators], "tree": sp.is_tree})
    for w in run.words(words):
        run.out.record("word", {"word": sp.format(w), "length": sp.length(w),
                                "inverse": sp.format(sp.inverse(w)),
                                "geodesic": [sp.format(v) for v in sp.geodesic(IDENTITY, w).vertices]})
    pred = _predicate(sp, subgroup)
    counts = sp.constrained_sphere_counts(nmax, pred) if not pred.is_whole else sp.sphere_counts(nmax)
    run.out.table("sphere_count", [{"n": n, "count": int(c)} for n, c in enumerate(counts)])


# -- contracting -------------------------------------------------------------------------------------------------

@main.command("certify")
@click.option("--axis", "axis_text", required=True, help="Axis as 'f' or 'g Ax(f)' word pair 'g:f'.")
@click.option("--C", "C", type=int, default=None, help="Constant to certify; omitted means search the least.")
@click.option("--radius", type=int, default=10, show_default=True)
@click.option("--window", type=int, default=None, help="Axis window half-width (default radius-based).")
@click.pass_context
def cmd_certify(ctx, axis_text, C, radius, window):
    """Exhaustive contracting certificate for an axis on B(o, radius)."""
    run: Run = ctx.obj
    sp = run.space
    run.start("certify", _params(ctx))
    g, _, f = axis_text.rpartition(":")
    X = Axis(sp, sp.parse(f), sp.parse(g) if g else IDENTITY, window or 2 * radius + 4)
    if C is None:
        C = contracting_constant(sp, X, radius)
        run.out.record("contracting_constant", {"axis": X.label(), "radius": radius, "C": C})
    cert = certify_contracting(sp, X, C, radius)
    run.out.record("certificate", cert.record(sp))
    run.verdict(cert.certified)
    _finish(run)


@main.command("barriers")
@click.option("--geodesic", "target", required=True, help="Endpoint y of the canonical geodesic [o, y].")
@click.option("--F", "F", required=True, help="Comma-separated contracting elements.")
@click.option("--r", "r", type=int, default=0, show_default=True)
@click.option("--truncate/--no-truncate", "do_truncate", default=False, help="Also build the admissible path.")
@click.option("--C", "C", type=int, default=0, show_default=True, help="Contracting constant for truncation.")
@click.pass_context
def cmd_barriers(ctx, target, F, r, do_truncate, C):
    """(r, f)-barriers on a geodesic and the truncated admissible path."""
    run: Run = ctx.obj
    sp = run.space
    run.start("barriers", _params(ctx))
    gamma = sp.geodesic(IDENTITY, sp.parse(target))
    bars = find_barriers(sp, gamma, run.words(F), r)
    run.out.table("barrier", [b.record(sp) for b in bars])
    if do_truncate:
        path = truncate(sp, gamma, bars, C)
        rep = verify_admissible(sp, path)
        run.out.record("admissible", rep.record())
        ft = fellow_travel_check(sp, path, max(r, C) + 2)
        run.out.record("fellow_travel", ft.record())
        run.verdict(rep.passed and ft.passed)
    _finish(run)


# -- projection complex ----------------------------------------------------------------------------------------------

def _family(run: Run, F: str, Rfam: int, window: Optional[int]) -> AxisFamily:
    return AxisFamily(run.space, run.words(F), Rfam, window)


def _spheres_and_series(run: Run, fam: AxisFamily, graph, n_max: int, s: Optional[float]):
    vs = visual_spheres(fam, graph, 0, n_max)
    run.out.table("visual_sphere", [{"n": sp_.n, "vertices": len(sp_.vertices), "points": len(sp_.points),
                                     "flagged": len(sp_.flagged)} for sp_ in vs["spheres"]])
    run.out.record("multiplicity", {"max": vs["max_multiplicity"], "min": vs["min_multiplicity"],
                                    "histogram": vs["cover_histogram"], "unreached": len(vs["unreached"])})
    if s is not None:
        ser = tn_series(run.space, vs["spheres"], s)
        run.out.table("series", [{"n": n, "sum": v} for n, v in enumerate(ser["sums"])])
        run.out.record("series_summary", {"s": s, "spread": ser["spread"], "max_defect": ser["max_defect"],
                                          "available": ser["available"], "complete": ser["complete"]})


@main.command("pcomplex")
@click.option("--F", "F", default=SHIPPED_F, show_default=True)
@click.option("--Rfam", "Rfam", type=int, default=2, show_default=True)
@click.option("--window", type=int, default=None)
@click.option("--K", "K", type=int, default=None)
@click.option("--scan-K", "scan", is_flag=True, help="Use the least K with consistent intervals.")
@click.option("--kappa", type=int, default=None, help="Axiom constant; omitted means scan.")
@click.option("--spheres", "n_spheres", type=int, default=None, help="Visual spheres up to this n.")
@click.option("--series", "s", type=float, default=None, help="Exponent for the sphere series.")
@click.option("--graph-out", type=click.Path(dir_okay=False, writable=True), default=None,
              help="Write the adjacency list here.")
@click.option("--delta/--no-delta", "do_delta", default=False, help="Four-point hyperbolicity scan.")
@click.pass_context
def cmd_pcomplex(ctx, F, Rfam, window, K, scan, kappa, n_spheres, s, graph_out, do_delta):
    """Projection axioms, the projection complex, and quasi-tree diagnostics."""
    run: Run = ctx.obj
    run.start("pcomplex", _params(ctx))
    fam = _family(run, F, Rfam, window)
    ax = check_axioms(fam, kappa)
    run.out.record("axioms", ax.record())
    if scan or K is None:
        K, _ = scan_K(fam, max(ax.kappa, 0))
    graph = build_complex(fam, K)
    run.out.record("graph", {"K": K, "vertices": len(graph.labels), "edges": len(graph.edges),
                             "connected": graph.is_connected(), "warnings": graph.warnings})
    if graph_out:
        with open(graph_out, "w", encoding="utf-8") as fh:
            fh.write(graph.to_text())
    if do_delta:
        run.out.record("hyperbolicity", hyperbolicity_scan(graph, seed=run.seed))
    if n_spheres is not None:
        _spheres_and_series(run, fam, graph, n_spheres, s)
    run.verdict(ax.passed)
    _finish(run)


@main.command("spheres")
@click.option("--F", "F", default=SHIPPED_F, show_default=True)
@click.option("--Rfam", "Rfam", type=int, default=3, show_default=True)
@click.option("--window", type=int, default=None)
@click.option("--K", "K", type=int, default=None, help="Omitted means the scanned K.")
@click.option("--nmax", type=int, default=4, show_default=True)
@click.option("--s", "s", type=float, default=math.log(3), show_default=True)
@click.pass_context
def cmd_spheres(ctx, F, Rfam, window, K, nmax, s):
    """Visual spheres T_n of the projection complex and their series."""
    run: Run = ctx.obj
    run.start("spheres", _params(ctx))
    fam = _family(run, F, Rfam, window)
    if K is None:
        K, _ = scan_K(fam)
    graph = build_complex(fam, K)
    _spheres_and_series(run, fam, graph, nmax, s)


# -- boundary ------------------------------------------------------------------------------------------------------------

@main.command("horo")
@click.option("--y", "y", default=None, help="Single point y: emit b_y on B(o, R).")
@click.option("--sequence", default=None, help="Comma-separated points; emit the stabilised limit.")
@click.option("--R", "R", type=int, default=2, show_default=True)
@click.option("--w", "w", type=int, default=5, show_default=True, help="Stabilisation window.")
@click.pass_context
def cmd_horo(ctx, y, sequence, R, w):
    """Horofunction vectors and their limits."""
    run: Run = ctx.obj
    sp = run.space
    run.start("horo", _params(ctx))
    if y is not None:
        run.out.record("horovector", horofunction_vector(sp, sp.parse(y), R).record(sp))
    if sequence:
        res = horo_limit(sp, run.words(sequence), R, w)
        run.out.record("horo_limit", res.record(sp))
        run.verdict(hasattr(res, "values"))
    _finish(run)


@main.command("shadow")
@click.option("--source", default="1", show_default=True)
@click.option("--target", required=True)
@click.option("--r", "r", type=int, default=0, show_default=True)
@click.option("--partial", is_flag=True)
@click.option("--F", "F", default="", help="Comma-separated F for partial shadows.")
@click.option("--semantics", type=click.Choice(["canonical", "some"]), default="canonical", show_default=True)
@click.option("--test", "tests", default="", help="Comma-separated points to test for membership.")
@click.option("--radius", type=int, default=None, help="List all members of length at most this.")
@click.pass_context
def cmd_shadow(ctx, source, target, r, partial, F, semantics, tests, radius):
    """Shadow membership."""
    run: Run = ctx.obj
    sp = run.space
    run.start("shadow", _params(ctx))
    spec = ShadowSpec(sp.parse(source), sp.parse(target), r, partial, tuple(run.words(F)), semantics)
    for z in run.words(tests):
        run.out.record("membership", {"point": sp.format(z), "member": in_shadow(sp, spec, z)})
    if radius is not None:
        members = [sp.format(z) for z in sp.ball(radius) if in_shadow(sp, spec, z)]
        run.out.record("members", {"radius": radius, "count": len(members), "members": members})


@main.command("myrberg")
@click.option("--ray-seed", type=int, default=None, help="Seed of the random ray (default: global seed).")
@click.option("--ray", default=None, help="Explicit periodic ray 'u': the ray u^infinity.")
@click.option("--length", type=int, default=10000, show_default=True)
@click.option("--F", "F", default="(a b)^3,(a b^-1)^3", show_default=True)
@click.option("--r", "r", type=int, default=0, show_default=True)
@click.option("--conical-L", "L", type=int, default=None, help="Also report conical witnesses with this L.")
@click.pass_context
def cmd_myrberg(ctx, ray_seed, ray, length, F, r, L):
    """Barrier recurrence along a random or periodic ray."""
    run: Run = ctx.obj
    sp = run.space
    run.start("myrberg", _params(ctx))
    if ray:
        u = sp.letters(sp.parse(ray))
        steps = (u * (length // max(1, len(u)) + 1))[:length]
    else:
        rng = np.random.default_rng(run.seed if ray_seed is None else ray_seed)
        steps = random_reduced_ray(sp, length, rng)
    Fw = run.words(F)
    stats = myrberg_stats(sp, steps, Fw, r)
    run.out.record("myrberg", stats.record(sp))
    if L is not None:
        verts = [IDENTITY]
        for st in steps[:min(len(steps), 400)]:
            verts.append(sp.multiply(verts[-1], st))
        run.out.record("conical", conical_witness(sp, verts, Fw, r, L).record(sp))
    run.verdict(stats.positive())
    _finish(run)


@main.command("nsdyn")
@click.option("--h", "h", required=True)
@click.option("--U", "U", required=True, help="Target of the attracting shadow Pi_o(U).")
@click.option("--V", "V", required=True, help="Target of the repelling shadow Pi_o(V).")
@click.option("--r", "r", type=int, default=0, show_default=True)
@click.option("--samples", type=int, default=200, show_default=True)
@click.option("--sample-length", type=int, default=10, show_default=True)
@click.option("--nmax", type=int, default=20, show_default=True)
@click.pass_context
def cmd_nsdyn(ctx, h, U, V, r, samples, sample_length, nmax):
    """North-south dynamics of a contracting element on shadows."""
    run: Run = ctx.obj
    sp = run.space
    run.start("nsdyn", _params(ctx))
    rng = np.random.default_rng(run.seed)
    zs = [random_word(sp, sample_length, rng) for _ in range(samples)]
    n = ns_dynamics(sp, sp.parse(h), ShadowSpec(IDENTITY, sp.parse(U), r),
                    ShadowSpec(IDENTITY, sp.parse(V), r), zs, nmax)
    run.out.record("nsdyn", {"h": h, "U": U, "V": V, "n": n, "samples": samples})


# -- density -------------------------------------------------------------------------------------------------------

@main.command("exponent")
@click.option("--nmax", type=int, default=14, show_default=True)
@click.option("--width", type=int, default=0, show_default=True, help="Annulus width.")
@click.option("--subgroup", default="whole", show_default=True)
@click.pass_context
def cmd_exponent(ctx, nmax, width, subgroup):
    """Critical exponent from exact annulus counts."""
    run: Run = ctx.obj
    run.start("exponent", _params(ctx))
    est = critical_exponent(run.space, _predicate(run.space, subgroup), nmax, width)
    run.out.table("exponent_curve", [{"n": n, "count": c, "quotient": q, "log_ratio": lr}
                                     for n, c, q, lr in est.curve])
    run.out.record("exponent", {"omega_hat": est.omega_hat, "n_max": nmax, "width": width,
                                "trend": est.trend, "skipped": est.skipped})


@main.command("psmeasure")
@click.option("--s", "s", type=float, default=None, help="Exponent (default omega_hat + 0.05).")
@click.option("--x", "x", default="1", show_default=True, help="Basepoint.")
@click.option("--R", "R", type=int, default=12, show_default=True)
@click.option("--mode", type=click.Choice(["estimator", "exact"]), default="estimator", show_default=True)
@click.option("--target", "targets", default="a", show_default=True, help="Comma-separated cylinder words.")
@click.pass_context
def cmd_psmeasure(ctx, s, x, R, mode, targets):
    """Patterson-Sullivan masses of cylinders."""
    run: Run = ctx.obj
    sp = run.space
    run.start("psmeasure", _params(ctx))
    if s is None:
        s = critical_exponent(sp, None, min(R, 14)).omega_hat + 0.05
    mu = ps_measure(sp, s, sp.parse(x), R, mode)
    run.out.record("measure", dict(mu.record(), total_mass=mu.total_mass()))
    run.out.table("mass", [{"target": sp.format(v), "mass": mu.cylinder_mass(v)} for v in run.words(targets)])


@main.command("shadowlemma")
@click.option("--s", "s", type=float, default=None, help="Measure exponent (default log 3 + 0.05 on trees).")
@click.option("--omega", type=float, default=None, help="Exponent in the ratio (default omega_hat).")
@click.option("--R", "R", type=int, default=14, show_default=True)
@click.option("--mode", type=click.Choice(["estimator", "exact"]), default="estimator", show_default=True)
@click.option("--r", "r", type=int, default=0, show_default=True)
@click.option("--n1", type=int, default=4, show_default=True)
@click.option("--n2", type=int, default=8, show_default=True)
@click.option("--lo", type=float, default=0.5, show_default=True, help="Lower acceptance bound on ratios.")
@click.option("--hi", type=float, default=1.1, show_default=True, help="Upper acceptance bound on ratios.")
@click.option("--rows/--no-rows", default=False)
@click.pass_context
def cmd_shadowlemma(ctx, s, omega, R, mode, r, n1, n2, lo, hi, rows):
    """Shadow-lemma ratio table."""
    run: Run = ctx.obj
    sp = run.space
    run.start("shadowlemma", _params(ctx))
    est = critical_exponent(sp, None, min(R, 14)).omega_hat
    omega = omega if omega is not None else (math.log(len(sp.generators) - 1) if sp.is_tree else est)
    s = s if s is not None else omega + 0.05
    mu = ps_measure(sp, s, IDENTITY, R, mode)
    rep = shadow_report(sp, mu, omega, r, annuli=(n1, n2), seed=run.seed)
    rec = rep.record(sp, rows)
    rec.update({"lo": lo, "hi": hi, "within": lo <= rep.min_ratio and rep.max_ratio <= hi})
    run.out.record("shadow_report", rec)
    run.verdict(rec["within"])
    _finish(run)


@main.command("hts")
@click.option("--R", "R", type=int, default=30, show_default=True)
@click.option("--omega", type=float, default=None, help="Default: the raw estimate at n = min(R, 14).")
@click.option("--subgroup", default="whole", show_default=True)
@click.option("--F", "F", default="", help="Comma-separated F for the conical proxy (trees).")
@click.option("--r", "r", type=int, default=0, show_default=True)
@click.option("--samples", type=int, default=100, show_default=True)
@click.pass_context
def cmd_hts(ctx, R, omega, subgroup, F, r, samples):
    """Divergence and purely exponential growth evidence."""
    run: Run = ctx.obj
    sp = run.space
    run.start("hts", _params(ctx))
    pred = _predicate(sp, subgroup)
    if omega is None:
        omega = critical_exponent(sp, pred, min(R, 14)).omega_hat
    rep = hts_evidence(sp, pred, omega, R, run.words(F), r, samples, run.seed)
    run.out.record("hts", rep)


@main.command("cogrowth")
@click.option("--subgroup", default="kernel:a=1,b=0", show_default=True)
@click.option("--nmax", type=int, default=24, show_default=True)
@click.option("--audit-n", type=int, default=8, show_default=True)
@click.option("--F", "F", default="", help="Elements of H for the audit (default: built from the kernel).")
@click.option("--r", "r", type=int, default=0, show_default=True)
@click.pass_context
def cmd_cogrowth(ctx, subgroup, nmax, audit_n, F, r):
    """Cogrowth verdict omega_H > omega_G / 2 with the doubling-map audit."""
    run: Run = ctx.obj
    sp = run.space
    run.start("cogrowth", _params(ctx))
    H = _predicate(sp, subgroup)
    Fw = run.words(F) or (kernel_elements(sp, H) if sp.is_tree and not H.is_whole else [])
    rep = cogrowth_check(sp, H, nmax, Fw, audit_n if Fw else None, r)
    rec = rep.record()
    rec["F"] = [sp.format(f) for f in Fw]
    run.out.record("cogrowth", rec)
    run.verdict(rep.verdict and (rep.audit is None or rep.audit["passed"]))
    _finish(run)


# -- random walks --------------------------------------------------------------------------------------------------------

@main.command("walk")
@click.option("--mu", "mu_spec", default="srw", show_default=True,
              help="srw | dirac:<word> | path to a YAML/JSON mapping word -> weight.")
@click.option("--steps", type=int, default=100000, show_default=True)
@click.option("--seeds", "n_seeds", type=int, default=1, show_default=True, help="Seeds seed..seed+k-1.")
@click.option("--R", "R", type=int, default=4, show_default=True)
@click.option("--w", "w", type=int, default=5, show_default=True)
@click.option("--F", "F", default="", help="Comma-separated F for barrier recurrence (default on trees).")
@click.option("--r", "r", type=int, default=0, show_default=True)
@click.option("--spacing", type=int, default=None, help="Checkpoint spacing (default steps/100).")
@click.pass_context
def cmd_walk(ctx, mu_spec, steps, n_seeds, R, w, F, r, spacing):
    """Random walk drift, horovector convergence and barrier recurrence."""
    run: Run = ctx.obj
    sp = run.space
    run.start("walk", _params(ctx))
    if mu_spec in ("srw",) or mu_spec.startswith("dirac:"):
        mu = StepDistribution.from_config(sp, mu_spec)
    else:
        mu = StepDistribution.from_config(sp, load_config_mapping(mu_spec))
    Fw = run.words(F) or ([sp.parse("(a b)^3"), sp.parse("(a b^-1)^3")] if sp.is_tree else [])

    def one(seed):
        tr = simulate(sp, mu, steps, seed, spacing)
        conv = boundary_convergence(sp, tr, R, w, Fw, r)
        d = drift(tr)
        rec = {"seed": seed, "rng": RNG_NAME, "mu": mu.record(), "irreducible": mu.irreducible,
               "drift": d["terminal"], "drift_curve": d["curve"], "final_length": tr.lengths[-1]}
        rec.update(conv.record(sp))
        return rec

    seeds = [run.seed + k for k in range(n_seeds)]
    with ThreadPoolExecutor(max_workers=max(1, run.threads)) as pool:
        for rec in pool.map(one, seeds):
            run.out.record("trajectory", rec)


def load_config_mapping(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError("mu", str(exc)) from None
    if not isinstance(data, dict):
        raise ConfigError("mu", "file must hold a mapping word -> weight")
    return data


def cli(argv=None):
    """Console entry point with documented exit codes."""
    try:
        main.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.Abort:
        return 1
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except BoundaryLabError as exc:
        click.echo(f"error: {exc}", err=True)
        return exc.exit_code
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    return 0


def entry():
    sys.exit(cli())


if __name__ == "__main__":
    entry()
