"""
Main CLI entry point for dqkit.

Every subcommand prints one JSON report on stdout. Exit codes:
0 success, 1 failed check or error, 2 usage error.

Usage:
    dqkit --help
    dqkit poisson-check --pi so3.json
    dqkit weight --graph wedge2.json --samples 1e6 --seed 7
    dqkit hh --algebra mat2 --degree 0 --degree 1
"""

from __future__ import annotations

import json
import sys
import traceback
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any

import click

from dqkit import __version__
from dqkit.core.config import CACHE_ENV_VAR, RunDefaults, WeightSettings, load_defaults
from dqkit.core.log import setup_logging


@dataclass
class RunConfig:
    """What a report was computed from; embedded in every report."""

    subcommand: str
    inputs: dict[str, str] = field(default_factory=dict)
    order: int | None = None
    samples: int | None = None
    seed: int | None = None
    tolerance: float | None = None
    cache: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass
class CliState:
    defaults: RunDefaults
    verbose: bool


class SampleCount(click.ParamType):
    """Positive integer that also accepts 1e6-style input."""

    name = "samples"

    def convert(self, value: Any, param: click.Parameter | None, ctx: click.Context | None) -> int:
        if isinstance(value, int):
            count = value
        else:
            try:
                count = int(float(value)) if any(c in str(value) for c in "eE.") else int(value)
            except ValueError:
                self.fail(f"{value!r} is not a sample count", param, ctx)
        if count <= 0:
            self.fail(f"sample count must be positive, got {count}", param, ctx)
        return count


SAMPLES = SampleCount()


def emit(config: RunConfig, report: dict[str, Any], ok: bool = True) -> None:
    """Print the report; exit 1 when a check failed."""
    payload = {"config": config.to_dict(), **report}
    click.echo(json.dumps(payload, indent=2, sort_keys=True, default=str))
    if not ok:
        sys.exit(1)


@contextmanager
def reporting_errors(state: CliState) -> Iterator[None]:
    try:
        yield
    except click.ClickException:
        raise
    except Exception as e:
        click.echo(f"✗ Error: {e}", err=True)
        if state.verbose:
            traceback.print_exc()
        sys.exit(1)


def _mc_settings(state: CliState, samples: int | None, seed: int | None, workers: int | None) -> WeightSettings:
    w = state.defaults.weights
    return replace(
        w,
        samples=samples if samples is not None else w.samples,
        seed=seed if seed is not None else w.seed,
        workers=workers if workers is not None else w.workers,
    )


def _cache_path(state: CliState, cache: str | None) -> Path:
    return state.defaults.with_cache(cache).weights.cache


@click.group()
@click.version_option(version=__version__, prog_name="dqkit")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="INI file with run defaults")
@click.option("--verbose", "-v", is_flag=True, help="Debug logging and tracebacks")
@click.pass_context
def main(ctx: click.Context, config_path: str | None, verbose: bool) -> None:
    """
    Deformation quantization toolkit.

    Polyvector and polydifferential calculus, Maurer–Cartan checks,
    Kontsevich graphs and weights, star-product assembly and Hochschild
    cohomology of finite-dimensional algebras.
    """
    setup_logging(verbose)
    ctx.obj = CliState(load_defaults(config_path), verbose)


pass_state = click.make_pass_decorator(CliState)


# ========== polyvector / operator calculus ==========


@main.command("poisson-check")
@click.option("--pi", "pi_path", required=True, type=click.Path(exists=True), help="Bivector JSON")
@pass_state
def poisson_check(state: CliState, pi_path: str) -> None:
    """
    Check [Π, Π] = 0.

    \b
    Examples:
      dqkit poisson-check --pi so3.json
    """
    from dqkit.algebra.tpoly import is_poisson, sn_bracket
    from dqkit.cli.inputs import load_polyvector

    with reporting_errors(state):
        pi = load_polyvector(pi_path)
        poisson = is_poisson(pi)
        report = {"poisson": poisson, "schouten": sn_bracket(pi, pi).to_dict()}
    emit(RunConfig("poisson-check", {"pi": pi_path}), report, ok=poisson)


@main.command("sn-bracket")
@click.option("--a", "a_path", required=True, type=click.Path(exists=True))
@click.option("--b", "b_path", required=True, type=click.Path(exists=True))
@pass_state
def sn_bracket_cmd(state: CliState, a_path: str, b_path: str) -> None:
    """Schouten–Nijenhuis bracket of two polyvectors."""
    from dqkit.algebra.tpoly import sn_bracket
    from dqkit.cli.inputs import load_polyvector

    with reporting_errors(state):
        bracket = sn_bracket(load_polyvector(a_path), load_polyvector(b_path))
    emit(RunConfig("sn-bracket", {"a": a_path, "b": b_path}), {"bracket": bracket.to_dict()})


@main.command("moyal")
@click.option("--pi", "pi_path", required=True, type=click.Path(exists=True), help="Constant bivector JSON")
@click.option("--f", "f_path", required=True, type=click.Path(exists=True), help="Polynomial JSON")
@click.option("--g", "g_path", required=True, type=click.Path(exists=True), help="Polynomial JSON")
@click.option("--order", type=int, default=None, help="Truncation order")
@pass_state
def moyal_cmd(state: CliState, pi_path: str, f_path: str, g_path: str, order: int | None) -> None:
    """Moyal product f * g through ℏ^order."""
    from dqkit.algebra.dpoly import commutator_order1, moyal, moyal_star
    from dqkit.algebra.tpoly import apply_bivector
    from dqkit.cli.inputs import load_poly, load_polyvector

    n = order if order is not None else state.defaults.order
    with reporting_errors(state):
        pi, f, g = load_polyvector(pi_path), load_poly(f_path), load_poly(g_path)
        product = moyal(f, g, pi, n)
        report: dict[str, Any] = {"product": product.to_dict(lambda p: p.to_dict())}
        if n >= 1:
            comm = commutator_order1(moyal_star(pi, n), f, g)
            report["commutator_is_twice_bracket"] = comm == apply_bivector(pi, f, g).scale(2)
    emit(RunConfig("moyal", {"pi": pi_path, "f": f_path, "g": g_path}, order=n), report)


@main.command("hkr")
@click.option("--xi", "xi_path", required=True, type=click.Path(exists=True), help="Polyvector JSON")
@pass_state
def hkr_cmd(state: CliState, xi_path: str) -> None:
    """HKR image of a polyvector and its Hochschild cocycle check."""
    from dqkit.algebra.dpoly import hkr, hochschild_delta
    from dqkit.cli.inputs import load_polyvector

    with reporting_errors(state):
        op = hkr(load_polyvector(xi_path))
        cocycle = hochschild_delta(op).is_zero()
    emit(RunConfig("hkr", {"xi": xi_path}), {"operator": op.to_dict(), "cocycle": cocycle}, ok=cocycle)


# ========== Maurer–Cartan ==========


@main.command("mc-check")
@click.option("--element", "element_path", required=True, type=click.Path(exists=True))
@click.option("--order", type=int, default=None)
@pass_state
def mc_check(state: CliState, element_path: str, order: int | None) -> None:
    """Per-order Maurer–Cartan residuals of a T_poly or D_poly element."""
    from dqkit.algebra.maurer_cartan import mc_residual
    from dqkit.cli.inputs import load_mc_element

    with reporting_errors(state):
        element = load_mc_element(element_path, order)
        residuals = mc_residual(element)
        ok = all(r.is_zero() for r in residuals.values())
        report = {"mc": ok, "residuals": {str(k): r.to_dict() for k, r in residuals.items()}}
    emit(RunConfig("mc-check", {"element": element_path}, order=element.order), report, ok=ok)


@main.command("gauge-act")
@click.option("--alpha", "alpha_path", required=True, type=click.Path(exists=True))
@click.option("--element", "element_path", required=True, type=click.Path(exists=True))
@click.option("--order", type=int, default=None)
@pass_state
def gauge_act_cmd(state: CliState, alpha_path: str, element_path: str, order: int | None) -> None:
    """Act on an MC element by exp(α)."""
    from dqkit.algebra.maurer_cartan import gauge_act, is_mc
    from dqkit.cli.inputs import element_to_dict, load_gauge_element, load_json, load_mc_element

    with reporting_errors(state):
        n = order
        if n is None:
            n = max(len(load_json(alpha_path)["coefficients"]), len(load_json(element_path)["coefficients"]))
        result = gauge_act(load_gauge_element(alpha_path, n), load_mc_element(element_path, n))
        report = {"result": element_to_dict(result), "mc": is_mc(result)}
    emit(RunConfig("gauge-act", {"alpha": alpha_path, "element": element_path}, order=n), report)


@main.command("star-equiv")
@click.option("--star1", "star1_path", required=True, type=click.Path(exists=True))
@click.option("--star2", "star2_path", required=True, type=click.Path(exists=True))
@click.option("--alpha", "alpha_path", required=True, type=click.Path(exists=True))
@pass_state
def star_equiv(state: CliState, star1_path: str, star2_path: str, alpha_path: str) -> None:
    """Check star2∘(E⊗E) = E∘star1 with E = exp(α)."""
    from dqkit.algebra.maurer_cartan import GaugeElementD, star_gauge_equivalent
    from dqkit.cli.inputs import load_gauge_element, load_star

    with reporting_errors(state):
        s1, s2 = load_star(star1_path), load_star(star2_path)
        alpha = load_gauge_element(alpha_path, s1.order)
        if not isinstance(alpha, GaugeElementD):
            raise click.UsageError("--alpha must be a dpoly gauge element")
        equivalent = star_gauge_equivalent(s1, s2, alpha)
    emit(
        RunConfig("star-equiv", {"star1": star1_path, "star2": star2_path, "alpha": alpha_path}, order=s1.order),
        {"equivalent": equivalent},
        ok=equivalent,
    )


# ========== graphs ==========


@main.group("graphs")
def graphs_cli() -> None:
    """Enumerate and export admissible graphs."""


@graphs_cli.command("enumerate")
@click.option("--n", type=click.IntRange(min=0), required=True)
@click.option("--nbar", type=click.IntRange(min=0), required=True)
@click.option("--edges", type=click.IntRange(min=0), default=None, help="Default: 2n + nbar - 2")
@click.option("--list", "list_graphs", is_flag=True, help="Include every graph in the report")
@pass_state
def graphs_enumerate(state: CliState, n: int, nbar: int, edges: int | None, list_graphs: bool) -> None:
    """
    Count (and optionally list) admissible graphs.

    \b
    Examples:
      dqkit graphs enumerate --n 2 --nbar 2
    """
    from dqkit.graphs.graph import enumerate_graphs

    edge_count = edges if edges is not None else 2 * n + nbar - 2
    with reporting_errors(state):
        graphs = enumerate_graphs(n, nbar, edge_count, state.defaults.enumeration_guard)
        report: dict[str, Any] = {"count": len(graphs)}
        if list_graphs:
            report["graphs"] = [g.to_dict() for g in graphs]
    emit(RunConfig("graphs", {"n": str(n), "nbar": str(nbar), "edges": str(edge_count)}), report)


@graphs_cli.command("export")
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option("--dot", "as_dot", is_flag=True, help="Graphviz output instead of JSON")
@pass_state
def graphs_export(state: CliState, graph_path: str, as_dot: bool) -> None:
    """Validate a graph and print it as DOT or canonical JSON."""
    from dqkit.cli.inputs import load_graph
    from dqkit.graphs.graph import export_dot

    with reporting_errors(state):
        g = load_graph(graph_path)
    if as_dot:
        click.echo(export_dot(g), nl=False)
    else:
        emit(RunConfig("graphs", {"graph": graph_path}), {"graph": g.to_dict(), "key": g.key()})


# ========== weights ==========


@main.command("weight")
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option("--samples", type=SAMPLES, default=None)
@click.option("--seed", type=click.IntRange(min=0), default=None)
@click.option("--workers", type=click.IntRange(min=0), default=None, help="0 = all cores")
@click.option("--cache", type=click.Path(dir_okay=False), envvar=CACHE_ENV_VAR, default=None,
              help=f"Weight cache to update (env: {CACHE_ENV_VAR})")
@pass_state
def weight_cmd(
    state: CliState,
    graph_path: str,
    samples: int | None,
    seed: int | None,
    workers: int | None,
    cache: str | None,
) -> None:
    """
    Monte-Carlo weight of one graph.

    \b
    Examples:
      dqkit weight --graph wedge2.json --samples 1e6 --seed 7
    """
    from dqkit.cli.inputs import load_graph
    from dqkit.graphs.graph import canonical_star_order
    from dqkit.star.sources import ClosedFormWeights, signed
    from dqkit.weights.cache import WeightCache
    from dqkit.weights.integrate import integrate_weight

    s = _mc_settings(state, samples, seed, workers)
    with reporting_errors(state):
        g = load_graph(graph_path)
        rep, sign = canonical_star_order(g)
        est = integrate_weight(rep, s.samples, s.seed, s.chunk_size, s.workers, s.rejection_threshold)
        if cache is not None:
            store = WeightCache(_cache_path(state, cache))
            if store.put(rep.key(), est):
                store.save()
        report: dict[str, Any] = {"key": g.key(), "estimate": signed(est, sign).to_dict()}  # type: ignore[union-attr]
        closed = ClosedFormWeights().weight(g)
        if closed is not None:
            report["closed_form"] = str(closed)
    emit(
        RunConfig("weight", {"graph": graph_path}, samples=s.samples, seed=s.seed, cache=cache),
        report,
    )


@main.command("vanishing")
@click.option("--edges", required=True, help="Three edges, e.g. 1-2,1-3,2-3")
@click.option("--samples", type=SAMPLES, default=None)
@click.option("--seed", type=click.IntRange(min=0), default=None)
@click.option("--workers", type=click.IntRange(min=0), default=None)
@pass_state
def vanishing_cmd(state: CliState, edges: str, samples: int | None, seed: int | None, workers: int | None) -> None:
    """Three-point angle-form integral over ℂ, expected to vanish."""
    from dqkit.weights.integrate import vanishing_check

    try:
        pairs = [tuple(int(v) for v in e.split("-")) for e in edges.split(",")]
    except ValueError:
        raise click.BadParameter(f"cannot parse {edges!r}", param_hint="--edges") from None
    s = _mc_settings(state, samples, seed, workers)
    tol = state.defaults.tolerance
    with reporting_errors(state):
        est = vanishing_check(pairs, s.samples, s.seed, s.chunk_size, s.workers, s.rejection_threshold)  # type: ignore[arg-type]
        ok = abs(est.value) <= tol * est.stderr
    emit(
        RunConfig("vanishing", {"edges": edges}, samples=s.samples, seed=s.seed, tolerance=tol),
        {"estimate": est.to_dict(), "vanishes": ok},
        ok=ok,
    )


# ========== star products ==========


def _weight_source(state: CliState, cache: str | None, integrate: bool, samples: int | None,
                   seed: int | None, workers: int | None) -> Any:
    from dqkit.star.sources import CachedWeights
    from dqkit.weights.cache import WeightCache

    settings = _mc_settings(state, samples, seed, workers) if integrate else None
    return CachedWeights(WeightCache(_cache_path(state, cache)), settings)


def _mc_options(fn: Any) -> Any:
    for decorator in reversed([
        click.option("--cache", type=click.Path(dir_okay=False), envvar=CACHE_ENV_VAR, default=None,
                     help=f"Weight cache (env: {CACHE_ENV_VAR})"),
        click.option("--integrate/--no-integrate", default=False,
                     help="Integrate weights missing from the cache"),
        click.option("--samples", type=SAMPLES, default=None),
        click.option("--seed", type=click.IntRange(min=0), default=None),
        click.option("--workers", type=click.IntRange(min=0), default=None),
    ]):
        fn = decorator(fn)
    return fn


@main.command("star")
@click.option("--pi", "pi_path", required=True, type=click.Path(exists=True))
@click.option("--order", type=click.IntRange(0, 2), default=2)
@click.option("--compare-moyal", is_flag=True, help="Compare with the Moyal product (constant Π)")
@click.option("--probe-degree", type=click.IntRange(min=1), default=None)
@_mc_options
@pass_state
def star_cmd(state: CliState, pi_path: str, order: int, compare_moyal: bool, probe_degree: int | None,
             cache: str | None, integrate: bool, samples: int | None, seed: int | None,
             workers: int | None) -> None:
    """
    Assemble the graph star product through ℏ^order.

    \b
    Examples:
      dqkit star --pi pi.json --order 2 --cache weights.json --integrate
    """
    from dqkit.algebra.dpoly import moyal_star
    from dqkit.cli.inputs import load_polyvector
    from dqkit.star.assemble import build_star, compare_star, probe_tuples

    tol = state.defaults.tolerance
    degree = probe_degree or state.defaults.probe_degree
    ok = True
    with reporting_errors(state):
        pi = load_polyvector(pi_path)
        source = _weight_source(state, cache, integrate, samples, seed, workers)
        star = build_star(pi, order, source, state.defaults.enumeration_guard)
        report: dict[str, Any] = {
            "provenance": {str(k): v for k, v in star.provenance.items()},
            "terms": {str(k): t.to_dict() for k, t in enumerate(star.terms)},
        }
        if compare_moyal:
            reports = compare_star(star, moyal_star(pi, order), probe_tuples(pi.dim, degree, 2), tol)
            report["moyal"] = {str(k): r.to_dict() for k, r in reports.items()}
            ok = all(r.passed for r in reports.values())
    s = _mc_settings(state, samples, seed, workers)
    emit(
        RunConfig("star", {"pi": pi_path}, order=order, samples=s.samples, seed=s.seed,
                  tolerance=tol, cache=str(_cache_path(state, cache))),
        report,
        ok=ok,
    )


@main.command("assoc")
@click.option("--pi", "pi_path", required=True, type=click.Path(exists=True))
@click.option("--order", type=int, default=2)
@click.option("--moyal", "use_moyal", is_flag=True, help="Use the Moyal product instead of the graph product")
@click.option("--probe-degree", type=click.IntRange(min=1), default=None)
@_mc_options
@pass_state
def assoc_cmd(state: CliState, pi_path: str, order: int, use_moyal: bool, probe_degree: int | None,
              cache: str | None, integrate: bool, samples: int | None, seed: int | None,
              workers: int | None) -> None:
    """Per-order associativity residuals on monomial probes."""
    from dqkit.algebra.dpoly import moyal_star
    from dqkit.cli.inputs import load_polyvector
    from dqkit.star.assemble import associativity_residual, build_star, probe_tuples

    tol = state.defaults.tolerance
    degree = probe_degree or state.defaults.probe_degree
    with reporting_errors(state):
        pi = load_polyvector(pi_path)
        if use_moyal:
            star: Any = moyal_star(pi, order)
        else:
            source = _weight_source(state, cache, integrate, samples, seed, workers)
            star = build_star(pi, order, source, state.defaults.enumeration_guard)
        reports = associativity_residual(star, probe_tuples(pi.dim, degree, 3), tol)
        ok = all(r.passed for r in reports.values())
    s = _mc_settings(state, samples, seed, workers)
    emit(
        RunConfig("assoc", {"pi": pi_path}, order=order, samples=s.samples, seed=s.seed, tolerance=tol),
        {"residuals": {str(k): r.to_dict() for k, r in reports.items()}},
        ok=ok,
    )


@main.command("formality")
@click.option("--n", "n_inputs", type=click.IntRange(1, 2), required=True)
@click.option("--xi", "xi_paths", multiple=True, required=True, type=click.Path(exists=True))
@click.option("--probe-degree", type=click.IntRange(min=1), default=None)
@_mc_options
@pass_state
def formality_cmd(state: CliState, n_inputs: int, xi_paths: tuple[str, ...], probe_degree: int | None,
                  cache: str | None, integrate: bool, samples: int | None, seed: int | None,
                  workers: int | None) -> None:
    """Residual of the formality equation for n = 1 or 2 inputs."""
    from dqkit.cli.inputs import load_polyvector
    from dqkit.star.assemble import formality_residual, probe_tuples

    if len(xi_paths) != n_inputs:
        raise click.BadParameter(f"expected {n_inputs} --xi files, got {len(xi_paths)}", param_hint="--xi")
    tol = state.defaults.tolerance
    degree = probe_degree or state.defaults.probe_degree
    with reporting_errors(state):
        xis = [load_polyvector(p) for p in xi_paths]
        arity = sum(x.degree for x in xis) - 2 * n_inputs + 3
        source = _weight_source(state, cache, integrate, samples, seed, workers)
        result = formality_residual(n_inputs, xis, probe_tuples(xis[0].dim, degree, arity), source, tol)
    s = _mc_settings(state, samples, seed, workers)
    emit(
        RunConfig("formality", {f"xi{i + 1}": p for i, p in enumerate(xi_paths)},
                  samples=s.samples, seed=s.seed, tolerance=tol),
        {"residual": result.to_dict()},
        ok=result.passed,
    )


# ========== Hochschild cohomology ==========


@main.command("hh")
@click.option("--algebra", "algebra_src", required=True,
              help="Fixture name (dual, diag2, mat2, z2) or algebra JSON file")
@click.option("--degree", "degrees", type=click.IntRange(min=0), multiple=True, help="Default: 0, 1, 2")
@pass_state
def hh_cmd(state: CliState, algebra_src: str, degrees: tuple[int, ...]) -> None:
    """
    Hochschild cohomology dimensions with independent cross-checks.

    \b
    Examples:
      dqkit hh --algebra mat2
      dqkit hh --algebra algebra.json --degree 2
    """
    from dqkit.algebra.hochschild import center_dim, derivation_dims, hh_dim, homotopy_check
    from dqkit.cli.inputs import load_algebra

    guard = state.defaults.size_guard
    wanted = degrees or (0, 1, 2)
    with reporting_errors(state):
        a = load_algebra(algebra_src)
        der, inner = derivation_dims(a)
        homotopy = {str(n): homotopy_check(a, n, size_guard=guard) for n in wanted}
        report = {
            "dim": a.dim,
            "hh": {str(n): hh_dim(a, n, guard) for n in wanted},
            "center": center_dim(a),
            "derivations": der,
            "inner_derivations": inner,
            "homotopy": homotopy,
        }
        ok = all(homotopy.values())
        if 0 in wanted:
            ok = ok and report["hh"]["0"] == report["center"]  # type: ignore[index]
        if 1 in wanted:
            ok = ok and report["hh"]["1"] == der - inner  # type: ignore[index]
    emit(RunConfig("hh", {"algebra": algebra_src}), report, ok=ok)


if __name__ == "__main__":
    main()
