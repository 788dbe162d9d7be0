"""Catalog of pipeline steps run by the command-line tool.

Each step takes a :class:`~qbundles.scenario.Scenario`, builds what it
needs (constructions are shared through the scenario's memo) and returns
an :class:`Outcome` listing computed quantities and violated invariants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .algebra import check_algebra, covering_completion_algebra
from .errors import QBundleError
from .hopf import check_hopf, check_left_comodule
from .linalg import Matrix, intersect_all
from .modules import (
    ModuleCovering,
    check_covering_hypotheses,
    intertwining_violations,
    is_complete_module_covering,
    kernel_of_chart_action,
    module_covering_completion,
    regular_module,
)


@dataclass
class Outcome:
    details: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)


@dataclass(frozen=True)
class Step:
    name: str
    location: str
    summary: str
    run: Callable
    needs: tuple = ()  # scenario sections; "a|b+c" means a, or both b and c

    def missing(self, sections) -> list[str]:
        out = []
        for need in self.needs:
            options = [alt.split("+") for alt in need.split("|")]
            if not any(all(k in sections for k in alt) for alt in options):
                out.append(" or ".join(" with ".join(alt) for alt in options))
        return out


CATALOG: dict[str, Step] = {}

BUNDLE = "transitions|tau+comodule"
CONNECTION = "gauges+comodule|connection_forms"


def step(name: str, location: str, summary: str, needs=()):
    def register(fn):
        CATALOG[name] = Step(name, location, summary, fn, tuple(needs))
        return fn
    return register


def jsonable(x):
    """Exact, JSON-friendly form: rationals as ints or ``"p/q"`` strings."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, Matrix):
        return [jsonable(r) for r in x.rows]
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _memo(scn, key, build):
    memo = scn.__dict__.setdefault("_memo", {})
    if key not in memo:
        memo[key] = build()
    return memo[key]


def _pairs(cov):
    return [f"{i}-{j}" for i, j in cov.pairs()]


# base algebra and coverings


@step("algebra-axioms", "structure constants of the base algebra",
      "associativity and two-sided unit of the base algebra")
def _algebra_axioms(scn):
    return Outcome({"dim": scn.base.dim}, check_algebra(scn.base))


@step("covering-ideals", "coverings of algebras by ideals",
      "ideals are two-sided and intersect in zero; chart and overlap quotients",
      needs=("covering",))
def _covering_ideals(scn):
    cov = scn.covering
    overlaps = {f"{i}-{j}": cov.overlap(i, j).algebra.dim for i, j in cov.pairs()}
    return Outcome({"charts": len(cov), "chart_dims": [c.dim for c in cov.charts], "overlap_dims": overlaps})


def _completion(scn):
    return _memo(scn, "completion", lambda: covering_completion_algebra(scn.base, scn.covering))


@step("covering-completion", "covering completion of an algebra",
      "compatible tuples form an algebra; the canonical map into it is bijective",
      needs=("covering",))
def _covering_completion(scn):
    comp = _completion(scn)
    k = comp.canonical
    d = {"dim_base": scn.base.dim, "dim_completion": comp.algebra.dim, "canonical_injective": k.is_injective(),
         "canonical_surjective": k.is_surjective(), "complete": k.is_bijective()}
    bad = [f"canonical map: {v}" for v in k.violations()]
    if not k.is_bijective():
        bad.append(f"canonical map B -> B_c is not bijective (dim B = {scn.base.dim}, "
                   f"dim B_c = {comp.algebra.dim})")
    return Outcome(d, bad)


def _module_covering(scn):
    def build():
        m = regular_module(scn.base)
        return m, ModuleCovering(m, scn.submodules)
    return _memo(scn, "module_covering", build)


@step("faithful-module-kernels", "coverings of faithful modules",
      "kernels of the chart actions of a faithful module intersect in zero",
      needs=("covering|submodules",))
def _faithful_kernels(scn):
    m, c = _module_covering(scn)
    kers = [kernel_of_chart_action(m, s) for s in c.subs]
    d = {"module_dim": m.dim, "submodule_dims": [s.dim for s in c.subs], "kernel_dims": [k.dim for k in kers],
         "kernel_intersection_dim": intersect_all(kers).dim}
    return Outcome(d, check_covering_hypotheses(m, c))


@step("module-completion", "covering completion of a module",
      "the completion is a module over the algebra completion and the canonical embedding intertwines",
      needs=("covering|submodules",))
def _module_completion(scn):
    m, c = _module_covering(scn)
    comp = module_covering_completion(m, c)
    injective = comp.embedding.rank() == m.dim
    bad = intertwining_violations(m, comp)
    if not injective:
        bad.append("canonical map E -> E_c is not injective")
    return Outcome({"dim_module": m.dim, "dim_completion": comp.module.dim, "embedding_injective": injective}, bad)


@step("complete-module-covering", "complete coverings of modules",
      "both canonical maps are isomorphisms",
      needs=("covering|submodules",))
def _complete_module_covering(scn):
    m, c = _module_covering(scn)
    ok = is_complete_module_covering(m, c)
    return Outcome({"complete": ok}, [] if ok else ["module covering is not complete"])


# Hopf data


@step("hopf-axioms", "Hopf algebra of the structure group",
      "coassociativity, counit, multiplicativity of the coproduct and the antipode identities",
      needs=("hopf",))
def _hopf_axioms(scn):
    return Outcome({"dim": scn.hopf.dim}, check_hopf(scn.hopf))


@step("comodule-axioms", "left comodule of the fibre",
      "coassociativity and counitality of the coaction",
      needs=("hopf", "comodule"))
def _comodule_axioms(scn):
    return Outcome({"dim": scn.comodule.dim}, check_left_comodule(scn.comodule))


@step("principal-transition-functions", "transition functions of a locally trivial principal comodule",
      "unital, multiplicative, convolution invertible, convolution cocycle on triple overlaps",
      needs=("covering", "hopf", "tau"))
def _principal_data(scn):
    from .associated import check_principal_data

    return Outcome({"pairs": sorted(scn.data["tau"])}, check_principal_data(scn.principal))


# vector bundles


@step("transition-maps", "transition maps of a locally trivial bundle",
      "left linear invertible overlap maps with inverse pairs and the cocycle condition",
      needs=("covering", BUNDLE))
def _transition_maps(scn):
    t = scn.transitions
    d = {"fibre_dim": t.fibre_dim, "pairs": _pairs(t.covering),
         "matrices": {f"{i}-{j}": t.matrix(i, j) for i, j in t.covering.pairs()}}
    return Outcome(d, t.violations() + t.cocycle_violations())


def _qvb(scn):
    from .qvb import build_qvb

    return _memo(scn, "qvb", lambda: build_qvb(scn.transitions))


@step("qvb-axioms", "locally trivial quantum vector bundles",
      "faithfulness, complete base covering, surjective left-linear trivializations, kernel sums, "
      "complete kernel covering",
      needs=("covering", BUNDLE))
def _qvb_axioms(scn):
    from .qvb import verify_qvb

    q = _qvb(scn)
    return Outcome({"dim": q.dim, "ambient_dims": q.ambient_dims()}, verify_qvb(q))


@step("gluing-round-trip", "transition maps recovered from trivializations",
      "the transition maps of the glued bundle equal the input transition maps",
      needs=("covering", BUNDLE))
def _round_trip(scn):
    from .qvb import transitions_from_trivializations

    q, t = _qvb(scn), scn.transitions
    back = transitions_from_trivializations(q.module, q.zetas, q.covering, t.fibre_dim)
    bad = [f"transition map {i}-{j} is not recovered" for (i, j) in t.values if back.matrix(i, j) != t.matrix(i, j)]
    return Outcome({"recovered": not bad}, bad)


# calculi and forms


@step("calculi", "differential calculi on a covering",
      "chart and overlap calculi restrict to the base covering; differential graded algebra axioms",
      needs=("covering", "calculi"))
def _calculi(scn):
    from .dga import check_dga

    cal = scn.calculi
    d = {"bound": cal.bound, "chart_graded_dims": [c.graded_dims for c in cal.charts],
         "overlap_graded_dims": {f"{i}-{j}": cal.overlap(i, j)[0].graded_dims for i, j in scn.covering.pairs()},
         "glued_graded_dims": cal.completion().dga.graded_dims}
    bad = cal.violations(full=True)
    for i, c in enumerate(cal.charts):
        bad += [f"chart calculus {i}: {v}" for v in check_dga(c, check_associativity=False)]
    return Outcome(d, bad)


def _forms(scn):
    from .qvb import build_forms_qvb

    return _memo(scn, "forms", lambda: build_forms_qvb(scn.transitions, scn.calculi))


@step("forms-bundle", "bundle of forms with values in a bundle",
      "degreewise gluing of forms-valued sections; degree-0 part is the bundle itself",
      needs=("covering", BUNDLE, "calculi"))
def _forms_bundle(scn):
    from .qvb import forms_gluing_violations

    f = _forms(scn)
    bad = forms_gluing_violations(f) + [f"graded transitions: {v}" for v in f.transitions.violations()]
    if f.degree_zero_slice() != _qvb(scn).space:
        bad.append("degree-0 sections differ from the glued bundle")
    return Outcome({"graded_dims": f.graded_dims}, bad)


# associated bundles


@step("associated-bundle", "associated bundle as a cotensor product",
      "E(P,F) and the bundle glued from induced transitions agree via a bijective intertwining map",
      needs=("covering", "hopf", "tau", "comodule"))
def _associated(scn):
    from .associated import build_tilde, epsilon_iso
    from .qvb import verify_qvb

    eps = epsilon_iso(scn.principal, scn.comodule)
    tilde = eps.target
    bij = eps.is_bijective()
    d = {"dim_principal": eps.source.principal.dim, "dim_cotensor": eps.source.dim, "dim_glued": tilde.dim,
         "epsilon_bijective": bij}
    bad = [] if bij else ["epsilon is not bijective"]
    bad += eps.intertwining_violations()
    if bij:
        bad += eps.inverse_formula_violations()
    bad += [f"glued bundle: {v}" for v in verify_qvb(tilde)]
    if build_tilde(scn.principal, scn.comodule).space != _qvb(scn).space:
        bad.append("glued bundle differs from the one built from the transition maps")
    return Outcome(d, bad)


@step("horizontal-forms", "horizontal forms of the type of the fibre comodule",
      "forms-valued associated bundle and horizontal forms agree degreewise",
      needs=("covering", "hopf", "tau", "comodule", "calculi"))
def _horizontal(scn):
    from .associated import build_hor_E

    hor = build_hor_E(scn.principal, scn.comodule, scn.calculi)
    bij = hor.is_bijective()
    d = {"graded_dims": hor.graded_dims, "bundle_graded_dims": hor.forms_bundle.graded_dims, "epsilon_bijective": bij,
         "degreewise_ranks": {n: list(v) for n, v in hor.degreewise_ranks().items()}}
    bad = [] if bij else ["epsilon is not bijective"]
    bad += hor.degree_violations() + hor.intertwining_violations()
    if bij:
        bad += hor.inverse_formula_violations()
    return Outcome(d, bad)


# connections


def _graded_transitions(scn):
    return _forms(scn).transitions


@step("connection-compatibility", "gluing of local connections",
      "local connections agree on every overlap after conjugating by the transition maps",
      needs=("covering", BUNDLE, "calculi", CONNECTION))
def _compatibility(scn):
    from .connection import compatibility_residuals

    res = compatibility_residuals(scn.local_connections, _graded_transitions(scn))
    bad_pairs = {f"{i}-{j}": m for (i, j), m in sorted(res.items()) if not m.is_zero()}
    d = {"compatible": not bad_pairs, "residual_ranks": {k: m.rank() for k, m in bad_pairs.items()},
         "residuals": bad_pairs}
    return Outcome(d, [f"local connections {k.replace('-', ' and ')} disagree on the overlap" for k in bad_pairs])


def _global(scn):
    from .connection import assemble_global

    return _memo(scn, "global", lambda: assemble_global(scn.local_connections, _forms(scn)))


@step("global-connection", "connections on forms-valued bundles",
      "assembled connection obeys graded Leibniz, preserves trivialization kernels, raises degree by one; "
      "localizing and assembling are inverse",
      needs=("covering", BUNDLE, "calculi", CONNECTION))
def _global_connection(scn):
    from .connection import assemble_global, localize_global

    g = _global(scn)
    bad = g.violations()
    locs = localize_global(g)
    if locs != list(scn.local_connections):
        bad.append("localizing the assembled connection does not return the local connections")
    if assemble_global(locs, g.bundle).nabla != g.nabla:
        bad.append("assembling the localized connection does not return the connection")
    return Outcome({"dim": g.nabla.ncols}, bad)


@step("curvature", "curvature of a connection",
      "the square of the connection is left linear and raises degree by two",
      needs=("covering", BUNDLE, "calculi", CONNECTION))
def _curvature(scn):
    from .connection import curvature

    c = curvature(_global(scn))
    flat = [all(not any(x) for row in forms for x in row) for forms in c.local_forms]
    return Outcome({"zero": c.is_zero(), "rank": c.square.rank(), "locally_flat": flat},
                   c.linearity_violations() + c.degree_violations())


@step("gauge-connection", "connection induced by gauge potentials",
      "local connections from the gauge formula agree with their connection forms and glue",
      needs=("covering", "hopf", "tau", "comodule", "calculi", "gauges"))
def _gauge_connection(scn):
    from .associated import connection_from_gauge, gauge_nabla

    bad = [f"chart {g.chart}: connection form and gauge formula disagree"
           for g, loc in zip(scn.gauges, scn.local_connections) if loc.nabla != gauge_nabla(g, scn.comodule)]
    g = connection_from_gauge(scn.gauges, scn.comodule, scn.calculi, scn.principal)
    return Outcome({"dim": g.nabla.ncols}, bad + g.violations())


@step("gauge-curvature-forms", "curvature forms of gauge potentials",
      "local curvature forms reproduce the square of each local connection",
      needs=("hopf", "comodule", "covering", "calculi", "gauges"))
def _gauge_curvature(scn):
    from .associated import local_curvature_form

    d, bad = {"charts": []}, []
    for g in scn.gauges:
        lc = local_curvature_form(g, scn.comodule)
        bad += [f"chart {g.chart}: {v}" for v in lc.reproduction_violations()]
        d["charts"].append({"chart": g.chart, "zero": not any(any(v) for v in lc.values),
                            "undetermined": list(lc.undetermined),
                            "matches_convolution_formula": not lc.convolution_violations()})
    return Outcome(d, bad)


def list_checks() -> list[dict]:
    """Catalogue entries in pipeline order: step name, location and what it verifies."""
    return [{"step": s.name, "location": s.location, "verifies": s.summary} for s in CATALOG.values()]


def run_step(name: str, scn) -> dict:
    """One report entry; library errors become failures, anything else an error."""
    st = CATALOG[name]
    entry = {"step": name, "location": st.location}
    try:
        out = st.run(scn)
        details = jsonable(out.details)
    except QBundleError as exc:
        entry.update(status="fail", message=str(exc), violations=[str(v) for v in getattr(exc, "violations", []) or []])
        pair = getattr(exc, "pair", None)
        if pair is not None:
            entry["pair"] = list(pair)
        residual = getattr(exc, "residual", None)
        if residual is not None:
            entry["residual"] = jsonable(residual)
        return entry
    except Exception as exc:  # a bug, not a property failure
        entry.update(status="error", message=f"{type(exc).__name__}: {exc}")
        return entry
    entry["details"] = details
    entry["violations"] = list(out.violations)
    entry["status"] = "fail" if out.violations else "pass"
    return entry
