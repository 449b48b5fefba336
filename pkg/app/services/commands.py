"""
The command operations shared by the CLI script and the HTTP routes.

Each cmd_* function takes resolved objects plus a SessionConfig and returns a
CommandReport; rendering and exit codes live in the callers.
"""

import json
import logging
from typing import Any, Callable, Dict, List, Optional, Sequence

import config
from app.models.schemas import CommandReport, SessionConfig
from app.services import builtins, steenrod
from app.services.errors import CertificateError, DescriptionError, ExpectationMismatch
from app.services.graded import GradedComodule, GradedModule, Truth
from app.services.homalg import default_degrees, ext, local_cohomology, local_cohomology_general
from app.services.idealsets import H0, h0, is_rational
from app.services.loaders import Loaded, as_module
from app.services.reporting import summary_value, table
from app.services.steenrod import MilnorElement, element_vector
from app.services.towers import (
    ClassDescriptor,
    ComoduleFamily,
    DerivedLimitReport,
    Tower,
    derived_product,
    derived_sequential_limit,
    lim_module,
    localization_oracle,
    milnor_les_check,
    mittag_leffler,
    moore_complex,
)

logger = logging.getLogger(__name__)


def _session(session: Optional[SessionConfig]) -> SessionConfig:
    return session if session is not None else SessionConfig()


def _nonzero_dims(dims: Dict[int, int]) -> Dict[int, int]:
    return {t: n for t, n in dims.items() if n}


def _in_window(degrees: Sequence[int], session: SessionConfig) -> List[int]:
    return [t for t in degrees if session.window_lo <= t <= session.window_hi]


# ---------------------------------------------------------------------------
# describe
# ---------------------------------------------------------------------------

def _describe_module(m: GradedModule) -> CommandReport:
    failures = m.check_axioms()
    summary = {
        "kind": "module",
        "algebra": m.algebra.name,
        "window": str(m.window),
        "total_dim": m.total_dim(),
        "nonzero_degrees": m.nonzero_degrees(),
        "bounded_below_at": m.bounded_below_at,
        "bounded_above_at": m.bounded_above_at,
        "associativity": "ok" if not failures else f"{len(failures)} failures",
    }
    rows = [(t, m.dim(t), ", ".join(m.labels[t])) for t in m.window.degrees() if m.dim(t)]
    report = CommandReport(command="describe", subject=m.name, summary=summary,
                           tables=[table("basis", ["degree", "dim", "labels"], rows)])
    if failures:
        report.status = "invalid"
        report.notes.append(f"(ab)x != a(bx) at (e1, e2, t) = {failures[:5]}")
    return report


def _describe_comodule(m: GradedComodule) -> CommandReport:
    failures = m.check_axioms()
    summary = {
        "kind": "comodule",
        "coalgebra": m.coalgebra.name,
        "window": str(m.window),
        "total_dim": m.total_dim(),
        "bounded_below_at": m.bounded_below_at,
        "bounded_above_at": m.bounded_above_at,
        "coassociativity": "ok" if not failures else f"{len(failures)} failures",
    }
    rows = [(t, n, ", ".join(m.labels[t])) for t, n in m.dims().items() if n]
    report = CommandReport(command="describe", subject=m.name, summary=summary,
                           tables=[table("basis", ["degree", "dim", "labels"], rows)])
    if failures:
        report.status = "invalid"
        report.notes.append(f"coaction fails coassociativity at (t, s1, s2) = {failures[:5]}")
    return report


def _describe_family(family: ComoduleFamily) -> CommandReport:
    rows = []
    for i in family.indices():
        member = family.member(i)
        rows.append((i, member.name, member.total_dim(), str(_nonzero_dims(member.dims()))))
    mismatches = family.tail_mismatches()
    summary = {
        "kind": "family",
        "coalgebra": family.coalgebra.name,
        "indices": family.indices(),
        "finite": family.is_finite,
        "tail": str(family.tail) if family.tail is not None else None,
        "tail_mismatches": mismatches,
    }
    return CommandReport(command="describe", subject=family.name, summary=summary,
                         status="ok" if not mismatches else "invalid",
                         tables=[table("members", ["index", "name", "total_dim", "dims"], rows)])


def _describe_tower(tower: Tower, session: SessionConfig) -> CommandReport:
    bad = tower.check_maps()
    cert = tower.stability(run=session.run)
    rows = [(i, m.name, str(_nonzero_dims(m.dims()))) for i, m in enumerate(tower.comodules)]
    stable_rows = [(t, cert.stable_from[t]) for t in cert.degrees]
    summary = {
        "kind": "tower",
        "coalgebra": tower.coalgebra.name,
        "horizon": tower.horizon,
        "maps": "ok" if not bad else f"maps {bad} are not comodule maps",
        "stable_degrees": [t for t in cert.degrees if cert.stable_from[t] is not None],
    }
    return CommandReport(command="describe", subject=tower.name, summary=summary,
                         status="ok" if not bad else "invalid",
                         tables=[table("members", ["index", "name", "dims"], rows),
                                 table("stability", ["degree", "stable_from"], stable_rows)])


def cmd_describe(subject: Loaded, session: Optional[SessionConfig] = None) -> CommandReport:
    """Dimensions, bounds and axiom checks of any loaded object."""
    session = _session(session)
    if isinstance(subject, GradedModule):
        return _describe_module(subject)
    if isinstance(subject, GradedComodule):
        return _describe_comodule(subject)
    if isinstance(subject, ComoduleFamily):
        return _describe_family(subject)
    if isinstance(subject, Tower):
        return _describe_tower(subject, session)
    raise DescriptionError(f"nothing to describe for {type(subject).__name__}")


# ---------------------------------------------------------------------------
# torsion and rationality
# ---------------------------------------------------------------------------

def _torsion(label: str, subject: Loaded, ideal_spec: str, horizon: Optional[int],
             session: SessionConfig) -> CommandReport:
    m = as_module(subject)
    ideals = builtins.ideal_set(ideal_spec, m.algebra, horizon if horizon is not None else session.ideal_horizon)
    result = h0(ideals, m) if label == "h0" else H0(ideals, m)
    summary = {
        "ideal_set": ideal_spec,
        "total_dim": result.subspace.total_dim(),
        "module_dim": m.total_dim(),
        "dims": summary_value(_nonzero_dims(result.dims())),
        "certified": result.is_certified(),
    }
    report = CommandReport(command=label, subject=m.name, summary=summary,
                           tables=[table(f"{label} basis", ["degree", "dim", "certified", "element"], result.rows())])
    if not result.is_certified():
        report.notes.append("some degrees are only certified on the window")
    return report


def cmd_h0(subject: Loaded, ideal_spec: str = "grad", horizon: Optional[int] = None,
           session: Optional[SessionConfig] = None) -> CommandReport:
    return _torsion("h0", subject, ideal_spec, horizon, _session(session))


def cmd_H0(subject: Loaded, ideal_spec: str = "grad", horizon: Optional[int] = None,
           session: Optional[SessionConfig] = None) -> CommandReport:
    return _torsion("H0", subject, ideal_spec, horizon, _session(session))


def cmd_rational(subject: Loaded, coalgebra_name: Optional[str] = None,
                 session: Optional[SessionConfig] = None) -> CommandReport:
    """Both rationality tests; a non-rational module is a result, not an error."""
    m = as_module(subject)
    coalgebra = builtins.coalgebra(coalgebra_name) if coalgebra_name else m.algebra.dual()
    result = is_rational(m, coalgebra)
    summary = {
        "coalgebra": coalgebra.name,
        "verdict": result.verdict,
        "annihilator_test": result.annihilator_test,
        "torsion_test": result.torsion_test,
        "witness": result.witness_label,
        "discrepancy": result.discrepancy,
    }
    report = CommandReport(command="rational", subject=m.name, summary=summary_value(summary))
    if result.caveat:
        report.notes.append(result.caveat)
    if result.discrepancy:
        report.status = "discrepancy"
        logger.warning(f"Rationality tests disagree on {m.name}")
    return report


# ---------------------------------------------------------------------------
# Ext and local cohomology
# ---------------------------------------------------------------------------

def cmd_ext(source: Loaded, target: Loaded, max_s: int = 2, degrees: Optional[Sequence[int]] = None,
            session: Optional[SessionConfig] = None) -> CommandReport:
    session = _session(session)
    n, m = as_module(source), as_module(target)
    degrees = list(degrees) if degrees is not None else list(range(session.window_lo, session.window_hi + 1))
    result = ext(n, m, max_s, degrees)
    rows = result.rows(max_s, degrees)
    nonzero = [[s, t, d] for s, t, d, _ in rows if d]
    summary = {
        "max_s": max_s,
        "degrees": [min(degrees), max(degrees)],
        "nonzero_cells": nonzero,
        "uncertified_cells": sum(1 for *_, c in rows if not c),
    }
    return CommandReport(command="ext", subject=f"Ext({n.name}, {m.name})", summary=summary,
                         tables=[table("Ext", ["s", "t", "dim", "certified"], rows)])


def cmd_localcoh(subject: Loaded, n: int = 0, j_max: Optional[int] = None, degrees: Optional[Sequence[int]] = None,
                 ideal_spec: str = "grad", session: Optional[SessionConfig] = None) -> CommandReport:
    """The (stage, degree) table of Ext^n(Gamma*/K_j, M) and the stabilized values."""
    session = _session(session)
    m = as_module(subject)
    j_max = j_max if j_max is not None else session.ideal_horizon
    degrees = list(degrees) if degrees is not None else _in_window(default_degrees(m, n), session)
    if ideal_spec == "grad":
        lc = local_cohomology(m, n, j_max, degrees)
    else:
        lc = local_cohomology_general(builtins.ideal_set(ideal_spec, m.algebra, j_max), m, n, degrees)
    values = [(t, lc.stable_from[t], lc.value[t]) for t in lc.degrees]
    summary = {
        "n": n,
        "ideal_set": ideal_spec,
        "stages": len(lc.stage_names),
        "values": {t: v for t, _, v in values},
        "cofinal": lc.cofinal,
    }
    report = CommandReport(command="localcoh", subject=m.name, summary=summary_value(summary),
                           tables=[table("tower", ["degree", "stage", "ideal", "dim", "certified"], lc.rows()),
                                   table("colimit", ["degree", "stable_from", "value"], values)])
    open_degrees = [t for t, s, _ in values if s is None]
    if open_degrees:
        report.notes.append(f"not stabilized in degrees {open_degrees}")
    return report


# ---------------------------------------------------------------------------
# derived limits
# ---------------------------------------------------------------------------

def _limit_report(command: str, result: DerivedLimitReport) -> CommandReport:
    summary = {
        "n": result.n,
        "kind": result.kind,
        "stages": len(result.stages),
        "verdicts": {t: v.verdict for t, v in sorted(result.verdicts.items())},
        "horizon_bounded": result.horizon_bounded,
    }
    tables = [table("verdicts", ["degree", "verdict", "dim", "witness", "note"], result.rows())]
    survival = result.survival_rows()
    if survival:
        tables.append(table("survival", ["degree", "component", "order", "alive", "certified", "representative"],
                            survival))
    if result.limit_dims:
        tables.append(table("limit", ["degree", "dim"], sorted(result.limit_dims.items())))
    report = CommandReport(command=command, subject=result.subject, summary=summary_value(summary), tables=tables)
    if result.horizon_bounded:
        report.notes.append("verdicts hold up to the evaluated horizon")
    return report


def cmd_product(family: ComoduleFamily, n: int = 1, j_max: Optional[int] = None,
                degrees: Optional[Sequence[int]] = None, session: Optional[SessionConfig] = None) -> CommandReport:
    session = _session(session)
    result = derived_product(family, n, j_max if j_max is not None else session.ideal_horizon, degrees,
                             threads=session.threads)
    return _limit_report("product", result)


def cmd_seqlim(tower: Tower, n: int = 0, j_max: Optional[int] = None, degrees: Optional[Sequence[int]] = None,
               session: Optional[SessionConfig] = None) -> CommandReport:
    session = _session(session)
    result = derived_sequential_limit(tower, n, j_max if j_max is not None else session.ideal_horizon, degrees)
    return _limit_report("seqlim", result)


def cmd_tower(tower: Tower, n_max: Optional[int] = None, j_max: Optional[int] = None,
              session: Optional[SessionConfig] = None) -> CommandReport:
    """Mittag-Leffler, the Moore complex, the limit and, when n_max is given, the Milnor sequence check."""
    session = _session(session)
    ml = mittag_leffler(tower, run=session.run)
    summary = {"mittag_leffler": ml.verdict, "horizon": tower.horizon}
    tables = [table("mittag-leffler", ["degree", "verdict"], sorted(ml.per_degree.items()))]
    notes = []
    try:
        moore = moore_complex(tower, run=session.run)
        limit = lim_module(tower, run=session.run)
        summary["limit_dims"] = _nonzero_dims(limit.dims())
        tables.append(table("moore complex", ["degree", "length", "H0", "H1", "H2"], moore.rows()))
    except CertificateError as e:
        if ml.verdict != Truth.TRUE:
            raise
        logger.warning(f"No certified limit for {tower.name}: {e}")
        notes.append(str(e))
    if n_max is not None:
        les = milnor_les_check(tower, n_max, j_max if j_max is not None else session.ideal_horizon)
        summary["milnor_exact"] = les.exact
        tables.append(table("milnor sequence", ["s", "t", "lim", "P0", "P1", "rank_a", "rank_b", "exact", "detail"],
                            les.rows()))
    return CommandReport(command="tower", subject=tower.name, summary=summary_value(summary),
                         tables=tables, notes=notes)


def cmd_steenrod_table(n: int, session: Optional[SessionConfig] = None) -> CommandReport:
    """Milnor basis of A(n) with the dual xi-monomial labels."""
    frame = steenrod.basis_table(steenrod.build_A_n(n))
    rows = frame.values.tolist()
    return CommandReport(command="steenrod", subject=f"A({n})",
                         summary={"total_dim": len(rows), "top_degree": steenrod.top_degree(n)},
                         tables=[table("basis", list(frame.columns), rows)])


# ---------------------------------------------------------------------------
# canned examples
# ---------------------------------------------------------------------------

def _example_kx_product(session: SessionConfig) -> CommandReport:
    # survival order i + 1 only shows once j_max reaches 2(i + 1)
    family = builtins.kx_family(horizon=builtins.KX_FAMILY_HORIZON)
    j_max = builtins.DEFAULT_KX_TOP
    first = derived_product(family, 1, j_max=j_max, degrees=[-2], threads=session.threads)
    second = derived_product(family, 2, j_max=j_max, degrees=[-2], threads=session.threads)
    oracle = localization_oracle(family, ClassDescriptor({}, (0,)))
    report = _limit_report("example", first)
    report.summary = summary_value({
        "n1_verdict": first.verdict(-2),
        "n1_survival_orders": [c.order for c in first.verdicts[-2].survival],
        "n2_verdict": second.verdict(-2),
        "oracle_verdict": oracle.verdict,
    })
    return report


def _example_xi_product(session: SessionConfig) -> CommandReport:
    family = builtins.xi_family(horizon=3)
    result = derived_product(family, 1, j_max=8, degrees=[-1], threads=session.threads)
    report = _limit_report("example", result)
    report.summary = summary_value({
        "n1_verdict": result.verdict(-1),
        "survival_orders": [c.order for c in result.verdicts[-1].survival],
        "witness": result.verdicts[-1].witness,
    })
    return report


def _example_a1_annihilator(session: SessionConfig) -> CommandReport:
    a1 = builtins.algebra("a1")
    m = builtins.module("a1-self")
    ideals = builtins.ideal_set("gen:Sq(1)", a1)
    small, big = h0(ideals, m), H0(ideals, m)
    sq1 = element_vector(a1, MilnorElement.sq(1))
    sq2sq1 = element_vector(a1, MilnorElement.sq(2) * MilnorElement.sq(1))
    summary = {
        "h0_contains_sq1": sq1 in small.subspace,
        "h0_contains_sq2sq1": sq2sq1 in small.subspace,
        "H0_contains_sq2sq1": sq2sq1 in big.subspace,
    }
    return CommandReport(command="example", subject="A(1), S = {A(1)Sq(1)}", summary=summary_value(summary),
                         tables=[table("h0 basis", ["degree", "dim", "certified", "element"], small.rows()),
                                 table("H0 basis", ["degree", "dim", "certified", "element"], big.rows())])


def _example_a1_cyclic(session: SessionConfig) -> CommandReport:
    a1 = builtins.algebra("a1")
    ideals = builtins.ideal_set("gen:Sq(1)", a1)
    m, sub = builtins.module("a1-sq1"), builtins.module("a1-sq2sq1")
    summary = {
        "module_dim": m.total_dim(),
        "module_degrees": m.nonzero_degrees(),
        "h0_dim": h0(ideals, m).subspace.total_dim(),
        "H0_dim": H0(ideals, m).subspace.total_dim(),
        "sub_dim": sub.total_dim(),
        "sub_h0_dim": h0(ideals, sub).subspace.total_dim(),
        "sub_H0_dim": H0(ideals, sub).subspace.total_dim(),
    }
    return CommandReport(command="example", subject="A(1)Sq(1) and A(1)Sq(2)Sq(1)", summary=summary_value(summary),
                         tables=[table("h0 basis", ["degree", "dim", "certified", "element"], h0(ideals, m).rows())])


def _example_margolis_a1(session: SessionConfig) -> CommandReport:
    k, a1 = builtins.module("k-a1"), builtins.module("a1-self")
    degrees = list(range(-6, 7))
    result = ext(k, a1, 4, degrees)
    rows = result.rows(4, degrees)
    summary = {
        "hom_dims": {t: d for s, t, d, _ in rows if s == 0 and d},
        "higher_ext_total": sum(d for s, _, d, _ in rows if s > 0),
    }
    return CommandReport(command="example", subject="Ext(k, A(1))", summary=summary_value(summary),
                         tables=[table("Ext", ["s", "t", "dim", "certified"], rows)])


_EXAMPLES: Dict[str, Callable[[SessionConfig], CommandReport]] = {
    "kx-product": _example_kx_product,
    "xi-product": _example_xi_product,
    "a1-annihilator": _example_a1_annihilator,
    "a1-cyclic": _example_a1_cyclic,
    "margolis-a1": _example_margolis_a1,
}


def load_expected(path: Optional[str] = None) -> Dict[str, Dict[str, Any]]:
    path = path or config.EXPECTED_OUTCOMES_FILE
    with open(path, "r") as f:
        return json.load(f)


def compare(name: str, summary: Dict[str, Any], expected: Dict[str, Any]) -> List[str]:
    """Keys whose computed value differs from the stored one."""
    differences = []
    for key, want in expected.items():
        got = summary.get(key)
        if got != want:
            differences.append(f"{key}: expected {want!r}, got {got!r}")
    return differences


def cmd_example(name: str, session: Optional[SessionConfig] = None, check: bool = True,
                expected_path: Optional[str] = None) -> CommandReport:
    """Run a canned configuration and compare it against the stored outcome."""
    session = _session(session)
    name = config.EXAMPLE_ALIASES.get(name, name)
    if name not in _EXAMPLES:
        raise DescriptionError(f"unknown example {name!r}; expected one of {config.CANNED_EXAMPLES}", "name")
    logger.info(f"Running example {name}")
    report = _EXAMPLES[name](session)
    report.subject = f"{name}: {report.subject}"
    if check:
        expected = load_expected(expected_path)
        if name not in expected:
            raise DescriptionError(f"no stored outcome for {name}", "name")
        differences = compare(name, report.summary, expected[name])
        if differences:
            logger.error(f"Example {name} differs from its stored outcome: {differences}")
            raise ExpectationMismatch(name, differences)
        report.notes.append("matches the stored outcome")
    return report
