"""End-to-end scenario verification.

Pipeline: validate the star triangulation, certify coherence, build the
fan and its effective-cone data, tabulate intersection numbers over the
moduli spaces, obtain the residue series (fixture, closed form, or
one-parameter reconstruction), and compare coefficient by coefficient.
All comparisons are exact; the verdict is pass only when every compared
coefficient agrees.
"""

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import GeometryError, InputError, TrmcError
from .moduli import generating_function, normalized_ample_class
from .multipoly import (MultiPoly, TruncatedSeries, laurent_expand_at_vertex,
                        monomial_substitution)
from .polytopes import (characteristic_function, coherence_certificate,
                        validate_triangulation, vertex_monomial_exponents)
from .residues import (CurveSpec, product_series, residue_curve,
                       weighted_projective_series)
from .scenario import format_rational
from .toric import ToricVariety, fan_from_triangulation, mori_cone


@dataclass
class Report:
    scenario: dict
    name: str
    verdict: str
    order: int
    mori_generators: list
    residue_sources: list
    coefficients: list
    certificates: dict
    warnings: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.verdict == "pass"

    def to_json_dict(self):
        return {
            "name": self.name,
            "verdict": self.verdict,
            "order": self.order,
            "mori_generators": [list(g) for g in self.mori_generators],
            "residue_sources": list(self.residue_sources),
            "coefficients": self.coefficients,
            "certificates": self.certificates,
            "warnings": list(self.warnings),
            "timings": {k: round(v, 6) for k, v in self.timings.items()},
            "scenario": self.scenario,
        }

    def to_text(self):
        lines = [f"scenario: {self.name}",
                 f"order: {self.order}",
                 "generators: " + ", ".join(str(tuple(g))
                                            for g in self.mori_generators),
                 "residue sources: " + ", ".join(self.residue_sources)]
        for warning in self.warnings:
            lines.append(f"warning: {warning}")
        lines.append("")
        lines.append(f"{'exponents':<14}{'intersection':>18}"
                     f"{'residue':>18}  match")
        for row in self.coefficients:
            lines.append(f"{str(tuple(row['exponents'])):<14}"
                         f"{row['intersection']:>18}"
                         f"{row['residue']:>18}  "
                         f"{'ok' if row['match'] else 'MISMATCH'}")
        lines.append("")
        lines.append(f"verdict: {self.verdict}")
        return "\n".join(lines)


@contextmanager
def _stage(name, timings):
    start = time.perf_counter()
    try:
        yield
    except TrmcError as exc:
        raise type(exc)(f"[{name}] {exc}") from exc
    finally:
        timings[name] = timings.get(name, 0.0) + time.perf_counter() - start


def _mori_names(r):
    return tuple(f"y{k + 1}" for k in range(r))


def _fixture_series(scenario, chi_exponents, gens, order):
    kind, ratfunc = scenario.residue_fixture()
    names = _mori_names(len(gens))
    if kind == "a":
        shift = tuple(-c for c in chi_exponents)
        shifted = type(ratfunc)(ratfunc.numerator.shift(shift),
                                ratfunc.denominator.shift(shift))
        ratfunc = monomial_substitution(shifted, [list(g) for g in gens],
                                        names)
    return laurent_expand_at_vertex(ratfunc, order)


def _weights_series(scenario, gens, order):
    if len(gens) != 1 or tuple(gens[0]) != tuple(scenario.weights):
        raise GeometryError(
            "weights must equal the single effective-cone generator")
    series = weighted_projective_series(scenario.weights,
                                        scenario.integrand(), order)
    return TruncatedSeries(_mori_names(1), order,
                           {e: c for e, c in series.terms.items()})


def _product_series(scenario, gens, order):
    dims = scenario.product_dims
    r = len(dims)
    if len(gens) != r:
        raise GeometryError("product scenarios need one generator per "
                            "factor")
    sizes = [d + 1 for d in dims]
    starts = []
    acc = 0
    for s in sizes:
        starts.append(acc)
        acc += s
    # each generator must be the sum of one factor's rays, in order
    for j, g in enumerate(gens):
        expected = [0] * scenario.n_points
        for i in range(starts[j], starts[j] + sizes[j]):
            expected[i] = 1
        if tuple(g) != tuple(expected):
            raise GeometryError(
                "generators must list each factor's ray sum, factor by "
                "factor")
    total = TruncatedSeries(tuple(f"u{k+1}" for k in range(r)), order)
    for exps, coeff in scenario.integrand().terms.items():
        k = [sum(exps[starts[j]:starts[j] + sizes[j]]) for j in range(r)]
        total = total + product_series(dims, k, order).scale(coeff)
    terms = {}
    for e, c in total.terms.items():
        scale = Fraction(1)
        for j in range(r):
            scale *= Fraction(sizes[j]) ** (sizes[j] * e[j])
        terms[e] = c * scale
    return TruncatedSeries(_mori_names(r), order, terms)


def _curve_series(scenario, polytope, variety, cert, gens, order):
    if len(gens) != 1:
        raise InputError(
            "one-parameter reconstruction needs effective-cone rank 1")
    origin = polytope.origin_index()
    phis = [cert.lift[i] for i in range(len(polytope.points))
            if i != origin]
    spec = CurveSpec([1] * scenario.n_points, phis)
    integrand = scenario.integrand()
    limit = variety.integrate_polynomial(integrand)
    step = sum(p * g for p, g in zip(spec.exponents, gens[0]))
    if step <= 0:
        raise GeometryError("curve grading is not positive on the "
                            "generator")
    result = residue_curve(polytope, scenario.points, spec, integrand,
                           expected_limit=limit,
                           initial_degree=max(2, order))
    coeffs = result.series_coefficients(step * order)
    terms = {}
    for m, c in enumerate(coeffs):
        if c == 0:
            continue
        if m % step:
            raise GeometryError(
                "reconstructed residue has a term outside the grading "
                f"lattice (u^{m})")
        terms[(m // step,)] = c
    return TruncatedSeries(_mori_names(1), order, terms)


def verify(scenario, jobs=1, max_monomials=20000, order=None):
    """Run the full pipeline on a scenario and report the comparison."""
    timings = {}
    warnings = []
    order = scenario.order if order is None else int(order)

    with _stage("polytope", timings):
        polytope = scenario.base_polytope()
        if not polytope.is_reflexive():
            raise GeometryError("support polytope is not reflexive")

    with _stage("triangulation", timings):
        tri = scenario.triangulation_obj(polytope)
        report = validate_triangulation(tri, star=True)
        if not report.ok:
            raise GeometryError("; ".join(report.violations))

    with _stage("coherence", timings):
        cert = coherence_certificate(tri)

    with _stage("fan", timings):
        fan = fan_from_triangulation(tri)
        if len(fan.rays) != scenario.n_points:
            raise GeometryError("triangulation does not use every point")
        variety = ToricVariety(fan, max_monomials=max_monomials)

    with _stage("mori", timings):
        cone = mori_cone(variety)
        if not cone.dual_check_conclusive:
            warnings.append("wall curves may not generate the full "
                            "effective cone; dual-cone check inconclusive")
        if scenario.mori_generators is not None:
            gens = [tuple(g) for g in scenario.mori_generators]
            if sorted(gens) != sorted(tuple(g) for g in cone.generators):
                raise GeometryError(
                    f"scenario generators {gens} differ from computed "
                    f"{cone.generators}")
        else:
            gens = [tuple(g) for g in cone.generators]

    with _stage("secondary", timings):
        secondary = characteristic_function(tri)
        chi = vertex_monomial_exponents(tri)

    with _stage("intersection", timings):
        integrand = scenario.integrand()
        table = generating_function(variety, integrand, order,
                                    generators=gens, cone=cone, jobs=jobs)
        intersection_series = table.series(names=_mori_names(len(gens)),
                                           order=order)

    with _stage("residue", timings):
        sources = []
        series_list = []
        if scenario.expected_residue is not None:
            sources.append("fixture")
            series_list.append(_fixture_series(scenario, chi, gens, order))
        if scenario.weights is not None:
            sources.append("weights-closed-form")
            series_list.append(_weights_series(scenario, gens, order))
        if scenario.product_dims is not None:
            sources.append("product-closed-form")
            series_list.append(_product_series(scenario, gens, order))
        if not series_list:
            if len(gens) == 1:
                sources.append("curve-reconstruction")
                series_list.append(_curve_series(
                    scenario, polytope, variety, cert, gens, order))
            else:
                raise InputError(
                    "no residue route: provide expected_residue, weights, "
                    "or product_dims (reconstruction needs rank 1)")
        for other in series_list[1:]:
            if other != series_list[0]:
                raise GeometryError(
                    f"residue sources disagree: {sources}")
        residue_series = series_list[0]

    with _stage("compare", timings):
        rows = []
        all_match = True
        exponents = set(residue_series.terms)
        beta_of = {}
        for beta in table.entries:
            lam = table.generator_exponents(beta)
            beta_of[lam] = beta
            exponents.add(lam)
        for lam in sorted(exponents, key=lambda e: (sum(e), e)):
            left = intersection_series.coefficient(lam)
            right = residue_series.coefficient(lam)
            match = left == right
            all_match = all_match and match
            beta = beta_of.get(lam, tuple(
                sum(lam[i] * gens[i][j] for i in range(len(gens)))
                for j in range(scenario.n_points)))
            rows.append({
                "exponents": list(lam),
                "beta": list(beta),
                "intersection": format_rational(left),
                "residue": format_rational(right),
                "match": match,
            })

    certificates = {
        "coherence_lift": {str(i): format_rational(v)
                           for i, v in sorted(cert.lift.items())},
        "secondary_vertex": {
            "chi": [secondary.chi[i]
                    for i in range(len(polytope.points))],
            "gkz_coefficient": secondary.gkz_coefficient,
        },
    }
    return Report(scenario.raw, scenario.name,
                  "pass" if all_match else "fail", order,
                  [list(g) for g in gens], sources, rows, certificates,
                  warnings, timings)
