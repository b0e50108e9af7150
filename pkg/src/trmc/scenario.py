"""Scenario files: the JSON input format of the verifier.

Schema (all rationals are strings like "p/q" or "p"):

    {
      "name": str,
      "lattice_dim": int,
      "points": [[int, ...], ...],          # nonzero support points
      "triangulation": [[int, ...], ...],   # 1-based point indices,
                                            # the origin apex is implicit
      "polynomial": {"mode": "P" | "yukawa",
                     "terms": [{"coeff": "p/q",
                                "exponents": [int, ...]}, ...]},
      "order": int,
      "mori_generators": [[int, ...], ...]? ,
      "expected_residue": {"variables": "a" | "mori",
                           "numerator": terms,
                           "denominator": terms}? ,
      "weights": [int, ...]? ,
      "product_dims": [int, ...]?
    }

Exponent vectors of the polynomial and of "a"-variable residues have one
entry per point; "mori"-variable residues have one entry per generator.
"""

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .errors import InputError
from .multipoly import MultiPoly, RationalFunctionMV
from .polytopes import LatticePolytope, Triangulation


def parse_rational(text, where):
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{where}: not a rational number: {text!r}") \
            from exc


def format_rational(value):
    f = Fraction(value)
    return str(f.numerator) if f.denominator == 1 else \
        f"{f.numerator}/{f.denominator}"


def _expect(cond, message):
    if not cond:
        raise InputError(message)


def _int_vector(obj, length, where):
    _expect(isinstance(obj, list), f"{where}: expected a list")
    if length is not None:
        _expect(len(obj) == length,
                f"{where}: expected length {length}, got {len(obj)}")
    out = []
    for k, x in enumerate(obj):
        _expect(isinstance(x, int) and not isinstance(x, bool),
                f"{where}[{k}]: expected an integer")
        out.append(x)
    return tuple(out)


def _parse_terms(obj, nvars, where):
    _expect(isinstance(obj, list) and obj, f"{where}: expected a nonempty "
            "list of terms")
    terms = {}
    for k, term in enumerate(obj):
        _expect(isinstance(term, dict), f"{where}[{k}]: expected an object")
        _expect("coeff" in term and "exponents" in term,
                f"{where}[{k}]: needs 'coeff' and 'exponents'")
        coeff = parse_rational(term["coeff"], f"{where}[{k}].coeff")
        exps = _int_vector(term["exponents"], nvars,
                           f"{where}[{k}].exponents")
        terms[exps] = terms.get(exps, Fraction(0)) + coeff
    return terms


@dataclass
class Scenario:
    name: str
    lattice_dim: int
    points: tuple
    triangulation: tuple        # 0-based indices incl. apex 0
    polynomial_mode: str
    polynomial_terms: dict      # exponents (len n) -> Fraction
    order: int
    mori_generators: tuple = None
    expected_residue: tuple = None   # (kind, num terms, den terms)
    weights: tuple = None
    product_dims: tuple = None
    raw: dict = None

    @property
    def n_points(self):
        return len(self.points)

    def variable_names(self):
        return tuple(f"x{i + 1}" for i in range(self.n_points))

    def base_polytope(self):
        origin = (0,) * self.lattice_dim
        return LatticePolytope((origin,) + self.points)

    def triangulation_obj(self, polytope=None):
        poly = polytope if polytope is not None else self.base_polytope()
        return Triangulation(poly, self.triangulation)

    def input_poly(self):
        """The raw polynomial from the file (P itself, or Q for yukawa)."""
        return MultiPoly(self.variable_names(), self.polynomial_terms)

    def integrand(self):
        """Degree-d integrand: P, or (x_1+...+x_n) Q in yukawa mode."""
        poly = self.input_poly()
        if self.polynomial_mode == "yukawa":
            from .residues import anticanonical_pairing_poly
            return anticanonical_pairing_poly(poly)
        return poly

    def residue_fixture(self, mori_names=None):
        """The expected residue as a rational function, or None."""
        if self.expected_residue is None:
            return None
        kind, num_terms, den_terms = self.expected_residue
        if kind == "a":
            names = tuple(f"a{i + 1}" for i in range(self.n_points))
        else:
            r = len(self.mori_generators)
            names = tuple(mori_names) if mori_names else tuple(
                f"y{k + 1}" for k in range(r))
        return kind, RationalFunctionMV(MultiPoly(names, num_terms),
                                        MultiPoly(names, den_terms))


def scenario_from_dict(data, origin="<dict>"):
    _expect(isinstance(data, dict), f"{origin}: expected a JSON object")
    known = {"name", "lattice_dim", "points", "triangulation", "polynomial",
             "order", "mori_generators", "expected_residue", "weights",
             "product_dims"}
    for key in data:
        _expect(key in known, f"{origin}: unknown key {key!r}")
    for key in ("name", "lattice_dim", "points", "triangulation",
                "polynomial", "order"):
        _expect(key in data, f"{origin}: missing key {key!r}")

    name = data["name"]
    _expect(isinstance(name, str) and name, "name: expected a nonempty "
            "string")
    dim = data["lattice_dim"]
    _expect(isinstance(dim, int) and dim >= 1, "lattice_dim: expected a "
            "positive integer")

    _expect(isinstance(data["points"], list) and data["points"],
            "points: expected a nonempty list")
    points = []
    for k, p in enumerate(data["points"]):
        vec = _int_vector(p, dim, f"points[{k}]")
        _expect(any(x != 0 for x in vec), f"points[{k}]: the origin is "
                "implicit and must not be listed")
        points.append(vec)
    _expect(len(set(points)) == len(points), "points: duplicates found")
    n = len(points)

    _expect(isinstance(data["triangulation"], list) and
            data["triangulation"], "triangulation: expected a nonempty "
            "list")
    simplices = []
    for k, s in enumerate(data["triangulation"]):
        idx = _int_vector(s, None, f"triangulation[{k}]")
        for j, i in enumerate(idx):
            _expect(1 <= i <= n, f"triangulation[{k}][{j}]: index {i} out "
                    f"of range 1..{n}")
        _expect(len(set(idx)) == len(idx),
                f"triangulation[{k}]: repeated index")
        simplices.append((0,) + tuple(i for i in idx))

    polyspec = data["polynomial"]
    _expect(isinstance(polyspec, dict), "polynomial: expected an object")
    mode = polyspec.get("mode")
    _expect(mode in ("P", "yukawa"), "polynomial.mode: expected 'P' or "
            "'yukawa'")
    terms = _parse_terms(polyspec.get("terms"), n, "polynomial.terms")
    for exps in terms:
        _expect(all(e >= 0 for e in exps),
                "polynomial.terms: exponents must be nonnegative")
    degrees = {sum(e) for e in terms}
    expected_degree = dim - 1 if mode == "yukawa" else dim
    _expect(degrees == {expected_degree},
            f"polynomial.terms: must be homogeneous of degree "
            f"{expected_degree} (mode {mode})")

    order = data["order"]
    _expect(isinstance(order, int) and order >= 0,
            "order: expected a nonnegative integer")

    gens = None
    if "mori_generators" in data:
        _expect(isinstance(data["mori_generators"], list) and
                data["mori_generators"], "mori_generators: expected a "
                "nonempty list")
        gens = tuple(_int_vector(g, n, f"mori_generators[{k}]")
                     for k, g in enumerate(data["mori_generators"]))

    expected = None
    if "expected_residue" in data:
        spec = data["expected_residue"]
        _expect(isinstance(spec, dict), "expected_residue: expected an "
                "object")
        kind = spec.get("variables")
        _expect(kind in ("a", "mori"), "expected_residue.variables: "
                "expected 'a' or 'mori'")
        if kind == "a":
            width = n
        else:
            _expect(gens is not None, "expected_residue in mori variables "
                    "requires mori_generators")
            width = len(gens)
        num = _parse_terms(spec.get("numerator"), width,
                           "expected_residue.numerator")
        den = _parse_terms(spec.get("denominator"), width,
                           "expected_residue.denominator")
        expected = (kind, num, den)

    weights = None
    if "weights" in data:
        weights = _int_vector(data["weights"], n, "weights")
        _expect(all(w >= 1 for w in weights), "weights: expected positive "
                "integers")

    product_dims = None
    if "product_dims" in data:
        product_dims = _int_vector(data["product_dims"], None,
                                   "product_dims")
        _expect(all(x >= 1 for x in product_dims), "product_dims: expected "
                "positive integers")
        _expect(sum(product_dims) == dim, "product_dims: must sum to "
                "lattice_dim")
        _expect(sum(x + 1 for x in product_dims) == n,
                "product_dims: factor ray counts must sum to the number "
                "of points")

    return Scenario(name, dim, tuple(points), tuple(simplices), mode,
                    terms, order, gens, expected, weights, product_dims,
                    raw=data)


def load_scenario(path):
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc
    return scenario_from_dict(data, origin=str(path))


def fixture_path(name):
    """Path to a scenario file shipped with the package."""
    return resources.files("trmc").joinpath("fixtures").joinpath(name)


def list_fixtures():
    folder = resources.files("trmc").joinpath("fixtures")
    return sorted(p.name for p in folder.iterdir()
                  if p.name.endswith(".json"))


def load_fixture(name):
    with resources.as_file(fixture_path(name)) as path:
        return load_scenario(path)
