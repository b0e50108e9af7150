"""Exact toric residues of Laurent polynomials supported on a reflexive
polytope, plus the closed forms available for weighted projective spaces
and products of projective spaces.

The residue functional on the top graded piece is computed by linear
algebra: it is the unique (up to scale) covector annihilating the span
of F_i times the degree-(d-1) monomials, normalized so the reduced
Hessian maps to the normalized volume.  Degeneracy of the coefficients
is detected, not assumed: a kernel of the wrong dimension or a Hessian
inside the span raises instead of returning garbage.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import factorial, lcm

from . import linalg
from .errors import DegenerateError, GeometryError, InputError, \
    ReconstructionError
from .multipoly import MultiPoly, RationalFunctionMV, TruncatedSeries, \
    rational_reconstruct
from .polytopes import simplex_volume


@dataclass
class ResidueInput:
    """A reflexive support polytope, its ordered nonzero support points,
    and rational coefficients a defining f(t) = 1 - sum a_i t^{v_i}."""

    polytope: object
    support: tuple
    coefficients: tuple

    def __post_init__(self):
        self.support = tuple(tuple(int(x) for x in v) for v in self.support)
        self.coefficients = tuple(Fraction(c) for c in self.coefficients)
        if len(self.support) != len(self.coefficients):
            raise InputError("one coefficient per support point")
        if not self.polytope.is_reflexive():
            raise GeometryError("support polytope must be reflexive")
        zero = (0,) * self.polytope.dim
        for v in self.support:
            if v == zero:
                raise InputError("support points must be nonzero")
            if not self.polytope.contains(v):
                raise GeometryError(f"support point {v} outside polytope")

    @property
    def dim(self):
        return self.polytope.dim


def graded_basis(polytope, k):
    """Monomial basis of the k-th graded piece: lattice points of k times
    the polytope, in a fixed lexicographic order."""
    return tuple(polytope.dilate_points(k))


def _laurent_add(target, exps, coeff):
    s = target.get(exps, Fraction(0)) + coeff
    if s == 0:
        target.pop(exps, None)
    else:
        target[exps] = s


def _laurent_mul(a, b):
    out = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            _laurent_add(out, tuple(x + y for x, y in zip(e1, e2)), c1 * c2)
    return out


def _f_and_derivatives(inp):
    """f and its logarithmic derivatives f_i = t_i df/dt_i as Laurent
    coefficient dictionaries."""
    d = inp.dim
    zero = (0,) * d
    f = {zero: Fraction(1)}
    for v, a in zip(inp.support, inp.coefficients):
        _laurent_add(f, v, -a)
    logs = []
    for i in range(d):
        fi = {}
        for v, a in zip(inp.support, inp.coefficients):
            if v[i] != 0:
                _laurent_add(fi, v, -a * v[i])
        logs.append(fi)
    return f, logs


def _laurent_det(matrix):
    """Determinant of a small matrix of Laurent dictionaries, by dynamic
    programming over used-column subsets."""
    n = len(matrix)
    dim = None
    for row in matrix:
        for poly in row:
            for exps in poly:
                dim = len(exps)
                break
            if dim is not None:
                break
        if dim is not None:
            break
    if dim is None:
        raise DegenerateError("determinant of identically zero matrix")
    states = {frozenset(): {(0,) * dim: Fraction(1)}}
    for r in range(n):
        new_states = {}
        for used, poly in states.items():
            for c in range(n):
                if c in used:
                    continue
                entry = matrix[r][c]
                if not entry:
                    continue
                sign = -1 if sum(1 for u in used if u > c) % 2 else 1
                prod = _laurent_mul(poly, entry)
                key = used | {c}
                bucket = new_states.setdefault(key, {})
                for e, coeff in prod.items():
                    _laurent_add(bucket, e, sign * coeff)
        states = new_states
    full = frozenset(range(n))
    return states.get(full, {})


def hessian(inp):
    """Reduced Hessian as a coefficient dictionary over the degree-d
    graded piece.

    Computed twice: as the (d+1) x (d+1) log-derivative determinant and
    as the volume-squared expansion over all (d+1)-subsets of the
    support (origin included).  Disagreement is a hard error.
    """
    d = inp.dim
    f, logs = _f_and_derivatives(inp)

    matrix = [[f] + logs]
    for i in range(d):
        row = [logs[i]]
        for j in range(d):
            entry = {}
            for v, a in zip(inp.support, inp.coefficients):
                if v[j] != 0 and v[i] != 0:
                    _laurent_add(entry, v, -a * v[j] * v[i])
            row.append(entry)
        matrix.append(row)
    det = _laurent_det(matrix)

    expansion = {}
    zero = (0,) * d
    points = [zero] + list(inp.support)
    coeffs = [None] + list(inp.coefficients)
    for subset in combinations(range(len(points)), d + 1):
        vol = simplex_volume([points[i] for i in subset])
        if vol == 0:
            continue
        exps = zero
        coeff = Fraction(vol * vol)
        for i in subset:
            if i == 0:
                continue
            exps = tuple(x + y for x, y in zip(exps, points[i]))
            coeff *= -coeffs[i]
        _laurent_add(expansion, exps, coeff)

    if det != expansion:
        raise GeometryError(
            "Hessian determinant and volume expansion disagree")
    for exps in det:
        if not inp.polytope.contains(exps, dilation=d):
            raise GeometryError(
                f"Hessian support point {exps} escapes the degree-d piece")
    return det


class ResidueFunctional:
    """The residue functional on the top graded piece for one coefficient
    vector, reusable across integrand polynomials."""

    def __init__(self, inp):
        self.input = inp
        d = inp.dim
        self.basis_top = graded_basis(inp.polytope, d)
        self.basis_lower = graded_basis(inp.polytope, d - 1)
        index = {p: i for i, p in enumerate(self.basis_top)}
        f, logs = _f_and_derivatives(inp)
        rows = []
        for poly in [f] + logs:
            for m in self.basis_lower:
                row = [Fraction(0)] * len(self.basis_top)
                for exps, coeff in poly.items():
                    target = tuple(x + y for x, y in zip(exps, m))
                    row[index[target]] += coeff
                rows.append(row)
        kernel = linalg.nullspace(rows, ncols=len(self.basis_top))
        if len(kernel) != 1:
            raise DegenerateError(
                "degenerate coefficients: residue functional is not "
                f"unique (kernel dimension {len(kernel)})")
        psi = list(kernel[0])
        hvec = [Fraction(0)] * len(self.basis_top)
        for exps, coeff in hessian(inp).items():
            hvec[index[exps]] += coeff
        volume = inp.polytope.normalized_volume()
        pairing = linalg.dot(psi, hvec)
        if pairing == 0:
            raise DegenerateError(
                "degenerate coefficients: Hessian lies in the ideal")
        scale = Fraction(volume) / pairing
        self.psi = [x * scale for x in psi]
        self.index = index
        self.volume = volume

    def residue_of_element(self, element):
        """Unsigned residue of a degree-d element given as a coefficient
        dictionary over lattice points of d times the polytope."""
        total = Fraction(0)
        for exps, coeff in element.items():
            if coeff == 0:
                continue
            i = self.index.get(tuple(exps))
            if i is None:
                raise InputError(f"element support {tuple(exps)} outside "
                                 "the degree-d graded piece")
            total += coeff * self.psi[i]
        return total

    def element_from_poly(self, poly):
        """Expand t_0^d P(a_1 t^{v_1}, ..., a_n t^{v_n})."""
        inp = self.input
        n = len(inp.support)
        if len(poly.variables) != n:
            raise InputError("polynomial needs one variable per support "
                             "point")
        if not poly.is_homogeneous(inp.dim):
            raise InputError(
                f"polynomial is not homogeneous of degree {inp.dim}")
        element = {}
        for exps, coeff in poly.terms.items():
            point = (0,) * inp.dim
            value = coeff
            for e, v, a in zip(exps, inp.support, inp.coefficients):
                if e < 0:
                    raise InputError("negative exponent in integrand")
                if e:
                    point = tuple(x + e * y for x, y in zip(point, v))
                    value *= a ** e
            _laurent_add(element, point, value)
        return element

    def eval_poly(self, poly):
        """Signed residue (-1)^d Res_f(t_0^d P(a t^v)) of a degree-d
        polynomial in the support coefficients."""
        element = self.element_from_poly(poly)
        sign = -1 if self.input.dim % 2 else 1
        return sign * self.residue_of_element(element)


def residue_eval(inp, poly):
    """One-shot signed residue evaluation (builds the functional)."""
    return ResidueFunctional(inp).eval_poly(poly)


# ---------------------------------------------------------------------------
# One-parameter families and reconstruction


@dataclass
class CurveSpec:
    """Substitution a_i = c_i u^{phi_i} along a strictly convex lift."""

    coefficients: tuple
    exponents: tuple

    def __post_init__(self):
        self.coefficients = tuple(Fraction(c) for c in self.coefficients)
        if any(c <= 0 for c in self.coefficients):
            raise InputError("curve coefficients must be positive")
        mult = lcm(*[Fraction(e).denominator for e in self.exponents])
        self.exponents = tuple(int(Fraction(e) * mult)
                               for e in self.exponents)
        if any(e <= 0 for e in self.exponents):
            raise InputError("curve exponents must be positive")


def _primes_above(start):
    n = start
    while True:
        n += 1
        if all(n % p for p in range(2, int(n ** 0.5) + 1)):
            yield n


def residue_curve(polytope, support, spec, poly, sample_budget=48,
                  initial_degree=2, expected_limit=None):
    """Reconstruct the residue as a univariate rational function along
    the one-parameter family a_i(u) = c_i u^{phi_i}.

    Samples at u = 1/q for primes q > 10, skipping degenerate
    coefficient vectors; escalates the reconstruction degree bound by
    doubling.  The result must be regular at u = 0, and when
    ``expected_limit`` is given the value there is checked against it.
    """
    samples = []
    prime_iter = _primes_above(10)
    attempts = 0

    def ensure(count):
        nonlocal attempts
        while len(samples) < count:
            if attempts >= sample_budget:
                raise ReconstructionError(
                    f"sample budget {sample_budget} exhausted")
            q = next(prime_iter)
            attempts += 1
            u = Fraction(1, q)
            coeffs = [c * u ** e
                      for c, e in zip(spec.coefficients, spec.exponents)]
            try:
                functional = ResidueFunctional(
                    ResidueInput(polytope, support, coeffs))
            except DegenerateError:
                continue
            samples.append((u, functional.eval_poly(poly)))

    bound = max(1, initial_degree)
    while True:
        try:
            ensure(2 * bound + 2 + 3)
        except ReconstructionError:
            raise
        try:
            result = rational_reconstruct(samples, bound, max_degree=bound)
        except ReconstructionError:
            bound *= 2
            if 2 * bound + 5 > sample_budget:
                raise
            continue
        break
    for u, val in samples:
        if result.eval_at(u) != val:
            raise ReconstructionError("reconstruction fails on a sample")
    if not result.regular_at_zero():
        raise DegenerateError("reconstructed residue has a pole at zero")
    if expected_limit is not None and result.value_at_zero() \
            != Fraction(expected_limit):
        raise GeometryError(
            f"value at zero {result.value_at_zero()} differs from the "
            f"expected intersection number {expected_limit}")
    return result


# ---------------------------------------------------------------------------
# Closed forms


def weighted_projective_residue(weights, poly):
    """Closed-form residue for a weighted projective space.

    Valid when gcd(w) = 1 and every weight divides their sum; the result
    is a one-variable rational function in y = prod a_i^{w_i}.
    """
    w = [int(x) for x in weights]
    n = len(w)
    from math import gcd
    g = 0
    for x in w:
        g = gcd(g, x)
    if g != 1:
        raise InputError("weights must have gcd 1")
    total = sum(w)
    if any(total % x for x in w):
        raise InputError("every weight must divide the weight sum")
    if len(poly.variables) != n:
        raise InputError("polynomial needs one variable per weight")
    if not poly.is_homogeneous(n - 1):
        raise InputError(f"polynomial must be homogeneous of degree {n - 1}")
    prod_w = 1
    prod_ww = 1
    for x in w:
        prod_w *= x
        prod_ww *= x ** x
    nu = Fraction(1, prod_w)
    mu = Fraction(total ** total, prod_ww)
    value = poly.eval_at([Fraction(x) for x in w])
    variables = ("y",)
    num = MultiPoly.constant(variables, nu * value)
    den = MultiPoly(variables, {(0,): Fraction(1), (1,): -mu})
    return RationalFunctionMV(num, den)


def weighted_projective_series(weights, poly, bound):
    """Geometric series expansion of the weighted projective residue."""
    rf = weighted_projective_residue(weights, poly)
    c = rf.numerator.terms.get((0,), Fraction(0))
    mu = -rf.denominator.terms.get((1,), Fraction(0))
    terms = {(b,): c * mu ** b for b in range(bound + 1)}
    return TruncatedSeries(("y",), bound, terms)


def _inv_factorial(m):
    return Fraction(0) if m < 0 else Fraction(1, factorial(m))


def product_series(dims, k, bound):
    """Intersection-number series for a product of projective spaces.

    ``k`` gives the per-factor degrees of the integrand monomial.  Degree
    sum(dims) is the plain factorial sum; degree sum(dims)-1 is the
    anticanonical-paired variant used for the cohomology pairings of
    hypersurfaces, obtained by distributing one extra linear factor.
    Negative factorial arguments contribute zero.
    """
    dims = [int(x) for x in dims]
    k = [int(x) for x in k]
    if len(dims) != len(k):
        raise InputError("one degree per factor")
    d = sum(dims)
    r = len(dims)
    n = [x + 1 for x in dims]
    variables = tuple(f"u{j + 1}" for j in range(r))
    if sum(k) == d - 1:
        total = TruncatedSeries(variables, bound)
        for j in range(r):
            bumped = list(k)
            bumped[j] += 1
            total = total + product_series(dims, bumped, bound).scale(n[j])
        return total
    if sum(k) != d:
        raise InputError("factor degrees must sum to the dimension or one "
                         "less")
    prefactor = Fraction(1)
    for j in range(r):
        prefactor *= Fraction(n[j]) ** (dims[j] - k[j])

    terms = {}

    def rec(j, prefix):
        if j == r:
            m = sum(n[i] * prefix[i] for i in range(r))
            coeff = Fraction(factorial(m))
            for i in range(r):
                coeff *= _inv_factorial(n[i] * prefix[i] + dims[i] - k[i])
            if coeff != 0:
                terms[tuple(prefix)] = prefactor * coeff
            return
        for b in range(bound - sum(prefix) + 1):
            rec(j + 1, prefix + [b])

    rec(0, [])
    return TruncatedSeries(variables, bound, terms)


def anticanonical_pairing_poly(q_poly):
    """P = (x_1 + ... + x_n) Q, the degree-d integrand attached to a
    degree-(d-1) polynomial Q."""
    n = len(q_poly.variables)
    total = MultiPoly(q_poly.variables, {
        tuple(1 if i == j else 0 for i in range(n)): Fraction(1)
        for j in range(n)})
    return total * q_poly


def yukawa_eval(inp, q_poly):
    """Signed residue of (sum x_i) Q at one coefficient vector."""
    return residue_eval(inp, anticanonical_pairing_poly(q_poly))


def yukawa_curve(polytope, support, spec, q_poly, **kwargs):
    return residue_curve(polytope, support, spec,
                         anticanonical_pairing_poly(q_poly), **kwargs)


def yukawa_weighted_closed_form(weights, q_poly):
    return weighted_projective_residue(
        weights, anticanonical_pairing_poly(q_poly))
