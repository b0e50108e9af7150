"""Sparse multivariate polynomials, truncated power series and rational
functions over exact rationals.

Exponent vectors are plain integer tuples (Laurent exponents allowed for
polynomials, nonnegative only for series).  Term maps never store zero
coefficients and iterate in graded-lexicographic order so printed output
and downstream tie-breaking are reproducible.
"""

from fractions import Fraction
from math import lcm

from . import linalg
from .errors import DegenerateError, InputError, ReconstructionError


def _grlex_key(exps):
    return (sum(exps), exps)


class MultiPoly:
    """Sparse polynomial keyed by exponent vector."""

    __slots__ = ("variables", "terms")

    def __init__(self, variables, terms=None):
        self.variables = tuple(variables)
        clean = {}
        for exps, coeff in (terms or {}).items():
            c = Fraction(coeff)
            if c != 0:
                clean[tuple(int(e) for e in exps)] = c
        self.terms = clean

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, variables):
        return cls(variables, {})

    @classmethod
    def constant(cls, variables, value):
        n = len(tuple(variables))
        return cls(variables, {(0,) * n: Fraction(value)})

    @classmethod
    def monomial(cls, variables, exps, coeff=1):
        return cls(variables, {tuple(exps): Fraction(coeff)})

    @classmethod
    def variable(cls, variables, index):
        n = len(tuple(variables))
        exps = tuple(1 if i == index else 0 for i in range(n))
        return cls(variables, {exps: Fraction(1)})

    # -- basics -------------------------------------------------------
    def _check_compatible(self, other):
        if self.variables != other.variables:
            raise InputError(
                f"variable mismatch: {self.variables} vs {other.variables}")

    def is_zero(self):
        return not self.terms

    def items_sorted(self):
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]))

    def total_degree(self):
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self, degree=None):
        degs = {sum(e) for e in self.terms}
        if not degs:
            return True
        if len(degs) > 1:
            return False
        return degree is None or degs.pop() == degree

    def __eq__(self, other):
        return (isinstance(other, MultiPoly)
                and self.variables == other.variables
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.variables, frozenset(self.terms.items())))

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        self._check_compatible(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e, Fraction(0)) + c
            if s == 0:
                terms.pop(e, None)
            else:
                terms[e] = s
        return MultiPoly(self.variables, terms)

    def __neg__(self):
        return MultiPoly(self.variables,
                         {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check_compatible(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(e, Fraction(0)) + c1 * c2
                if s == 0:
                    terms.pop(e, None)
                else:
                    terms[e] = s
        return MultiPoly(self.variables, terms)

    __rmul__ = __mul__

    def scale(self, scalar):
        s = Fraction(scalar)
        if s == 0:
            return MultiPoly.zero(self.variables)
        return MultiPoly(self.variables,
                         {e: c * s for e, c in self.terms.items()})

    def __pow__(self, k):
        if k < 0:
            raise InputError("negative polynomial power")
        result = MultiPoly.constant(self.variables, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def eval_at(self, point):
        """Evaluate at a tuple of rationals (Laurent exponents need the
        corresponding coordinate to be nonzero)."""
        if len(point) != len(self.variables):
            raise InputError("point length does not match variable count")
        vals = [Fraction(x) for x in point]
        total = Fraction(0)
        for exps, coeff in self.terms.items():
            term = coeff
            for x, e in zip(vals, exps):
                if e == 0:
                    continue
                if x == 0 and e < 0:
                    raise DegenerateError(
                        "Laurent evaluation at zero for a negative exponent")
                term *= x ** e
            total += term
        return total

    def compose_linear(self, forms):
        """Substitute variable i by the polynomial forms[i]."""
        if len(forms) != len(self.variables):
            raise InputError("one substitution polynomial per variable")
        target_vars = forms[0].variables if forms else ()
        out = MultiPoly.zero(target_vars)
        cache = {}
        for exps, coeff in self.items_sorted():
            term = MultiPoly.constant(target_vars, coeff)
            for i, e in enumerate(exps):
                if e == 0:
                    continue
                if e < 0:
                    raise InputError("cannot substitute into Laurent exponent")
                key = (i, e)
                if key not in cache:
                    cache[key] = forms[i] ** e
                term = term * cache[key]
            out = out + term
        return out

    def min_exponents(self):
        """Componentwise minimum of exponent vectors (zero poly -> zeros)."""
        n = len(self.variables)
        if not self.terms:
            return (0,) * n
        mins = [None] * n
        for e in self.terms:
            for i, x in enumerate(e):
                mins[i] = x if mins[i] is None else min(mins[i], x)
        return tuple(mins)

    def shift(self, offset):
        """Multiply by the monomial with exponent vector ``offset``."""
        return MultiPoly(self.variables, {
            tuple(a + b for a, b in zip(e, offset)): c
            for e, c in self.terms.items()})

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps, coeff in self.items_sorted():
            factors = []
            for name, e in zip(self.variables, exps):
                if e == 1:
                    factors.append(name)
                elif e != 0:
                    factors.append(f"{name}^{e}")
            body = "*".join(factors)
            if not body:
                parts.append(str(coeff))
            elif coeff == 1:
                parts.append(body)
            elif coeff == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{coeff}*{body}")
        out = " + ".join(parts)
        return out.replace("+ -", "- ")

    __repr__ = __str__


class RationalFunctionMV:
    """Quotient of two multivariate polynomials over a shared variable list."""

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator, denominator):
        if numerator.variables != denominator.variables:
            raise InputError("numerator/denominator variable mismatch")
        if denominator.is_zero():
            raise DegenerateError("zero denominator")
        self.numerator = numerator
        self.denominator = denominator

    @property
    def variables(self):
        return self.numerator.variables

    def eval_at(self, point):
        den = self.denominator.eval_at(point)
        if den == 0:
            raise DegenerateError("evaluation at a pole")
        return self.numerator.eval_at(point) / den

    def clear_laurent(self):
        """Shift numerator and denominator by one common monomial so both
        have nonnegative exponents; returns the shifted function."""
        mins_n = self.numerator.min_exponents()
        mins_d = self.denominator.min_exponents()
        shift = tuple(-min(a, b, 0) for a, b in zip(mins_n, mins_d))
        if all(s == 0 for s in shift):
            return self
        return RationalFunctionMV(self.numerator.shift(shift),
                                  self.denominator.shift(shift))

    def __str__(self):
        return f"({self.numerator}) / ({self.denominator})"

    __repr__ = __str__


class TruncatedSeries:
    """Power series truncated at a total-degree bound."""

    __slots__ = ("variables", "order", "terms")

    def __init__(self, variables, order, terms=None):
        self.variables = tuple(variables)
        self.order = int(order)
        clean = {}
        for exps, coeff in (terms or {}).items():
            e = tuple(int(x) for x in exps)
            if any(x < 0 for x in e):
                raise InputError("series exponents must be nonnegative")
            if sum(e) > self.order:
                continue
            c = Fraction(coeff)
            if c != 0:
                clean[e] = c
        self.terms = clean

    @classmethod
    def from_poly(cls, poly, order):
        return cls(poly.variables, order, poly.terms)

    @classmethod
    def one(cls, variables, order):
        n = len(tuple(variables))
        return cls(variables, order, {(0,) * n: Fraction(1)})

    def coefficient(self, exps):
        return self.terms.get(tuple(exps), Fraction(0))

    def constant_term(self):
        return self.coefficient((0,) * len(self.variables))

    def items_sorted(self):
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]))

    def truncate(self, order):
        return TruncatedSeries(self.variables, order, self.terms)

    def _check(self, other):
        if self.variables != other.variables or self.order != other.order:
            raise InputError("series variable/order mismatch")

    def __add__(self, other):
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e, Fraction(0)) + c
            if s == 0:
                terms.pop(e, None)
            else:
                terms[e] = s
        return TruncatedSeries(self.variables, self.order, terms)

    def __neg__(self):
        return TruncatedSeries(self.variables, self.order,
                               {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, scalar):
        s = Fraction(scalar)
        return TruncatedSeries(self.variables, self.order,
                               {e: c * s for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        terms = {}
        for e1, c1 in self.terms.items():
            d1 = sum(e1)
            for e2, c2 in other.terms.items():
                if d1 + sum(e2) > self.order:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(e, Fraction(0)) + c1 * c2
                if s == 0:
                    terms.pop(e, None)
                else:
                    terms[e] = s
        return TruncatedSeries(self.variables, self.order, terms)

    __rmul__ = __mul__

    def inverse(self):
        """Multiplicative inverse up to the truncation order.

        Writes the series as c·(1 - q) with q of positive valuation and
        accumulates the geometric series of q.
        """
        c = self.constant_term()
        if c == 0:
            raise DegenerateError("series with zero constant term "
                                  "has no inverse")
        zero_exp = (0,) * len(self.variables)
        q_terms = {e: -coeff / c for e, coeff in self.terms.items()
                   if e != zero_exp}
        q = TruncatedSeries(self.variables, self.order, q_terms)
        acc = TruncatedSeries.one(self.variables, self.order)
        power = TruncatedSeries.one(self.variables, self.order)
        for _ in range(self.order):
            power = power * q
            if not power.terms:
                break
            acc = acc + power
        return acc.scale(Fraction(1, 1) / c)

    def __eq__(self, other):
        return (isinstance(other, TruncatedSeries)
                and self.variables == other.variables
                and self.order == other.order
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.variables, self.order,
                     frozenset(self.terms.items())))

    def __str__(self):
        return str(MultiPoly(self.variables, self.terms)) + \
            f" + O(deg {self.order + 1})"

    __repr__ = __str__


def laurent_expand_at_vertex(ratfunc, order):
    """Series expansion of num/den assuming the relevant Newton-polytope
    vertex of the denominator sits at the constant term.

    The caller is responsible for the monomial change of variables that
    brings the chosen vertex to the origin; a vanishing constant term of
    the denominator means the wrong coordinates were used.
    """
    rf = ratfunc.clear_laurent()
    den = rf.denominator
    zero = (0,) * len(rf.variables)
    c = den.terms.get(zero, Fraction(0))
    if c == 0:
        raise DegenerateError(
            "denominator has no constant term at this vertex; "
            "wrong coordinates for the chosen expansion vertex")
    num_series = TruncatedSeries.from_poly(rf.numerator, order)
    den_series = TruncatedSeries.from_poly(den, order)
    return num_series * den_series.inverse()


def monomial_substitution(ratfunc, exponent_matrix, new_vars):
    """Rewrite a rational function in monomial coordinates.

    ``exponent_matrix`` has one row per new variable, giving its exponent
    vector in the old variables.  Every exponent vector occurring in the
    function must be an integral combination of the rows; otherwise the
    chosen coordinates do not match the function and we raise.
    """
    rows = [list(r) for r in exponent_matrix]
    n_new = len(rows)
    n_old = len(ratfunc.variables)
    if any(len(r) != n_old for r in rows):
        raise InputError("exponent matrix width must match variable count")
    cols = linalg.transpose(rows) if rows else []
    new_vars = tuple(new_vars)
    if len(new_vars) != n_new:
        raise InputError("need one name per new variable")

    def convert(poly):
        terms = {}
        for exps, coeff in poly.terms.items():
            lam = linalg.solve_integer(cols, list(exps)) if rows else None
            if lam is None:
                raise DegenerateError(
                    f"exponent {exps} is not expressible in the given "
                    "monomial lattice; wrong generators for this scenario")
            terms[tuple(lam)] = coeff
        return MultiPoly(new_vars, terms)

    return RationalFunctionMV(convert(ratfunc.numerator),
                              convert(ratfunc.denominator))


# ---------------------------------------------------------------------------
# Univariate rational functions and reconstruction


def _upoly_trim(coeffs):
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return c


def _upoly_eval(coeffs, x):
    total = Fraction(0)
    for c in reversed(coeffs):
        total = total * x + c
    return total


def _upoly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca == 0:
            continue
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return _upoly_trim(out)

def _upoly_divmod(a, b):
    a = _upoly_trim(list(a))
    b = _upoly_trim(list(b))
    if not b:
        raise ZeroDivisionError("univariate division by zero polynomial")
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    r = [Fraction(x) for x in a]
    while len(r) >= len(b) and r:
        factor = r[-1] / b[-1]
        shift = len(r) - len(b)
        q[shift] = factor
        for i, cb in enumerate(b):
            r[shift + i] -= factor * cb
        r = _upoly_trim(r)
    return _upoly_trim(q), r


def _upoly_gcd(a, b):
    a = _upoly_trim(list(a))
    b = _upoly_trim(list(b))
    while b:
        _, rem = _upoly_divmod(a, b)
        a, b = b, rem
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


class UniRationalFunction:
    """Reduced univariate rational function with a monic denominator."""

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator, denominator):
        num = _upoly_trim([Fraction(c) for c in numerator])
        den = _upoly_trim([Fraction(c) for c in denominator])
        if not den:
            raise DegenerateError("zero denominator")
        g = _upoly_gcd(num, den)
        if len(g) > 1:
            num, _ = _upoly_divmod(num, g)
            den, _ = _upoly_divmod(den, g)
        lead = den[-1]
        num = [c / lead for c in num]
        den = [c / lead for c in den]
        self.numerator = tuple(num)
        self.denominator = tuple(den)

    def eval_at(self, x):
        d = _upoly_eval(self.denominator, x)
        if d == 0:
            raise DegenerateError("evaluation at a pole")
        return _upoly_eval(self.numerator, x) / d

    def regular_at_zero(self):
        return self.denominator[0] != 0

    def value_at_zero(self):
        if not self.regular_at_zero():
            raise DegenerateError("pole at zero")
        num0 = self.numerator[0] if self.numerator else Fraction(0)
        return num0 / self.denominator[0]

    def series_coefficients(self, order):
        """Taylor coefficients c_0..c_order around zero."""
        if not self.regular_at_zero():
            raise DegenerateError("pole at zero")
        num = list(self.numerator) + [Fraction(0)] * (order + 1)
        den = self.denominator
        out = []
        for k in range(order + 1):
            c = num[k]
            for j in range(1, min(k, len(den) - 1) + 1):
                c -= den[j] * out[k - j]
            out.append(c / den[0])
        return out

    def __eq__(self, other):
        return (isinstance(other, UniRationalFunction)
                and self.numerator == other.numerator
                and self.denominator == other.denominator)

    def __str__(self):
        def fmt(coeffs):
            if not coeffs:
                return "0"
            parts = []
            for i, c in enumerate(coeffs):
                if c == 0:
                    continue
                if i == 0:
                    parts.append(str(c))
                elif i == 1:
                    parts.append(f"{c}*u" if c != 1 else "u")
                else:
                    parts.append(f"{c}*u^{i}" if c != 1 else f"u^{i}")
            return " + ".join(parts).replace("+ -", "- ")
        return f"({fmt(self.numerator)}) / ({fmt(self.denominator)})"

    __repr__ = __str__


def rational_reconstruct(samples, degree_bound, max_degree=64,
                         holdout=3):
    """Unique rational function of bounded degree through the samples.

    Sets up the homogeneous bilinear system num(u) - value·den(u) = 0,
    takes the first nullspace vector of the fraction-free elimination,
    and validates on held-out samples.  The degree bound doubles until
    validation passes or ``max_degree`` is exceeded.
    """
    samples = list(samples)
    seen = set()
    for u, _ in samples:
        if u in seen:
            raise InputError("sample points must be distinct")
        seen.add(u)
    bound = max(int(degree_bound), 0)
    while True:
        need = 2 * bound + 2
        if need + holdout > len(samples):
            raise ReconstructionError(
                f"need {need + holdout} samples for degree bound {bound}, "
                f"got {len(samples)}")
        fit, held = samples[:need], samples[need:need + holdout]
        rows = []
        for u, val in fit:
            u = Fraction(u)
            val = Fraction(val)
            row = [u ** k for k in range(bound + 1)]
            row += [-val * u ** k for k in range(bound + 1)]
            rows.append(row)
        basis = linalg.nullspace(rows, ncols=2 * bound + 2)
        candidate = None
        for vec in basis:
            num = vec[:bound + 1]
            den = vec[bound + 1:]
            if all(c == 0 for c in den):
                continue
            try:
                cand = UniRationalFunction(num, den)
            except DegenerateError:
                continue
            ok = True
            for u, val in held:
                den_val = _upoly_eval(cand.denominator, Fraction(u))
                if den_val == 0 or cand.eval_at(Fraction(u)) != Fraction(val):
                    ok = False
                    break
            # the fit samples themselves must also be honest values, not
            # accidental zeros of the denominator
            if ok:
                for u, val in fit:
                    den_val = _upoly_eval(cand.denominator, Fraction(u))
                    if den_val == 0 or cand.eval_at(Fraction(u)) != Fraction(val):
                        ok = False
                        break
            if ok:
                candidate = cand
                break
        if candidate is not None:
            return candidate
        if bound == 0:
            bound = 1
        else:
            bound *= 2
        if bound > max_degree:
            raise ReconstructionError(
                f"no rational function of degree <= {max_degree} "
                "fits the samples")
