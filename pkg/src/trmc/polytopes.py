"""Lattice polytopes, triangulations and their convexity certificates.

All geometry is exact: facets come from a combinatorial hull over integer
hyperplanes, volumes are normalized (d! times Euclidean) and therefore
integers, and coherence of a triangulation is certified by a rational
lift found with Fourier-Motzkin elimination and re-checked independently.

Dimensions up to 4 cover every scenario shipped with the package; the
hull refuses anything above 6.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

from . import linalg
from .errors import GeometryError

MAX_HULL_DIM = 6


def simplex_volume(points):
    """Normalized volume of the simplex spanned by d+1 integer points.

    Degenerate input gives 0 (used as the `volume of a flat set is zero`
    convention by the Hessian expansion).
    """
    pts = [tuple(p) for p in points]
    if not pts:
        return 0
    base = pts[0]
    edges = [[x - y for x, y in zip(p, base)] for p in pts[1:]]
    if len(edges) != len(base):
        return 0
    return abs(linalg.det_int(edges))


class LatticePolytope:
    """Full-dimensional lattice polytope given by a point set.

    ``points`` is the ambient set A (the origin, when present, is kept at
    whatever index it was given); ``vertices`` and ``facets`` are derived
    exactly.  Facets are pairs (normal, offset) with the convention
    <x, normal> >= -offset for all x in the polytope.
    """

    def __init__(self, points):
        pts = [tuple(int(x) for x in p) for p in points]
        if not pts:
            raise GeometryError("empty point set")
        dim = len(pts[0])
        if any(len(p) != dim for p in pts):
            raise GeometryError("points of mixed dimension")
        if len(set(pts)) != len(pts):
            raise GeometryError("duplicate points")
        if dim > MAX_HULL_DIM:
            raise GeometryError(
                f"dimension {dim} exceeds the exact-hull limit "
                f"{MAX_HULL_DIM}")
        base = pts[0]
        diffs = [[x - y for x, y in zip(p, base)] for p in pts[1:]]
        if linalg.rank(diffs) != dim:
            raise GeometryError("point set is not full-dimensional")
        self.dim = dim
        self.points = tuple(pts)
        self.facets = self._compute_facets()
        self.vertices = self._compute_vertices()

    def _compute_facets(self):
        pts = self.points
        d = self.dim
        facets = {}
        for subset in combinations(range(len(pts)), d):
            base = pts[subset[0]]
            diffs = [[x - y for x, y in zip(pts[i], base)]
                     for i in subset[1:]]
            if linalg.rank(diffs) != d - 1:
                continue
            kernel = linalg.integer_kernel_basis(diffs) if diffs else \
                [tuple(1 if i == 0 else 0 for i in range(d))]
            if len(kernel) != 1:
                continue
            normal = linalg.primitive_vector(kernel[0])
            val0 = linalg.dot(base, normal)
            vals = [linalg.dot(p, normal) for p in pts]
            if all(v >= val0 for v in vals):
                facets[(normal, -val0)] = True
            elif all(v <= val0 for v in vals):
                neg = tuple(-x for x in normal)
                facets[(neg, val0)] = True
        if not facets:
            raise GeometryError("no facets found (degenerate input)")
        return tuple(sorted(facets))

    def _compute_vertices(self):
        verts = []
        for i, p in enumerate(self.points):
            tight = [normal for normal, offset in self.facets
                     if linalg.dot(p, normal) == -offset]
            if len(tight) >= self.dim and linalg.rank(
                    [list(n) for n in tight]) == self.dim:
                verts.append(i)
        return tuple(verts)

    # -- membership ----------------------------------------------------
    def contains(self, point, dilation=1):
        return all(linalg.dot(point, normal) >= -dilation * offset
                   for normal, offset in self.facets)

    def contains_interior(self, point, dilation=1):
        return all(linalg.dot(point, normal) > -dilation * offset
                   for normal, offset in self.facets)

    def origin_index(self):
        zero = (0,) * self.dim
        try:
            return self.points.index(zero)
        except ValueError:
            return None

    # -- operations ----------------------------------------------------
    def dilate_points(self, k):
        """All lattice points of k times the polytope, sorted lex."""
        if k < 0:
            raise GeometryError("negative dilation")
        if k == 0:
            return [(0,) * self.dim]
        los = [k * min(p[i] for p in self.points) for i in range(self.dim)]
        his = [k * max(p[i] for p in self.points) for i in range(self.dim)]
        found = []
        for pt in product(*[range(lo, hi + 1)
                            for lo, hi in zip(los, his)]):
            if self.contains(pt, dilation=k):
                found.append(pt)
        return sorted(found)

    def is_reflexive(self):
        zero = (0,) * self.dim
        if not self.contains_interior(zero):
            return False
        return all(offset == 1 for _, offset in self.facets)

    def polar_dual(self):
        """Dual polytope; defined (as a lattice polytope) for reflexive
        input only."""
        if not self.is_reflexive():
            raise GeometryError("polar dual requested for a non-reflexive "
                                "polytope")
        normals = [normal for normal, _ in self.facets]
        return LatticePolytope(normals)

    def normalized_volume(self):
        """d! times the Euclidean volume, by pyramid decomposition over
        the first vertex (recursing into facet lattices)."""
        return _normalized_volume_rec(
            [self.points[i] for i in self.vertices], self.dim,
            self.facets)


def _normalized_volume_rec(vertex_points, dim, facets):
    if dim == 0:
        return 1
    if dim == 1:
        coords = [p[0] for p in vertex_points]
        return max(coords) - min(coords)
    apex = vertex_points[0]
    total = 0
    for normal, offset in facets:
        height = linalg.dot(apex, normal) + offset
        if height == 0:
            continue
        on_facet = [p for p in vertex_points
                    if linalg.dot(p, normal) == -offset]
        # coordinates of the facet in its own (d-1)-lattice
        basis = linalg.integer_kernel_basis([list(normal)])
        cols = linalg.transpose([list(b) for b in basis])
        base_pt = on_facet[0]
        rel = []
        for p in on_facet:
            diff = [x - y for x, y in zip(p, base_pt)]
            coords = linalg.solve_integer(cols, diff)
            if coords is None:
                raise GeometryError("facet point outside facet lattice")
            rel.append(coords)
        sub = _facet_polytope_volume(rel, dim - 1)
        total += height * sub
    return total


def _facet_polytope_volume(points, dim):
    pts = [tuple(p) for p in points]
    base = pts[0]
    diffs = [[x - y for x, y in zip(p, base)] for p in pts[1:]]
    if linalg.rank(diffs) < dim:
        return 0
    if dim == 1:
        coords = [p[0] for p in pts]
        return max(coords) - min(coords)
    poly = LatticePolytope(pts)
    return _normalized_volume_rec([poly.points[i] for i in poly.vertices],
                                  dim, poly.facets)


@dataclass(frozen=True)
class Simplex:
    """d+1 point indices into the ambient set, affinely independent."""

    indices: tuple

    def volume(self, base):
        return simplex_volume([base.points[i] for i in self.indices])

    def facet_description(self, base):
        return LatticePolytope([base.points[i] for i in self.indices]).facets


class Triangulation:
    """List of top-dimensional simplices over a base polytope's point set."""

    def __init__(self, base, simplices):
        self.base = base
        cleaned = []
        for s in simplices:
            idx = tuple(sorted(int(i) for i in s))
            if len(idx) != base.dim + 1:
                raise GeometryError(
                    f"simplex {idx} does not have {base.dim + 1} vertices")
            if any(i < 0 or i >= len(base.points) for i in idx):
                raise GeometryError(f"simplex {idx} references an unknown "
                                    "point index")
            cleaned.append(Simplex(idx))
        if not cleaned:
            raise GeometryError("empty triangulation")
        self.simplices = tuple(cleaned)

    def is_star(self):
        origin = self.base.origin_index()
        return origin is not None and all(
            origin in s.indices for s in self.simplices)

    def used_indices(self):
        used = set()
        for s in self.simplices:
            used.update(s.indices)
        return used

    def volumes(self):
        return [s.volume(self.base) for s in self.simplices]


@dataclass
class ValidationReport:
    ok: bool
    violations: list

    def __bool__(self):
        return self.ok


def _simplex_inequalities(base, simplex):
    pts = [base.points[i] for i in simplex.indices]
    return LatticePolytope(pts).facets


def _intersection_vertices(facets_a, facets_b, dim):
    """Exact vertex set of the polytope cut out by both facet systems."""
    ineqs = list(facets_a) + list(facets_b)
    verts = set()
    for subset in combinations(range(len(ineqs)), dim):
        rows = [list(ineqs[i][0]) for i in subset]
        rhs = [Fraction(-ineqs[i][1]) for i in subset]
        if linalg.rank(rows) != dim:
            continue
        sol = linalg.solve(rows, rhs)
        if sol is None:
            continue
        if all(linalg.dot(sol, normal) >= -offset
               for normal, offset in ineqs):
            verts.add(tuple(sol))
    return verts


def validate_triangulation(tri, star=False):
    """Check volume additivity, pairwise common-face intersections and,
    optionally, that the origin is a vertex of every simplex."""
    base = tri.base
    violations = []
    vols = tri.volumes()
    for s, v in zip(tri.simplices, vols):
        if v == 0:
            violations.append(f"simplex {s.indices} is degenerate")
    if violations:
        return ValidationReport(False, violations)
    total = sum(vols)
    expected = base.normalized_volume()
    if total != expected:
        violations.append(
            f"simplex volumes sum to {total}, polytope has {expected}")
    facet_cache = {s.indices: _simplex_inequalities(base, s)
                   for s in tri.simplices}
    for a, b in combinations(tri.simplices, 2):
        shared = set(a.indices) & set(b.indices)
        shared_pts = {tuple(Fraction(x) for x in base.points[i])
                      for i in shared}
        inter = _intersection_vertices(facet_cache[a.indices],
                                       facet_cache[b.indices], base.dim)
        if inter != shared_pts:
            violations.append(
                f"simplices {a.indices} and {b.indices} do not meet "
                "in a common face")
    if star:
        origin = base.origin_index()
        if origin is None:
            violations.append("origin is not among the points")
        else:
            for s in tri.simplices:
                if origin not in s.indices:
                    violations.append(
                        f"simplex {s.indices} does not contain the origin")
    return ValidationReport(not violations, violations)


# ---------------------------------------------------------------------------
# Coherence certificates


@dataclass
class CoherenceCertificate:
    """Rational lift values on the point set witnessing that the
    triangulation is cut out by a strictly convex piecewise-linear
    function."""

    lift: dict


def _affine_coordinates(base, simplex, point):
    """Affine coordinates of ``point`` with respect to a full simplex."""
    pts = [base.points[i] for i in simplex.indices]
    rows = [[Fraction(p[k]) for p in pts] for k in range(base.dim)]
    rows.append([Fraction(1)] * len(pts))
    rhs = [Fraction(x) for x in point] + [Fraction(1)]
    sol = linalg.solve(rows, rhs)
    if sol is None:
        raise GeometryError("degenerate simplex in coordinate solve")
    return sol


def _ray_coordinates(base, ray_indices, point):
    """Linear coordinates of ``point`` in the (independent) ray basis."""
    pts = [base.points[i] for i in ray_indices]
    rows = [[Fraction(p[k]) for p in pts] for k in range(base.dim)]
    rhs = [Fraction(x) for x in point]
    sol = linalg.solve(rows, rhs)
    if sol is None:
        raise GeometryError("point outside the span of the cone rays")
    return sol


def coherence_certificate(tri):
    """Rational lift making the triangulation coherent, or raise.

    Solves the feasibility system `lift of every point not in a simplex
    lies at least 1 above that simplex's (affine or, for star
    triangulations, conical) extension`; strictness margins of 1 are
    enough because the feasible set is a cone.
    """
    base = tri.base
    n_pts = len(base.points)
    origin = base.origin_index()
    star = tri.is_star()
    constraints = []
    if star:
        # unknowns: lift of every nonzero point; origin pinned to 0.
        # Positivity (lift >= 1 off the origin) keeps the witness usable
        # as exponents of a one-parameter coefficient family.
        unknowns = [i for i in range(n_pts) if i != origin]
        pos = {idx: k for k, idx in enumerate(unknowns)}
        for k in range(len(unknowns)):
            coeffs = [Fraction(0)] * len(unknowns)
            coeffs[k] = Fraction(1)
            constraints.append((coeffs, Fraction(1)))
        for s in tri.simplices:
            rays = tuple(i for i in s.indices if i != origin)
            for w in unknowns:
                if w in rays:
                    continue
                coeffs = [Fraction(0)] * len(unknowns)
                coeffs[pos[w]] = Fraction(1)
                for i, c in zip(rays,
                                _ray_coordinates(base, rays,
                                                 base.points[w])):
                    coeffs[pos[i]] -= c
                constraints.append((coeffs, Fraction(1)))
        witness = linalg.fourier_motzkin_witness(constraints, len(unknowns))
        if witness is None:
            raise GeometryError("triangulation is not coherent")
        lift = {i: witness[pos[i]] for i in unknowns}
        lift[origin] = Fraction(0)
    else:
        unknowns = list(range(n_pts))
        for s in tri.simplices:
            for w in unknowns:
                if w in s.indices:
                    continue
                coeffs = [Fraction(0)] * n_pts
                coeffs[w] = Fraction(1)
                for i, c in zip(s.indices,
                                _affine_coordinates(base, s,
                                                    base.points[w])):
                    coeffs[i] -= c
                constraints.append((coeffs, Fraction(1)))
        witness = linalg.fourier_motzkin_witness(constraints, n_pts)
        if witness is None:
            raise GeometryError("triangulation is not coherent")
        lift = {i: witness[i] for i in unknowns}
    cert = CoherenceCertificate(lift)
    verify_certificate(tri, cert)
    return cert


def _lifted_affine(base, simplex, lift):
    """(gradient, constant) of the affine function through the lifted
    simplex vertices."""
    pts = [base.points[i] for i in simplex.indices]
    rows = [[Fraction(x) for x in p] + [Fraction(1)] for p in pts]
    rhs = [lift[i] for i in simplex.indices]
    sol = linalg.solve(rows, rhs)
    if sol is None:
        raise GeometryError("degenerate simplex in lift solve")
    return sol[:-1], sol[-1]


def verify_certificate(tri, cert):
    """Independent convexity checker for a candidate lift.

    For each interior wall the two opposite lifted vertices must lie
    strictly above the extension of the other simplex's affine piece,
    and every point of A sitting inside a simplex it is not a vertex of
    must be lifted strictly above that piece.
    """
    base = tri.base
    lift = cert.lift
    pieces = {}
    for s in tri.simplices:
        grad, const = _lifted_affine(base, s, lift)
        pieces[s.indices] = (grad, const)

        def value(point, grad=grad, const=const):
            return linalg.dot(grad, point) + const
        for i in range(len(base.points)):
            if i in s.indices:
                continue
            inside = LatticePolytope(
                [base.points[j] for j in s.indices]).contains(base.points[i])
            if inside and not lift[i] > value(base.points[i]):
                raise GeometryError(
                    f"lift of point {i} is not above simplex {s.indices}")
    for a, b in combinations(tri.simplices, 2):
        shared = set(a.indices) & set(b.indices)
        if len(shared) != base.dim:
            continue
        grad_a, const_a = pieces[a.indices]
        grad_b, const_b = pieces[b.indices]
        opp_b = next(iter(set(b.indices) - shared))
        opp_a = next(iter(set(a.indices) - shared))
        if not (linalg.dot(grad_a, base.points[opp_b]) + const_a
                < lift[opp_b]):
            raise GeometryError(
                f"lift is not strictly convex across the wall "
                f"{sorted(shared)}")
        if not (linalg.dot(grad_b, base.points[opp_a]) + const_b
                < lift[opp_a]):
            raise GeometryError(
                f"lift is not strictly convex across the wall "
                f"{sorted(shared)}")
    return True


# ---------------------------------------------------------------------------
# Secondary-polytope vertex data


@dataclass
class SecondaryVertex:
    """Point-incidence volume counts of a triangulation together with the
    (absolute value of the) vertex coefficient prod Vol^Vol."""

    chi: dict
    gkz_coefficient: int


def characteristic_function(tri):
    """Volume-weighted vertex incidence counts and the vertex coefficient.

    chi(m) sums the normalized volumes of all simplices having m as a
    vertex; the coefficient is the product of Vol^Vol over the simplices.
    Signs of the underlying expansion are not tracked; the coefficient is
    reported as an absolute value.
    """
    base = tri.base
    chi = {i: 0 for i in range(len(base.points))}
    coeff = 1
    for s in tri.simplices:
        vol = s.volume(base)
        if vol == 0:
            raise GeometryError(f"degenerate simplex {s.indices}")
        coeff *= vol ** vol
        for i in s.indices:
            chi[i] += vol
    return SecondaryVertex(chi, coeff)


def vertex_monomial_exponents(tri):
    """Exponent vector of the secondary-polytope vertex monomial in the
    coefficients a_1..a_n (origin coefficient suppressed, it is 1)."""
    base = tri.base
    origin = base.origin_index()
    chi = characteristic_function(tri).chi
    return tuple(chi[i] for i in range(len(base.points)) if i != origin)
