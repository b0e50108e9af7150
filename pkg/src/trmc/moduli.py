"""Toric compactifications of spaces of rational curves of a fixed class,
and the generating function of their intersection numbers.

For a curve class beta on a projective simplicial toric variety, the
moduli space is the toric variety of the normal fan of a fibered
polytope: over the face of the divisor polytope cut out by the rays
pairing negatively with beta, each remaining coordinate x_j splits into
b_j + 1 copies.  The construction is purely combinatorial, so no convex
hull in high dimension is ever needed: vertices are (cone, copy-choice)
pairs, facets are copy coordinates passing an explicit criterion.
"""

from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .errors import GeometryError
from .multipoly import MultiPoly
from .toric import Fan, ToricVariety, enumerate_mori_points, mori_cone


@dataclass
class ModuliPolytope:
    """Combinatorial description of the fibered polytope for one class."""

    beta: tuple
    coords: list           # ambient coordinates as (ray j, copy i)
    facet_coords: list     # subset of coords defining facets
    negative: tuple        # rays pairing negatively with beta
    cones_over: list       # maximal cones of the base fan containing them
    vertex_values: dict    # base cone -> {ray j not in cone: x_j value}
    empty: bool


def default_ample_class(variety, cone=None):
    """Interior point of the nef cone: the sum of its generating rays."""
    cone = cone if cone is not None else mori_cone(variety)
    if not cone.nef_generators:
        raise GeometryError("empty nef description")
    total = [Fraction(0)] * variety.pic_rank
    for nef in cone.nef_generators:
        for k, x in enumerate(nef):
            total[k] += Fraction(x)
    return tuple(total)


def normalized_ample_class(variety, generators):
    """Ample class pairing to 1 with each effective-cone generator.

    Exists when the generators are linearly independent; it makes the
    (H, beta) grading equal to the total degree in generator coordinates.
    """
    rows = [variety.curve_functional(g) for g in generators]
    if len(rows) != variety.pic_rank:
        raise GeometryError("need a simplicial generator set")
    sol = linalg.solve(rows, [Fraction(1)] * len(rows))
    if sol is None:
        raise GeometryError("generators are linearly dependent")
    return tuple(sol)


def moduli_polytope(variety, beta, h_class=None, cone=None):
    """Fibered polytope data for a curve class (possibly empty)."""
    beta = tuple(int(x) for x in beta)
    if len(beta) != variety.n_rays:
        raise GeometryError("curve class length must match the ray count")
    # confirm beta lies in the relation lattice
    variety.curve_functional(beta)
    if h_class is None:
        h_class = default_ample_class(variety, cone)
    negative = tuple(j for j, b in enumerate(beta) if b < 0)
    if negative and not variety.is_face(negative):
        return ModuliPolytope(beta, [], [], negative, [], {}, True)
    neg_set = set(negative)
    coords = [(j, i) for j in range(variety.n_rays) if j not in neg_set
              for i in range(beta[j] + 1)]
    facet_coords = []
    for (j, i) in coords:
        if beta[j] > 0:
            facet_coords.append((j, i))
        elif variety.is_face(set(negative) | {j}):
            facet_coords.append((j, i))
    cones_over = [c for c in variety.fan.max_cones
                  if neg_set <= set(c)]
    if not cones_over:
        raise GeometryError("negative support spans a cone but no maximal "
                            "cone contains it; fan not complete?")
    # vertex values of the base polytope at each relevant cone; strict
    # positivity off the cone certifies that h_class is ample
    vertex_values = {}
    basis = variety.relation_basis
    for cone_rays in cones_over:
        outside = [j for j in range(variety.n_rays) if j not in cone_rays]
        rows = [[Fraction(lam[j]) for j in outside] for lam in basis]
        rhs = [variety.pairing(h_class, lam) for lam in basis]
        sol = linalg.solve(rows, rhs)
        if sol is None:
            raise GeometryError("degenerate vertex solve; fan data broken")
        values = dict(zip(outside, sol))
        for j, v in values.items():
            if v <= 0:
                raise GeometryError(
                    "grading class is not ample: vertex coordinate "
                    f"x_{j} = {v} at cone {cone_rays}")
        vertex_values[cone_rays] = values
    return ModuliPolytope(beta, coords, facet_coords, negative,
                          cones_over, vertex_values, False)


@dataclass
class ModuliSpace:
    """Toric variety of the normal fan of the fibered polytope, with the
    class map from the base variety."""

    beta: tuple
    base: ToricVariety
    empty: bool
    variety: ToricVariety = None
    ray_coords: list = None          # ray index -> (base ray j, copy i)
    psi: list = None                 # rows of the class map, r_beta x r
    dropped: tuple = ()

    def class_image(self, j):
        """Image of the j-th base ray divisor class on the moduli space."""
        base_class = self.base.divisor_class(j)
        return tuple(linalg.dot(row, base_class) for row in self.psi)


def _choices(items):
    if not items:
        yield {}
        return
    (j, count), rest = items[0], items[1:]
    for sub in _choices(rest):
        for i in range(count + 1):
            out = dict(sub)
            out[j] = i
            yield out


def moduli_space(variety, beta, h_class=None, cone=None):
    """Build the moduli space for a curve class of the base variety."""
    mp = moduli_polytope(variety, beta, h_class, cone)
    beta = mp.beta
    if mp.empty:
        return ModuliSpace(beta, variety, True)
    neg_set = set(mp.negative)
    dropped = tuple(sorted(set(mp.coords) - set(mp.facet_coords)))

    # direction lattice of the fibered polytope inside its ambient space
    coord_index = {c: k for k, c in enumerate(mp.coords)}
    cond = []
    for lam in variety.relation_basis:
        cond.append([lam[j] for (j, _) in mp.coords])
    kernel = linalg.integer_kernel_basis(cond)
    dim = len(kernel)
    expected_dim = variety.dim - variety.n_rays + sum(
        beta[j] + 1 for j in range(variety.n_rays) if j not in neg_set)
    if dim != expected_dim:
        raise GeometryError(
            f"moduli dimension {dim} differs from expected {expected_dim}")

    def functional(coord):
        k = coord_index[coord]
        return tuple(vec[k] for vec in kernel)

    rays = []
    ray_index = {}
    for coord in mp.facet_coords:
        vec = functional(coord)
        if all(x == 0 for x in vec):
            raise GeometryError(f"facet coordinate {coord} has zero "
                                "functional")
        ray_index[coord] = len(rays)
        rays.append(linalg.primitive_vector(vec))

    max_cones = []
    for cone_rays in mp.cones_over:
        cone_set = set(cone_rays)
        free = [(j, beta[j]) for j in range(variety.n_rays)
                if j not in cone_set and j not in neg_set]
        for choice in _choices(free):
            incident = []
            for (j, i) in mp.facet_coords:
                if j in cone_set:
                    incident.append(ray_index[(j, i)])
                elif j in choice and i != choice[j]:
                    incident.append(ray_index[(j, i)])
            if len(incident) != dim:
                raise GeometryError(
                    "vertex is not simple: expected "
                    f"{dim} facets, found {len(incident)}")
            max_cones.append(tuple(sorted(incident)))
    fan = Fan(dim, rays, max_cones)
    space = ToricVariety(fan, max_monomials=variety.max_monomials)

    # class map: every copy of a surviving ray shares one class, dropped
    # zero-classes pin the rest by linearity
    conditions = []
    for j in range(variety.n_rays):
        if j in neg_set:
            continue
        if (j, 0) in ray_index:
            img = space.divisor_class(ray_index[(j, 0)])
            for i in range(1, beta[j] + 1):
                other = space.divisor_class(ray_index[(j, i)])
                if other != img:
                    raise GeometryError(
                        f"copies of ray {j} carry different classes")
            conditions.append((variety.divisor_class(j), img))
        else:
            zero = tuple(Fraction(0) for _ in range(space.pic_rank))
            conditions.append((variety.divisor_class(j), zero))
    vmat = [list(v) for v, _ in conditions]
    if linalg.rank(vmat) != variety.pic_rank:
        raise GeometryError("class map is underdetermined")
    psi = []
    for k in range(space.pic_rank):
        rhs = [w[k] for _, w in conditions]
        row = linalg.solve(vmat, rhs)
        if row is None:
            raise GeometryError("class map conditions are inconsistent")
        psi.append(tuple(row))
    # surjectivity (and bijectivity on the nonnegative cone)
    if linalg.rank([list(r) for r in psi]) != space.pic_rank:
        raise GeometryError("class map is not surjective")
    if not neg_set and space.pic_rank != variety.pic_rank:
        raise GeometryError("class map must be bijective for classes with "
                            "nonnegative coordinates")
    return ModuliSpace(beta, variety, False, space,
                       [c for c in mp.facet_coords], psi, dropped)


def virtual_class(space):
    """Insertion class: the anticanonical power times the prescribed
    powers of the negative-ray classes, as a polynomial in the moduli
    class basis."""
    if space.empty:
        raise GeometryError("empty moduli space has no insertion class")
    beta = space.beta
    total = sum(beta)
    if total < 0:
        raise GeometryError("anticanonical degree of the class is negative")
    variables = tuple(f"J{k + 1}" for k in range(space.variety.pic_rank))

    def form(vec):
        return MultiPoly(variables, {
            tuple(1 if k == j else 0 for k in range(len(variables))): x
            for j, x in enumerate(vec) if x != 0})

    total_form = [Fraction(0)] * space.variety.pic_rank
    for j in range(len(beta)):
        img = space.class_image(j)
        for k, x in enumerate(img):
            total_form[k] += x
    result = form(tuple(total_form)) ** total
    for j, b in enumerate(beta):
        if b < 0:
            result = result * (form(space.class_image(j)) ** (-b - 1))
    expected = space.variety.dim - space.base.dim
    if not result.is_zero() and not result.is_homogeneous(expected):
        raise GeometryError("insertion class has wrong degree")
    return result


def intersection_coefficient(space, poly):
    """<P([D_1],...,[D_n]) . insertion>, zero on an empty moduli space.

    ``poly`` is homogeneous of degree dim(base) in one variable per base
    ray.
    """
    base = space.base
    if len(poly.variables) != base.n_rays:
        raise GeometryError("polynomial must have one variable per base ray")
    if not poly.is_homogeneous(base.dim):
        raise GeometryError(
            f"polynomial is not homogeneous of degree {base.dim}")
    if space.empty:
        return Fraction(0)
    variables = tuple(f"J{k + 1}" for k in range(space.variety.pic_rank))
    forms = []
    for j in range(base.n_rays):
        img = space.class_image(j)
        forms.append(MultiPoly(variables, {
            tuple(1 if k == i else 0 for k in range(len(variables))): x
            for i, x in enumerate(img) if x != 0}))
    expanded = poly.compose_linear(forms) * virtual_class(space)
    if expanded.is_zero():
        return Fraction(0)
    return space.variety.evaluate_class_poly(expanded)


@dataclass
class CoefficientTable:
    """Intersection coefficients indexed by curve class, with the data
    needed to lay them out as a series in generator coordinates."""

    entries: dict
    bound: int
    generators: list

    def generator_exponents(self, beta):
        cols = linalg.transpose([list(g) for g in self.generators])
        lam = linalg.solve_integer(cols, list(beta))
        if lam is None or any(x < 0 for x in lam):
            raise GeometryError(
                f"class {beta} is not a nonnegative integer combination "
                "of the generators")
        return tuple(lam)

    def series(self, names=None, order=None):
        from .multipoly import TruncatedSeries
        r = len(self.generators)
        names = tuple(names) if names else tuple(
            f"y{k + 1}" for k in range(r))
        order = self.bound if order is None else order
        terms = {}
        for beta, coeff in self.entries.items():
            lam = self.generator_exponents(beta)
            if sum(lam) <= order:
                terms[lam] = terms.get(lam, Fraction(0)) + coeff
        return TruncatedSeries(names, order, terms)


def _coefficient_worker(args):
    variety, beta, poly, h_class = args
    space = moduli_space(variety, beta, h_class)
    return beta, intersection_coefficient(space, poly)


def generating_function(variety, poly, bound, h_class=None,
                        generators=None, cone=None, jobs=1):
    """Table of intersection coefficients over all effective classes with
    grading at most ``bound``.

    The default grading class pairs to 1 with each generator, making the
    grading equal to total degree in generator coordinates.
    """
    cone = cone if cone is not None else mori_cone(variety)
    gens = [tuple(g) for g in (generators
                               if generators is not None
                               else cone.generators)]
    grading = (h_class if h_class is not None
               else normalized_ample_class(variety, gens))
    betas = enumerate_mori_points(variety, grading, bound, cone)
    ample = default_ample_class(variety, cone)
    entries = {}
    if jobs and jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        tasks = [(variety, beta, poly, ample) for beta in betas]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for beta, coeff in pool.map(_coefficient_worker, tasks):
                entries[beta] = coeff
    else:
        for beta in betas:
            space = moduli_space(variety, beta, ample, cone)
            entries[beta] = intersection_coefficient(space, poly)
    return CoefficientTable(entries, bound, gens)
