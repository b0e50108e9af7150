"""Complete simplicial fans and exact intersection theory on the
associated projective toric varieties.

Divisor classes live in the rational class group presented by the Smith
normal form cokernel of the ray matrix; top intersection numbers are
computed through the unique (up to scale) linear functional on the
top-degree monomial space annihilating the Stanley-Reisner relations,
normalized on a reference maximal cone by its lattice multiplicity.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import lcm

from . import linalg
from .errors import CapExceededError, GeometryError
from .multipoly import MultiPoly


class Fan:
    """Complete simplicial fan: primitive rays plus maximal cones."""

    def __init__(self, rank, rays, max_cones):
        self.rank = int(rank)
        self.rays = tuple(tuple(int(x) for x in r) for r in rays)
        self.max_cones = tuple(tuple(sorted(int(i) for i in c))
                               for c in max_cones)
        self._validate()

    def _validate(self):
        d = self.rank
        seen = set()
        for ray in self.rays:
            if len(ray) != d:
                raise GeometryError("ray of wrong dimension")
            if all(x == 0 for x in ray):
                raise GeometryError("zero ray")
            if linalg.primitive_vector(ray) != ray:
                raise GeometryError(f"ray {ray} is not primitive")
            if ray in seen:
                raise GeometryError(f"duplicate ray {ray}")
            seen.add(ray)
        used = set()
        for cone in self.max_cones:
            if len(cone) != d:
                raise GeometryError(f"maximal cone {cone} does not have "
                                    f"{d} rays")
            mat = [list(self.rays[i]) for i in cone]
            if linalg.rank(mat) != d:
                raise GeometryError(f"cone {cone} is not simplicial")
            used.update(cone)
        if used != set(range(len(self.rays))):
            raise GeometryError("some rays appear in no maximal cone")
        # pseudo-manifold test: every wall is shared by exactly two cones
        wall_count = {}
        for cone in self.max_cones:
            for wall in combinations(cone, d - 1):
                wall_count[wall] = wall_count.get(wall, 0) + 1
        bad = [w for w, c in wall_count.items() if c != 2]
        if bad:
            raise GeometryError(
                f"fan is not complete: wall {bad[0]} lies on "
                f"{wall_count[bad[0]]} maximal cones")

    def walls(self):
        """Map wall (sorted ray tuple) -> the two adjacent cones."""
        adj = {}
        for cone in self.max_cones:
            for wall in combinations(cone, self.rank - 1):
                adj.setdefault(wall, []).append(cone)
        return adj


def fan_from_triangulation(tri):
    """Fan over the cones of a star triangulation of a reflexive polytope.

    Ray k corresponds to the k-th nonzero point (in point-index order);
    the apex is dropped from every simplex.
    """
    base = tri.base
    origin = base.origin_index()
    if origin is None or not tri.is_star():
        raise GeometryError("fan construction needs a star triangulation "
                            "with apex at the origin")
    used = sorted(tri.used_indices() - {origin})
    ray_of_point = {p: k for k, p in enumerate(used)}
    rays = [base.points[p] for p in used]
    cones = []
    for s in tri.simplices:
        cones.append(tuple(ray_of_point[i] for i in s.indices
                           if i != origin))
    return Fan(base.dim, rays, cones)


# ---------------------------------------------------------------------------
# Minimal non-faces by hypergraph dualization


def minimal_nonfaces(n_rays, max_cones, cap=20000):
    """Minimal ray sets spanning no cone of the fan.

    A set is a non-face iff it meets the complement of every maximal
    cone, so the minimal non-faces are the minimal transversals of the
    complement hypergraph; those are built edge by edge (Berge), keeping
    the running family minimal.
    """
    edges = sorted({frozenset(range(n_rays)) - frozenset(c)
                    for c in max_cones}, key=sorted)
    transversals = [frozenset()]
    for edge in edges:
        if not edge:
            return []
        hits = [t for t in transversals if t & edge]
        misses = [t for t in transversals if not (t & edge)]
        candidates = set(hits)
        for t in misses:
            for v in sorted(edge):
                candidates.add(t | {v})
        # prune to the minimal family
        ordered = sorted(candidates, key=lambda s: (len(s), sorted(s)))
        kept = []
        for cand in ordered:
            if not any(k <= cand for k in kept if k != cand):
                kept.append(cand)
        transversals = kept
        if len(transversals) > cap:
            raise CapExceededError(
                f"more than {cap} candidate non-faces")
    return sorted((tuple(sorted(t)) for t in transversals),
                  key=lambda t: (len(t), t))


# ---------------------------------------------------------------------------


@dataclass
class MoriCone:
    generators: list
    nef_generators: list
    dual_check_conclusive: bool = True


class ToricVariety:
    """Projective simplicial toric variety with exact intersection data."""

    def __init__(self, fan, max_monomials=20000):
        self.fan = fan
        self.dim = fan.rank
        self.n_rays = len(fan.rays)
        self.max_monomials = max_monomials
        # embedding of the character lattice: m -> (<m, ray_i>)_i
        self.ray_matrix = [list(r) for r in fan.rays]
        self.relation_basis = linalg.integer_kernel_basis(
            linalg.transpose(self.ray_matrix))
        self.pic_rank = self.n_rays - self.dim
        if len(self.relation_basis) != self.pic_rank:
            raise GeometryError("relation lattice has unexpected rank")
        w = linalg.integer_cokernel_projection(self.ray_matrix)
        if len(w) != self.pic_rank:
            raise GeometryError("class projection has unexpected rank")
        self.class_projection = [tuple(row) for row in w]
        self.class_matrix = [tuple(row[i] for row in w)
                             for i in range(self.n_rays)]
        self.sr_nonfaces = minimal_nonfaces(self.n_rays, fan.max_cones)
        self._mult_cache = {}
        self._functional_cache = {}
        self._curve_functional_cache = {}

    # -- classes and pairings -------------------------------------------
    def divisor_class(self, i):
        """Class of the i-th ray divisor in the chosen basis."""
        return tuple(Fraction(x) for x in self.class_matrix[i])

    def class_of_combination(self, coeffs):
        out = [Fraction(0)] * self.pic_rank
        for i, c in enumerate(coeffs):
            if c == 0:
                continue
            for k, x in enumerate(self.class_matrix[i]):
                out[k] += Fraction(c) * x
        return tuple(out)

    def lift_class(self, class_vec):
        """Some divisor coefficient vector mapping to the given class."""
        rows = [[Fraction(x) for x in row]
                for row in self.class_projection]
        sol = linalg.solve(rows, [Fraction(x) for x in class_vec])
        if sol is None:
            raise GeometryError("class vector outside the class group")
        return sol

    def curve_functional(self, curve):
        """Vector f with pairing(class, curve) = class . f."""
        key = tuple(curve)
        if key not in self._curve_functional_cache:
            rows = [[Fraction(row[i]) for row in self.class_projection]
                    for i in range(self.n_rays)]
            sol = linalg.solve(rows, [Fraction(x) for x in curve])
            if sol is None:
                raise GeometryError(
                    f"{key} is not in the relation lattice")
            self._curve_functional_cache[key] = sol
        return self._curve_functional_cache[key]

    def pairing(self, class_vec, curve):
        return linalg.dot(class_vec, self.curve_functional(curve))

    # -- cones ------------------------------------------------------------
    def cone_multiplicity(self, cone):
        cone = tuple(sorted(cone))
        if cone not in self._mult_cache:
            mat = [list(self.fan.rays[i]) for i in cone]
            det = abs(linalg.det_int(mat))
            if det == 0:
                raise GeometryError(f"degenerate cone {cone}")
            self._mult_cache[cone] = det
        return self._mult_cache[cone]

    def is_face(self, ray_set):
        s = frozenset(ray_set)
        return any(s <= frozenset(c) for c in self.fan.max_cones)

    # -- intersection functional -------------------------------------------
    def _class_form(self, i, variables):
        return MultiPoly(variables, {
            tuple(1 if k == j else 0 for k in range(self.pic_rank)):
                Fraction(x)
            for j, x in enumerate(self.class_matrix[i]) if x != 0})

    def _monomials(self, degree):
        def gen(rest, slots):
            if slots == 1:
                yield (rest,)
                return
            for head in range(rest + 1):
                for tail in gen(rest - head, slots - 1):
                    yield (head,) + tail
        mons = sorted(gen(degree, self.pic_rank), key=lambda e: (sum(e), e))
        return mons

    def evaluation_functional(self, degree):
        """Functional on degree-``degree`` monomials in the class basis.

        Vanishes on every Stanley-Reisner relation and sends the
        squarefree ray product of the reference cone to the reciprocal
        of its multiplicity.
        """
        if degree in self._functional_cache:
            return self._functional_cache[degree]
        variables = tuple(f"J{k + 1}" for k in range(self.pic_rank))
        monomials = self._monomials(degree)
        if len(monomials) > self.max_monomials:
            raise CapExceededError(
                f"monomial space of size {len(monomials)} exceeds the cap "
                f"{self.max_monomials}")
        index = {m: i for i, m in enumerate(monomials)}
        rows = []
        for nonface in self.sr_nonfaces:
            if len(nonface) > degree:
                continue
            poly = MultiPoly.constant(variables, 1)
            for i in nonface:
                poly = poly * self._class_form(i, variables)
            for pad in self._monomials(degree - len(nonface)):
                row = [Fraction(0)] * len(monomials)
                for exps, coeff in poly.terms.items():
                    target = tuple(a + b for a, b in zip(exps, pad))
                    row[index[target]] += coeff
                rows.append(row)
        if rows:
            basis = linalg.nullspace(rows, ncols=len(monomials))
        else:
            basis = [tuple(Fraction(1) if i == j else Fraction(0)
                           for i in range(len(monomials)))
                     for j in range(len(monomials))]
        if len(basis) != 1:
            raise GeometryError(
                f"evaluation functional is not unique in degree {degree} "
                f"(kernel dimension {len(basis)}); fan incomplete or "
                "degree mismatch")
        phi = list(basis[0])
        # normalize on the lexicographically-first maximal cone
        for cone in sorted(self.fan.max_cones):
            poly = MultiPoly.constant(variables, 1)
            for i in cone:
                poly = poly * self._class_form(i, variables)
            val = sum(phi[index[e]] * c for e, c in poly.terms.items())
            if val != 0:
                scale = Fraction(1, self.cone_multiplicity(cone)) / val
                phi = [x * scale for x in phi]
                break
        else:
            raise GeometryError("all cone products vanish; cannot "
                                "normalize the evaluation functional")
        result = (variables, index, tuple(phi))
        self._functional_cache[degree] = result
        return result

    def evaluate_class_poly(self, poly):
        """Apply the top-degree functional to a polynomial in the class
        variables (must be homogeneous of degree dim)."""
        if not poly.is_homogeneous(self.dim):
            raise GeometryError("class polynomial is not homogeneous of "
                                "top degree")
        variables, index, phi = self.evaluation_functional(self.dim)
        total = Fraction(0)
        for exps, coeff in poly.terms.items():
            total += coeff * phi[index[exps]]
        return total

    def intersection_number(self, classes):
        """Top cup product of ``dim`` divisor classes (class-basis coords)."""
        classes = list(classes)
        if len(classes) != self.dim:
            raise GeometryError(
                f"need exactly {self.dim} classes, got {len(classes)}")
        variables = tuple(f"J{k + 1}" for k in range(self.pic_rank))
        poly = MultiPoly.constant(variables, 1)
        for vec in classes:
            form = MultiPoly(variables, {
                tuple(1 if k == j else 0 for k in range(self.pic_rank)):
                    Fraction(x)
                for j, x in enumerate(vec) if x != 0})
            poly = poly * form
        if poly.is_zero():
            return Fraction(0)
        return self.evaluate_class_poly(poly)

    def integrate_polynomial(self, poly):
        """Integrate P([D_1],...,[D_n]) for P homogeneous of degree dim.

        ``poly`` has one variable per ray divisor.
        """
        if len(poly.variables) != self.n_rays:
            raise GeometryError("polynomial must have one variable per ray")
        if poly.is_zero():
            return Fraction(0)
        if not poly.is_homogeneous(self.dim):
            raise GeometryError("polynomial is not homogeneous of degree "
                                f"{self.dim}")
        variables = tuple(f"J{k + 1}" for k in range(self.pic_rank))
        forms = [self._class_form(i, variables) for i in range(self.n_rays)]
        expanded = poly.compose_linear(forms)
        if expanded.is_zero():
            return Fraction(0)
        return self.evaluate_class_poly(expanded)


def relation_lattice(fan):
    """Saturated integral basis of the linear relations among the rays."""
    return [tuple(v) for v in linalg.integer_kernel_basis(
        linalg.transpose([list(r) for r in fan.rays]))]


def mori_cone(variety):
    """Wall curve classes and a dual description of the nef cone.

    Each interior wall contributes the primitive relation among the rays
    of its two adjacent cones, oriented positively on the two rays off
    the wall.  A double-dual check flags generator sets that may fail to
    generate the full effective cone.
    """
    fan = variety.fan
    d = fan.rank
    generators = []
    seen = set()
    for wall, cones in sorted(fan.walls().items()):
        if len(cones) != 2:
            raise GeometryError("fan is not complete")
        involved = sorted(set(cones[0]) | set(cones[1]))
        mat = [[fan.rays[i][k] for i in involved] for k in range(d)]
        kernel = linalg.integer_kernel_basis(mat)
        if len(kernel) != 1:
            raise GeometryError(f"wall {wall} has no unique relation")
        rel = linalg.primitive_vector(kernel[0])
        opp = [i for i in involved if i not in wall]
        pos = {involved.index(i) for i in opp}
        signs = {1 if rel[k] > 0 else -1 if rel[k] < 0 else 0 for k in pos}
        if 0 in signs or len(signs) != 1:
            raise GeometryError(f"wall relation at {wall} is degenerate")
        if signs.pop() < 0:
            rel = tuple(-x for x in rel)
        full = [0] * variety.n_rays
        for k, i in enumerate(involved):
            full[i] = rel[k]
        full = tuple(full)
        if full not in seen:
            seen.add(full)
            generators.append(full)
    generators.sort()

    # dual (nef) description, in curve-lattice coordinates of the
    # relation basis
    lam_vectors = []
    cols = linalg.transpose([list(v) for v in variety.relation_basis])
    for g in generators:
        lam = linalg.solve_integer(cols, list(g))
        if lam is None:
            raise GeometryError("wall curve outside the relation lattice")
        lam_vectors.append(lam)
    nef_lam = linalg.dual_cone_rays(lam_vectors, variety.pic_rank)
    # extremal generators are the rays of the double dual; when one of
    # them is not among the wall curves the generation question is left
    # open and all wall curves are reported instead
    conclusive = True
    try:
        double = linalg.dual_cone_rays(nef_lam, variety.pic_rank)
        prim_walls = {linalg.primitive_vector(v): g
                      for v, g in zip(lam_vectors, generators)}
        if all(tuple(r) in prim_walls for r in double):
            generators = sorted(prim_walls[tuple(r)] for r in double)
        else:
            conclusive = False
    except GeometryError:
        conclusive = False

    # convert nef rays from curve-dual coordinates to class coordinates
    pairing_rows = [variety.curve_functional(g)
                    for g in variety.relation_basis]
    nef_classes = []
    for ray in nef_lam:
        phi = linalg.solve(pairing_rows, [Fraction(x) for x in ray])
        if phi is None:
            raise GeometryError("nef ray not expressible in class "
                                "coordinates")
        mult = lcm(*[f.denominator for f in phi]) if phi else 1
        nef_classes.append(tuple(
            Fraction(x) for x in linalg.primitive_vector(
                [int(f * mult) for f in phi])))
    return MoriCone(generators, nef_classes, conclusive)


def _fm_interval(constraints, nvars, keep):
    """[lo, hi] bounds (possibly None) on variable ``keep`` after
    eliminating all others from coeffs·x >= rhs constraints."""
    system = [(list(c), Fraction(r)) for c, r in constraints]
    for var in range(nvars):
        if var == keep:
            continue
        pos = [(c, r) for c, r in system if c[var] > 0]
        neg = [(c, r) for c, r in system if c[var] < 0]
        zero = [(c, r) for c, r in system if c[var] == 0]
        new = list(zero)
        for cp, rp in pos:
            for cn, rn in neg:
                a, b = cp[var], -cn[var]
                comb = [b * cp[k] + a * cn[k] for k in range(nvars)]
                new.append((comb, b * rp + a * rn))
        system = new
    lo, hi = None, None
    for c, r in system:
        if c[keep] > 0:
            bound = r / c[keep]
            lo = bound if lo is None else max(lo, bound)
        elif c[keep] < 0:
            bound = r / c[keep]
            hi = bound if hi is None else min(hi, bound)
        elif r > 0:
            return None  # infeasible
    return lo, hi


def enumerate_mori_points(variety, h_class, bound, mori=None):
    """Integral effective curve classes with 0 <= (H, beta) <= bound.

    Enumerates in relation-basis coordinates by recursive Fourier-Motzkin
    bounding; H must pair strictly positively with every generator of the
    effective cone, otherwise the region is unbounded.
    """
    cone = mori if mori is not None else mori_cone(variety)
    for g in cone.generators:
        if variety.pairing(h_class, g) <= 0:
            raise GeometryError(
                "grading class is not strictly positive on the effective "
                "cone; enumeration would not terminate")
    r = variety.pic_rank
    basis = variety.relation_basis
    nef_rows = []
    for nef in cone.nef_generators:
        nef_rows.append([variety.pairing(nef, b) for b in basis])
    h_row = [variety.pairing(h_class, b) for b in basis]

    constraints = [(row, Fraction(0)) for row in nef_rows]
    constraints.append(([-x for x in h_row], Fraction(-bound)))

    import math
    results = []

    def recurse(fixed):
        k = len(fixed)
        if k == r:
            beta = tuple(
                sum(fixed[i] * basis[i][j] for i in range(r))
                for j in range(variety.n_rays))
            results.append(beta)
            return
        # substitute the fixed prefix, bound the next variable
        sub = []
        for c, rhs in constraints:
            rest = rhs - sum(Fraction(c[i]) * fixed[i] for i in range(k))
            sub.append((list(c[k:]), rest))
        interval = _fm_interval(sub, r - k, 0)
        if interval is None:
            return
        lo, hi = interval
        if lo is None or hi is None:
            raise GeometryError("unbounded enumeration region")
        lo_i = math.ceil(lo)
        hi_i = math.floor(hi)
        for val in range(lo_i, hi_i + 1):
            recurse(fixed + [val])

    recurse([])
    valid = []
    for beta in sorted(set(results)):
        if all(variety.pairing(nef, beta) >= 0
               for nef in cone.nef_generators):
            deg = variety.pairing(h_class, beta)
            if 0 <= deg <= bound:
                valid.append((deg, beta))
    valid.sort(key=lambda t: (t[0], t[1]))
    return [beta for _, beta in valid]
