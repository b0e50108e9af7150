"""Exact linear algebra over arbitrary-precision integers and rationals.

Everything here is deterministic: pivots are the first nonzero entry in
column order, nullspace bases assign unit values to free columns in
increasing order, and Smith normal form picks the smallest-magnitude
pivot scanning row-major.  No floating point anywhere.
"""

from fractions import Fraction
from math import gcd, lcm

from .errors import GeometryError


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def mat_mul(a, b):
    cols = list(zip(*b))
    return [[dot(row, col) for col in cols] for row in a]


def mat_vec(a, v):
    return [dot(row, v) for row in a]


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def transpose(a):
    return [list(row) for row in zip(*a)]


def primitive_vector(v):
    """Divide an integer vector by the gcd of its entries (zero stays zero)."""
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    if g <= 1:
        return tuple(int(x) for x in v)
    return tuple(int(x) // g for x in v)


def _integerize_rows(rows):
    """Scale each row by a positive constant so all entries are ints.

    Row scaling preserves row span, rank, solution sets and nullspaces.
    """
    out = []
    for row in rows:
        mult = 1
        for x in row:
            if isinstance(x, Fraction) and x.denominator != 1:
                mult = lcm(mult, x.denominator)
        out.append([int(x * mult) for x in row])
    return out


def echelon_int(rows):
    """Fraction-free (Bareiss) row echelon of an integer matrix.

    Returns (echelon, pivot_cols).  Input rows are not modified.
    """
    m = [list(map(int, row)) for row in rows]
    if not m:
        return [], []
    nrows, ncols = len(m), len(m[0])
    pivots = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        pivot_row = None
        for i in range(r, nrows):
            if m[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        if pivot_row != r:
            m[r], m[pivot_row] = m[pivot_row], m[r]
        for i in range(r + 1, nrows):
            if all(x == 0 for x in m[i]):
                continue
            head = m[i][c]
            for j in range(c + 1, ncols):
                m[i][j] = (m[r][c] * m[i][j] - head * m[r][j]) // prev
            m[i][c] = 0
        prev = m[r][c]
        pivots.append(c)
        r += 1
    return m, pivots


def echelon(rows):
    """Echelon form of a rational matrix via row-integerization + Bareiss."""
    return echelon_int(_integerize_rows(rows))


def rank(rows):
    if not rows:
        return 0
    _, pivots = echelon(rows)
    return len(pivots)


def nullspace(rows, ncols=None):
    """Basis of the right nullspace of a rational matrix.

    Free columns get unit values in increasing column order, which makes
    the basis (and any tie-breaking built on it) reproducible.
    """
    if ncols is None:
        if not rows:
            raise ValueError("ncols required for an empty matrix")
        ncols = len(rows[0])
    if not rows:
        return [tuple(Fraction(1 if i == j else 0) for i in range(ncols))
                for j in range(ncols)]
    ech, pivots = echelon(rows)
    pivot_set = set(pivots)
    free_cols = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for f in free_cols:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for i in range(len(pivots) - 1, -1, -1):
            p = pivots[i]
            s = sum((Fraction(ech[i][j]) * x[j]
                     for j in range(p + 1, ncols)), Fraction(0))
            x[p] = -s / ech[i][p]
        basis.append(tuple(x))
    return basis


def solve(rows, rhs):
    """One exact solution of A x = b, or None if inconsistent.

    Free variables are set to zero (first solution in column order).
    """
    aug = [list(row) + [b] for row, b in zip(rows, rhs)]
    ncols = len(rows[0]) if rows else 0
    ech, pivots = echelon(aug)
    if pivots and pivots[-1] == ncols:
        return None
    x = [Fraction(0)] * ncols
    for i in range(len(pivots) - 1, -1, -1):
        p = pivots[i]
        s = sum((Fraction(ech[i][j]) * x[j]
                 for j in range(p + 1, ncols)), Fraction(0))
        x[p] = (Fraction(ech[i][ncols]) - s) / ech[i][p]
    return tuple(x)


def det_int(rows):
    """Determinant of a square integer matrix (Bareiss)."""
    n = len(rows)
    if n == 0:
        return 1
    m = [list(map(int, row)) for row in rows]
    sign = 1
    prev = 1
    for c in range(n - 1):
        if m[c][c] == 0:
            pivot_row = None
            for i in range(c + 1, n):
                if m[i][c] != 0:
                    pivot_row = i
                    break
            if pivot_row is None:
                return 0
            m[c], m[pivot_row] = m[pivot_row], m[c]
            sign = -sign
        for i in range(c + 1, n):
            for j in range(c + 1, n):
                m[i][j] = (m[c][c] * m[i][j] - m[i][c] * m[c][j]) // prev
            m[i][c] = 0
        prev = m[c][c]
    return sign * m[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(mat):
    """Return (U, D, V) with U·mat·V = D.

    D is diagonal with nonnegative entries, each dividing the next;
    U and V are unimodular.
    """
    d = [list(map(int, row)) for row in mat]
    nrows = len(d)
    ncols = len(d[0]) if nrows else 0
    u = identity(nrows)
    v = identity(ncols)

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, q):
        # row_dst += q * row_src
        for k in range(ncols):
            d[dst][k] += q * d[src][k]
        for k in range(nrows):
            u[dst][k] += q * u[src][k]

    def add_col(src, dst, q):
        for row in d:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    def negate_row(i):
        d[i] = [-x for x in d[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while t < min(nrows, ncols):
        # locate smallest-magnitude nonzero entry in the trailing block
        best = None
        for i in range(t, nrows):
            for j in range(t, ncols):
                if d[i][j] != 0 and (best is None
                                     or abs(d[i][j]) < abs(d[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, nrows):
                if d[i][t] != 0:
                    q = d[i][t] // d[t][t]
                    add_row(t, i, -q)
                    if d[i][t] != 0:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, ncols):
                if d[t][j] != 0:
                    q = d[t][j] // d[t][t]
                    add_col(t, j, -q)
                    if d[t][j] != 0:
                        swap_cols(t, j)
                        dirty = True
        # enforce divisibility of the remaining block by d[t][t]
        pivot = d[t][t]
        fixed = False
        for i in range(t + 1, nrows):
            for j in range(t + 1, ncols):
                if d[i][j] % pivot != 0:
                    add_row(i, t, 1)
                    fixed = True
                    break
            if fixed:
                break
        if fixed:
            continue
        if d[t][t] < 0:
            negate_row(t)
        t += 1
    return u, d, v


def snf_rank(d):
    return sum(1 for i in range(min(len(d), len(d[0]) if d else 0))
               if d[i][i] != 0)


def integer_kernel_basis(mat):
    """Saturated integral basis of {x : mat·x = 0} (list of tuples)."""
    ncols = len(mat[0]) if mat else 0
    if not mat:
        return [tuple(1 if i == j else 0 for i in range(ncols))
                for j in range(ncols)]
    _, d, v = smith_normal_form(mat)
    r = snf_rank(d)
    basis = []
    for j in range(r, ncols):
        basis.append(tuple(v[i][j] for i in range(len(v))))
    return basis


def integer_cokernel_projection(mat):
    """Rows spanning the dual of coker(mat) mod torsion.

    For an n x d integer matrix of rank k, returns the last n-k rows of U
    from U·mat·V = D.  These rows annihilate the column span of mat and
    project Z^n onto its cokernel modulo torsion.
    """
    u, d, _ = smith_normal_form(mat)
    r = snf_rank(d)
    return [tuple(row) for row in u[r:]]


def solve_integer(mat, rhs):
    """Integer solution of mat·x = rhs, or None."""
    u, d, v = smith_normal_form(mat)
    ub = mat_vec(u, list(rhs))
    ncols = len(mat[0])
    r = snf_rank(d)
    y = [0] * ncols
    for i in range(len(ub)):
        if i < r:
            if ub[i] % d[i][i] != 0:
                return None
            y[i] = ub[i] // d[i][i]
        elif ub[i] != 0:
            return None
    return tuple(mat_vec(v, y))


# ---------------------------------------------------------------------------
# Linear feasibility (Fourier-Motzkin) and dual cones


def _normalize_constraint(coeffs, rhs):
    mult = 1
    for x in list(coeffs) + [rhs]:
        if isinstance(x, Fraction) and x.denominator != 1:
            mult = lcm(mult, x.denominator)
    ints = [int(x * mult) for x in coeffs]
    r = int(rhs * mult)
    g = 0
    for x in ints + [r]:
        g = gcd(g, abs(x))
    if g > 1:
        ints = [x // g for x in ints]
        r = r // g
    return tuple(ints), r


def fourier_motzkin_witness(constraints, nvars):
    """Find x with coeffs·x >= rhs for every (coeffs, rhs), or None.

    Eliminates the variable with the fewest positive*negative pairings
    first, prunes duplicate constraints, and back-substitutes a rational
    witness.  Intended for small systems (tens of variables at most).
    """
    system = set()
    for coeffs, rhs in constraints:
        c, r = _normalize_constraint([Fraction(x) for x in coeffs],
                                     Fraction(rhs))
        system.add((c, r))

    order = []
    levels = []
    remaining = list(range(nvars))
    while remaining:
        # cheapest variable to eliminate
        best_var, best_cost = None, None
        for var in remaining:
            pos = sum(1 for c, _ in system if c[var] > 0)
            neg = sum(1 for c, _ in system if c[var] < 0)
            cost = pos * neg
            if best_cost is None or cost < best_cost:
                best_var, best_cost = var, cost
        var = best_var
        pos = [(c, r) for c, r in system if c[var] > 0]
        neg = [(c, r) for c, r in system if c[var] < 0]
        zero = [(c, r) for c, r in system if c[var] == 0]
        levels.append((var, pos + neg))
        order.append(var)
        new_system = set(zero)
        for cp, rp in pos:
            for cn, rn in neg:
                a, b = cp[var], -cn[var]
                comb = [b * cp[k] + a * cn[k] for k in range(nvars)]
                rhs = b * rp + a * rn
                comb_n, rhs_n = _normalize_constraint(
                    [Fraction(x) for x in comb], Fraction(rhs))
                if all(x == 0 for x in comb_n):
                    if rhs_n > 0:
                        return None
                    continue
                new_system.add((comb_n, rhs_n))
        system = new_system
        remaining.remove(var)

    for c, r in system:
        if r > 0:
            return None

    # back-substitute, later-eliminated variables first
    witness = [None] * nvars
    for var, cons in reversed(levels):
        lo, hi = None, None
        for c, r in cons:
            rest = sum(Fraction(c[k]) * witness[k] for k in range(nvars)
                       if k != var and c[k] != 0 and witness[k] is not None)
            bound = (Fraction(r) - rest) / c[var]
            if c[var] > 0:
                lo = bound if lo is None else max(lo, bound)
            else:
                hi = bound if hi is None else min(hi, bound)
        if lo is not None and hi is not None:
            if lo > hi:
                return None
            witness[var] = (lo + hi) / 2
        elif lo is not None:
            witness[var] = lo
        elif hi is not None:
            witness[var] = hi
        else:
            witness[var] = Fraction(0)
    return tuple(witness)


def dual_cone_rays(generators, dim):
    """Primitive generating rays of {y : g·y >= 0 for all g}.

    Requires the generators to span Q^dim (otherwise the dual cone has a
    lineality space and has no ray description); raises GeometryError in
    that case.
    """
    gens = [tuple(g) for g in generators]
    if rank(gens) < dim:
        raise GeometryError(
            "cone generators do not span the ambient space; "
            "dual cone is not pointed")
    if dim == 1:
        signs = {1 if g[0] > 0 else -1 for g in gens if g[0] != 0}
        if len(signs) != 1:
            raise GeometryError("dual cone in rank 1 is trivial")
        return [(signs.pop(),)]
    from itertools import combinations
    rays = []
    seen = set()
    for subset in combinations(range(len(gens)), dim - 1):
        sub = [gens[i] for i in subset]
        if rank(sub) != dim - 1:
            continue
        basis = nullspace(sub, ncols=dim)
        if len(basis) != 1:
            continue
        cand = basis[0]
        mult = lcm(*[f.denominator for f in cand]) if cand else 1
        vec = primitive_vector([int(f * mult) for f in cand])
        for v in (vec, tuple(-x for x in vec)):
            if all(dot(g, v) >= 0 for g in gens):
                if v not in seen:
                    seen.add(v)
                    rays.append(v)
    return rays
