"""Exact verification that intersection-number generating functions on
toric moduli spaces match series expansions of toric residues.

The package is pure Python over ``fractions.Fraction``; every comparison
it makes is exact.
"""

from .errors import (CapExceededError, DegenerateError, GeometryError,
                     InputError, ReconstructionError, TrmcError)
from .multipoly import (MultiPoly, RationalFunctionMV, TruncatedSeries,
                        UniRationalFunction, laurent_expand_at_vertex,
                        monomial_substitution, rational_reconstruct)
from .polytopes import (CoherenceCertificate, LatticePolytope,
                        SecondaryVertex, Simplex, Triangulation,
                        characteristic_function, coherence_certificate,
                        validate_triangulation, verify_certificate)
from .toric import (Fan, MoriCone, ToricVariety, fan_from_triangulation,
                    enumerate_mori_points, mori_cone, relation_lattice)
from .moduli import (CoefficientTable, ModuliSpace, generating_function,
                     intersection_coefficient, moduli_polytope,
                     moduli_space, virtual_class)
from .residues import (CurveSpec, ResidueFunctional, ResidueInput,
                       graded_basis, hessian, product_series, residue_curve,
                       residue_eval, weighted_projective_residue,
                       weighted_projective_series, yukawa_eval)

__version__ = "0.1.0"
