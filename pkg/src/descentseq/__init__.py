"""descentseq: descent (Cech-nerve) spectral sequences for finite simplicial sets.

Exact linear algebra over Z, Q and prime fields; cosimplicial abelian
groups with Dold-Kan normalization; bar-type cosimplicial modules of
graded algebras; finite simplicial sets with products and nerves; and a
descent engine that verifies the vanishing line E2^{pq} = 0 for q < p*k
when the fibers are cohomologically (k-1)-connected.
"""

__version__ = "0.1.0"

from .rings import ZZ, QQ, GF, Zmod, parse_ring
from .matrices import Matrix
from .smith import smith_normal_form, SmithDecomposition
from .presentations import (
    FgAbelianGroup,
    cohomology_at,
    cohomology_mod_m,
    induced_map,
)
from .complexes import CochainComplex, DoubleComplex, total_complex, ss_pages
from .cosimplicial import (
    CosimplicialAbelianGroup,
    associated_complex,
    normalization,
    degenerate_quotient,
    dold_kan_gamma,
)
from .bar import GradedAlgebra, bar_cosimplicial, grading_split, bar_vanishing_check
from .simplicial import (
    FormalSimplex,
    FiniteSimplicialSet,
    SimplicialMap,
    normalized_cochains,
    cohomology_with_coeffs,
    product,
    multi_product,
    cech_nerve,
    nerve_of_map,
)
from .descent import (
    e1_page,
    e2_page,
    connectivity_check,
    vanishing_report,
    abutment_check,
    uct_verify,
    kunneth_dim_check,
)
