"""Smith normal form over the integers."""

from .elimination import integer_diagonalize, kernel_basis_z, rank_z, replay_batch
from .matrices import Matrix
from .rings import ZZ

__all__ = ["SmithDecomposition", "smith_normal_form", "integer_kernel_basis", "integer_rank"]


class SmithDecomposition:
    """U M V = D with U, V unimodular and D = diag(d_1 | d_2 | ...)."""

    __slots__ = ("U", "D", "V", "divisors", "rank")

    def __init__(self, U, D, V, divisors):
        self.U = U
        self.D = D
        self.V = V
        self.divisors = divisors
        self.rank = len(divisors)

    def __repr__(self):
        return "SmithDecomposition(divisors=%r)" % (self.divisors,)


def _materialize(ops, size, reverse):
    batch = {i: {i: 1} for i in range(size)}
    replay_batch(ops, batch, reverse=reverse)
    entries = {}
    for i, slots in batch.items():
        for s, v in slots.items():
            entries[(i, s)] = v
    return Matrix.from_entries(ZZ, size, size, entries)


def smith_normal_form(matrix):
    """Full decomposition with materialized U, D, V.

    The divisors are sorted onto the diagonal of D, each dividing the
    next.  Materializing U and V costs dense-square memory, so this is
    for small matrices; the elimination module works log-based for the
    large ones.
    """
    if matrix.ring != ZZ:
        raise ValueError("smith_normal_form expects a matrix over Z")
    dg = integer_diagonalize(matrix)
    U = _materialize(dg.row_ops, matrix.nrows, reverse=False)
    V = _materialize(dg.col_ops, matrix.ncols, reverse=True)
    # permute the scattered pivots onto the leading diagonal, smallest first
    pivots = sorted(dg.pivots, key=lambda p: (p[2], p[0]))
    row_perm = [r for r, _, _ in pivots]
    row_perm += [r for r in range(matrix.nrows) if r not in set(row_perm)]
    col_perm = [c for _, c, _ in pivots]
    col_perm += [c for c in range(matrix.ncols) if c not in set(col_perm)]
    U = U.submatrix(row_perm, list(range(matrix.nrows)))
    V = V.submatrix(list(range(matrix.ncols)), col_perm)
    divisors = tuple(v for _, _, v in pivots)
    D = Matrix.from_entries(
        ZZ, matrix.nrows, matrix.ncols, {(t, t): v for t, v in enumerate(divisors)}
    )
    return SmithDecomposition(U, D, V, divisors)


def integer_kernel_basis(matrix):
    """Basis of ker(M) over Z as a list of dict vectors."""
    if matrix.ring != ZZ:
        raise ValueError("integer kernel needs a matrix over Z")
    return kernel_basis_z(matrix)


def integer_rank(matrix):
    if matrix.ring != ZZ:
        raise ValueError("integer rank needs a matrix over Z")
    return rank_z(matrix)
