"""Sparse exact matrices.

A Matrix stores only its nonzero entries, as a dict of rows, each row a
dict column -> value.  Values are canonical ring elements (int for Z,
F_p and Z/m, Fraction for Q).  Instances are treated as immutable once
built; all arithmetic returns new objects.  numpy only appears at the
dense import and export boundary.
"""

from fractions import Fraction
from math import lcm

import numpy as np

from .rings import ZZ, QQ, CoefficientRing


class Matrix:
    __slots__ = ("ring", "nrows", "ncols", "rows", "_colindex")

    def __init__(self, ring, nrows, ncols, rows=None):
        self.ring = ring
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows if rows is not None else {}
        self._colindex = None

    # -- constructors ------------------------------------------------

    @classmethod
    def zero(cls, ring, nrows, ncols):
        return cls(ring, nrows, ncols)

    @classmethod
    def identity(cls, ring, n):
        one = ring.one()
        return cls(ring, n, n, {i: {i: one} for i in range(n)})

    @classmethod
    def from_rows(cls, ring, data, nrows=None, ncols=None):
        """Build from a dense list of lists (or numpy array)."""
        data = [list(r) for r in data]
        if nrows is None:
            nrows = len(data)
        if ncols is None:
            ncols = len(data[0]) if data else 0
        rows = {}
        for i, rowvals in enumerate(data):
            if len(rowvals) != ncols:
                raise ValueError("ragged row %d" % i)
            row = {}
            for j, v in enumerate(rowvals):
                v = ring.coerce(v)
                if v != 0:
                    row[j] = v
            if row:
                rows[i] = row
        return cls(ring, nrows, ncols, rows)

    @classmethod
    def from_entries(cls, ring, nrows, ncols, entries):
        """Build from {(i, j): value}; entries are accumulated."""
        rows = {}
        for (i, j), v in entries.items():
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise IndexError("entry (%d, %d) out of shape" % (i, j))
            row = rows.setdefault(i, {})
            row[j] = ring.add(row.get(j, ring.zero()), ring.coerce(v))
        for i in list(rows):
            rows[i] = {j: v for j, v in rows[i].items() if v != 0}
            if not rows[i]:
                del rows[i]
        return cls(ring, nrows, ncols, rows)

    @classmethod
    def diagonal(cls, ring, nrows, ncols, values):
        rows = {}
        for i, v in enumerate(values):
            v = ring.coerce(v)
            if v != 0:
                rows[i] = {i: v}
        return cls(ring, nrows, ncols, rows)

    def copy_rows(self):
        """Mutable copy of the row dicts (for elimination engines)."""
        return {i: dict(r) for i, r in self.rows.items()}

    # -- access ------------------------------------------------------

    def __getitem__(self, ij):
        i, j = ij
        return self.rows.get(i, {}).get(j, self.ring.zero())

    def col_index(self):
        """dict column -> sorted list of rows with a nonzero entry."""
        if self._colindex is None:
            idx = {}
            for i, row in self.rows.items():
                for j in row:
                    idx.setdefault(j, []).append(i)
            for j in idx:
                idx[j].sort()
            self._colindex = idx
        return self._colindex

    def column(self, j):
        """Column j as a dict row -> value."""
        out = {}
        for i in self.col_index().get(j, ()):
            out[i] = self.rows[i][j]
        return out

    def nnz(self):
        return sum(len(r) for r in self.rows.values())

    def is_zero(self):
        return not self.rows

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        self._check_shapes(other, same=True)
        ring = self.ring
        rows = {i: dict(r) for i, r in self.rows.items()}
        for i, row in other.rows.items():
            tgt = rows.setdefault(i, {})
            for j, v in row.items():
                s = ring.add(tgt.get(j, ring.zero()), v)
                if s == 0:
                    tgt.pop(j, None)
                else:
                    tgt[j] = s
            if not tgt:
                del rows[i]
        return Matrix(ring, self.nrows, self.ncols, rows)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        ring = self.ring
        rows = {
            i: {j: ring.neg(v) for j, v in row.items()}
            for i, row in self.rows.items()
        }
        return Matrix(ring, self.nrows, self.ncols, rows)

    def scale(self, c):
        ring = self.ring
        c = ring.coerce(c)
        if c == 0:
            return Matrix(ring, self.nrows, self.ncols)
        rows = {}
        for i, row in self.rows.items():
            new = {}
            for j, v in row.items():
                w = ring.mul(c, v)
                if w != 0:
                    new[j] = w
            if new:
                rows[i] = new
        return Matrix(ring, self.nrows, self.ncols, rows)

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ValueError(
                "shape mismatch %dx%d @ %dx%d"
                % (self.nrows, self.ncols, other.nrows, other.ncols)
            )
        ring = self.ring
        rows = {}
        orows = other.rows
        for i, row in self.rows.items():
            acc = {}
            for k, a in row.items():
                orow = orows.get(k)
                if not orow:
                    continue
                for j, b in orow.items():
                    s = acc.get(j, 0) + a * b
                    acc[j] = s
            if ring.kind in ("F", "Zm"):
                m = ring.modulus
                acc = {j: v % m for j, v in acc.items()}
            out = {j: v for j, v in acc.items() if v != 0}
            if out:
                rows[i] = out
        return Matrix(ring, self.nrows, other.ncols, rows)

    def matvec(self, vec):
        """Apply to a column vector given as dict index -> value."""
        ring = self.ring
        acc = {}
        colidx = self.col_index()
        for j, x in vec.items():
            if x == 0:
                continue
            for i in colidx.get(j, ()):
                acc[i] = acc.get(i, 0) + self.rows[i][j] * x
        if ring.kind in ("F", "Zm"):
            m = ring.modulus
            acc = {i: v % m for i, v in acc.items()}
        return {i: v for i, v in acc.items() if v != 0}

    # -- reshaping -----------------------------------------------------

    def transpose(self):
        rows = {}
        for i, row in self.rows.items():
            for j, v in row.items():
                rows.setdefault(j, {})[i] = v
        return Matrix(self.ring, self.ncols, self.nrows, rows)

    @staticmethod
    def vstack(blocks):
        blocks = list(blocks)
        if not blocks:
            raise ValueError("vstack of nothing")
        ring = blocks[0].ring
        ncols = blocks[0].ncols
        rows = {}
        off = 0
        for b in blocks:
            if b.ncols != ncols or b.ring != ring:
                raise ValueError("vstack mismatch")
            for i, row in b.rows.items():
                rows[off + i] = dict(row)
            off += b.nrows
        return Matrix(ring, off, ncols, rows)

    @staticmethod
    def hstack(blocks):
        blocks = list(blocks)
        if not blocks:
            raise ValueError("hstack of nothing")
        ring = blocks[0].ring
        nrows = blocks[0].nrows
        rows = {}
        off = 0
        for b in blocks:
            if b.nrows != nrows or b.ring != ring:
                raise ValueError("hstack mismatch")
            for i, row in b.rows.items():
                tgt = rows.setdefault(i, {})
                for j, v in row.items():
                    tgt[off + j] = v
            off += b.ncols
        return Matrix(ring, nrows, off, rows)

    def submatrix(self, row_sel, col_sel=None):
        """Restrict to the given rows (and columns), reindexed in order."""
        rmap = {r: i for i, r in enumerate(row_sel)}
        cmap = None if col_sel is None else {c: j for j, c in enumerate(col_sel)}
        rows = {}
        for r, i in rmap.items():
            row = self.rows.get(r)
            if not row:
                continue
            if cmap is None:
                new = dict(row)
            else:
                new = {cmap[j]: v for j, v in row.items() if j in cmap}
            if new:
                rows[i] = new
        ncols = self.ncols if cmap is None else len(cmap)
        return Matrix(self.ring, len(rmap), ncols, rows)

    # -- conversions ---------------------------------------------------

    def to_dense(self):
        """Dense numpy object array (exact entries, no floats)."""
        out = np.full((self.nrows, self.ncols), self.ring.zero(), dtype=object)
        for i, row in self.rows.items():
            for j, v in row.items():
                out[i, j] = v
        return out

    def to_lists(self):
        return [
            [self[i, j] for j in range(self.ncols)] for i in range(self.nrows)
        ]

    def to_integer(self):
        """Clear denominators: returns (M_over_Z, scale) with M = M_Z / scale.

        For a Q matrix, scale is the lcm of all denominators; for a Z
        matrix it is 1.  Used to route rational problems through the
        integer elimination engine.
        """
        if self.ring == ZZ:
            return self, 1
        if self.ring != QQ:
            raise ValueError("to_integer expects a Z or Q matrix")
        denoms = [
            v.denominator for row in self.rows.values() for v in row.values()
        ]
        scale = lcm(*denoms) if denoms else 1
        rows = {}
        for i, row in self.rows.items():
            rows[i] = {j: int(v * scale) for j, v in row.items()}
        return Matrix(ZZ, self.nrows, self.ncols, rows), scale

    def change_ring(self, ring):
        rows = {}
        for i, row in self.rows.items():
            new = {}
            for j, v in row.items():
                w = ring.coerce(v)
                if w != 0:
                    new[j] = w
            if new:
                rows[i] = new
        return Matrix(ring, self.nrows, self.ncols, rows)

    # -- misc ----------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.ring == other.ring
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def __hash__(self):
        raise TypeError("Matrix is not hashable")

    def __repr__(self):
        return "Matrix(%s, %dx%d, nnz=%d)" % (
            self.ring.name,
            self.nrows,
            self.ncols,
            self.nnz(),
        )

    def _check_shapes(self, other, same=False):
        if not isinstance(other, Matrix):
            raise TypeError("expected a Matrix")
        if self.ring != other.ring:
            raise ValueError("ring mismatch %s vs %s" % (self.ring.name, other.ring.name))
        if same and (self.nrows != other.nrows or self.ncols != other.ncols):
            raise ValueError("shape mismatch")
