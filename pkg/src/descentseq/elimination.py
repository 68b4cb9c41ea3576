"""Sparse elimination engines with replayable operation logs.

The integer engine diagonalizes a sparse matrix by unimodular row and
column operations, recording every elementary step.  U and V are never
materialized for large inputs; instead the logs are replayed onto
vectors or batches of vectors.  With U M V = D (D has at most one
nonzero per row and column, at the recorded pivot positions) the log
replays give kernels, solutions of M w = b, and coordinate changes.

Vector semantics of a recorded op, derived from the elementary matrix
it stands for:

  row op  ("axpy", i, j, c)   row_i += c * row_j      E = I + c e_i e_j^T (left)
  col op  ("axpy", i, j, c)   col_j += c * col_i      E = I + c e_i e_j^T (right)
  either  ("scale", i, u)     row_i (col_i) *= u      u is a unit

Both kinds act on a coordinate vector x by x_i += c * x_j, which is why
a single replay routine serves all four products:

  U x      row ops, forward          U^-1 x   row ops, reversed, inverted
  V x      col ops, reversed         V^-1 x   col ops, forward, inverted
"""

import heapq

from .rings import ZZ


class Diagonalization:
    """Result of the integer elimination: pivots plus op logs."""

    __slots__ = ("nrows", "ncols", "pivots", "row_ops", "col_ops")

    def __init__(self, nrows, ncols, pivots, row_ops, col_ops):
        self.nrows = nrows
        self.ncols = ncols
        self.pivots = pivots  # list of (row, col, value), values > 0
        self.row_ops = row_ops
        self.col_ops = col_ops

    @property
    def rank(self):
        return len(self.pivots)

    def divisors(self):
        return tuple(sorted(v for _, _, v in self.pivots))


def replay(ops, vec, reverse=False, invert=False):
    """Apply an op log to a vector (dict index -> value), in place."""
    seq = reversed(ops) if reverse else ops
    for op in seq:
        if op[0] == "axpy":
            _, i, j, c = op
            vj = vec.get(j)
            if vj:
                if invert:
                    c = -c
                nv = vec.get(i, 0) + c * vj
                if nv:
                    vec[i] = nv
                else:
                    vec.pop(i, None)
        else:  # scale by a unit, self inverse over Z since u = -1
            _, i, u = op
            vi = vec.get(i)
            if vi:
                vec[i] = u * vi
    return vec


def replay_batch(ops, batch, reverse=False, invert=False):
    """Same as replay, for many vectors at once.

    batch maps coordinate -> dict(slot -> value); slot identifies the
    vector.  Each axpy touches one batch row, so the cost is the nnz of
    the source row, independent of how many vectors ride along.
    """
    seq = reversed(ops) if reverse else ops
    for op in seq:
        if op[0] == "axpy":
            _, i, j, c = op
            rj = batch.get(j)
            if rj:
                if invert:
                    c = -c
                ri = batch.get(i)
                if ri is None:
                    ri = batch[i] = {}
                for s, v in rj.items():
                    nv = ri.get(s, 0) + c * v
                    if nv:
                        ri[s] = nv
                    else:
                        del ri[s]
                if not ri:
                    del batch[i]
        else:
            _, i, u = op
            ri = batch.get(i)
            if ri:
                for s in ri:
                    ri[s] = u * ri[s]
    return batch


def diagonalize(rows, nrows, ncols):
    """Diagonalize a sparse integer matrix, consuming `rows`.

    rows is a dict row -> dict col -> int, mutated in place.  Returns a
    Diagonalization whose pivot values are positive and pairwise
    divisible (each divides the next in sorted order).
    """
    colidx = {}
    for i, row in rows.items():
        for j in row:
            colidx.setdefault(j, set()).add(i)

    row_ops = []
    col_ops = []
    pivots = []
    done_rows = set()
    done_cols = set()

    def row_axpy(i, j, c):
        row_ops.append(("axpy", i, j, c))
        rj = rows[j]
        ri = rows.get(i)
        if ri is None:
            ri = rows[i] = {}
        for col, v in rj.items():
            nv = ri.get(col, 0) + c * v
            if nv:
                if col not in ri:
                    colidx.setdefault(col, set()).add(i)
                ri[col] = nv
            else:
                del ri[col]
                colidx[col].discard(i)
        if not ri:
            del rows[i]

    def row_scale(i, u):
        row_ops.append(("scale", i, u))
        ri = rows.get(i)
        if ri:
            for col in ri:
                ri[col] = u * ri[col]

    def col_axpy(i, j, c):
        col_ops.append(("axpy", i, j, c))
        for r in list(colidx.get(i, ())):
            v = c * rows[r][i]
            ri = rows[r]
            nv = ri.get(j, 0) + v
            if nv:
                if j not in ri:
                    colidx.setdefault(j, set()).add(r)
                ri[j] = nv
            else:
                del ri[j]
                colidx[j].discard(r)

    def eliminate_at(r, c):
        """Clear row r and column c down to a single positive pivot."""
        while True:
            v = rows[r][c]
            if v < 0:
                row_scale(r, -1)
                v = -v
            moved = False
            for r2 in list(colidx[c]):
                if r2 == r:
                    continue
                q = rows[r2][c] // v
                if q:
                    row_axpy(r2, r, -q)
            best = None
            for r2 in colidx[c]:
                if r2 != r and (best is None or rows[r2][c] < rows[best][c]):
                    best = r2
            if best is not None:
                r = best  # smaller remainder takes over as pivot row
                continue
            for c2 in list(rows[r]):
                if c2 == c:
                    continue
                q = rows[r][c2] // v
                if q:
                    col_axpy(c, c2, -q)
            best = None
            for c2 in rows[r]:
                if c2 != c and (best is None or rows[r][c2] < rows[r][best]):
                    best = c2
            if best is not None:
                c = best
                moved = True
            if not moved:
                return r, c, rows[r][c]

    # lazy heap of active columns keyed by fill degree
    heap = [(len(rs), j) for j, rs in colidx.items()]
    heapq.heapify(heap)

    while heap:
        nnz, j = heapq.heappop(heap)
        if j in done_cols:
            continue
        live = colidx.get(j)
        if not live:
            continue
        if len(live) != nnz:
            heapq.heappush(heap, (len(live), j))
            continue
        # choose the entry: unit values first, then small fill-in
        best_key = None
        best_rc = None
        for r in live:
            v = rows[r][j]
            key = (abs(v) != 1, abs(v), (len(rows[r]) - 1) * (nnz - 1), r)
            if best_key is None or key < best_key:
                best_key = key
                best_rc = r
        r, c, v = eliminate_at(best_rc, j)
        pivots.append((r, c, v))
        done_rows.add(r)
        done_cols.add(c)
        if c != j and colidx.get(j):
            # the pivot drifted to another column mid-elimination and
            # this one still has entries; its heap ticket was spent
            heapq.heappush(heap, (len(colidx[j]), j))

    _fix_divisibility(rows, pivots, row_axpy, row_scale, col_axpy)
    return Diagonalization(nrows, ncols, pivots, row_ops, col_ops)


def _fix_divisibility(rows, pivots, row_axpy, row_scale, col_axpy):
    """Make pivot values pairwise divisible, in place."""
    while True:
        pivots.sort(key=lambda p: p[2])
        bad = None
        for i in range(len(pivots) - 1):
            if pivots[i + 1][2] % pivots[i][2]:
                bad = i
                break
        if bad is None:
            return
        ra, ca, a = pivots[bad]
        rb, cb, b = pivots[bad + 1]
        col_axpy(cb, ca, 1)  # col ca picks up b at row rb
        while rows.get(rb, {}).get(ca, 0):
            q = rows.get(ra, {}).get(ca, 0) // rows[rb][ca]
            if q:
                row_axpy(ra, rb, -q)
            ra, rb = rb, ra
        g = rows[ra][ca]
        if g < 0:
            row_scale(ra, -1)
            g = -g
        t = rows[ra].get(cb, 0)
        if t:
            if t % g:
                raise AssertionError("gcd does not divide block entry")
            col_axpy(ca, cb, -(t // g))
        u = rows[rb].get(cb, 0)
        if u < 0:
            row_scale(rb, -1)
            u = -u
        if u == 0 or u % g:
            raise AssertionError("divisibility fix left a bad pair")
        pivots[bad] = (ra, ca, g)
        pivots[bad + 1] = (rb, cb, u)


def integer_diagonalize(matrix):
    """Diagonalize a Matrix over Z without consuming it."""
    if matrix.ring != ZZ:
        raise ValueError("integer engine needs a Z matrix")
    return diagonalize(matrix.copy_rows(), matrix.nrows, matrix.ncols)


def rank_z(matrix):
    return integer_diagonalize(matrix).rank


def kernel_basis_z(matrix, dg=None):
    """Basis of the integer kernel, as a list of dict vectors."""
    if dg is None:
        dg = integer_diagonalize(matrix)
    pivot_cols = {c for _, c, _ in dg.pivots}
    free_cols = [c for c in range(dg.ncols) if c not in pivot_cols]
    batch = {c: {s: 1} for s, c in enumerate(free_cols)}
    replay_batch(dg.col_ops, batch, reverse=True)
    vecs = [dict() for _ in free_cols]
    for coord, slots in batch.items():
        for s, v in slots.items():
            vecs[s][coord] = v
    return vecs


def solve_z(dg, b):
    """One solution w of M w = b given the diagonalization of M.

    Returns a dict vector, or None when no integer solution exists.
    """
    y = replay(dg.row_ops, dict(b))
    w = {}
    for r, c, v in dg.pivots:
        yr = y.pop(r, 0)
        if yr % v:
            return None
        q = yr // v
        if q:
            w[c] = q
    if any(y.values()):
        return None
    return replay(dg.col_ops, w, reverse=True)


def solve_batch_z(dg, columns):
    """Solve M w = b for each dict vector in `columns` at once.

    Returns a list parallel to columns, entries dict or None.
    """
    batch = {}
    for s, col in enumerate(columns):
        for i, v in col.items():
            batch.setdefault(i, {})[s] = v
    replay_batch(dg.row_ops, batch)
    n = len(columns)
    ok = [True] * n
    wbatch = {}
    pivot_rows = set()
    for r, c, v in dg.pivots:
        pivot_rows.add(r)
        slots = batch.get(r)
        if not slots:
            continue
        out = {}
        for s, yr in slots.items():
            if yr % v:
                ok[s] = False
            else:
                q = yr // v
                if q:
                    out[s] = q
        if out:
            wbatch[c] = out
    for r, slots in batch.items():
        if r in pivot_rows:
            continue
        for s, val in slots.items():
            if val:
                ok[s] = False
    replay_batch(dg.col_ops, wbatch, reverse=True)
    sols = [dict() if ok[s] else None for s in range(n)]
    for c, slots in wbatch.items():
        for s, v in slots.items():
            if ok[s] and v:
                sols[s][c] = v
    return sols


def transform_columns_vinv(dg, matrix_rows):
    """Compute V^-1 A for a dict-of-rows matrix A, in place."""
    return replay_batch(dg.col_ops, matrix_rows, invert=True)


# ---------------------------------------------------------------------------
# field engines


class DictEchelon:
    """Column echelon over a field, vectors as dicts, with combos.

    Every stored pivot (vec, combo) is normalized so the leading entry
    is 1.  The meaning of `combo` is up to the caller; reduce() keeps
    the invariant input = residual + sum(acc[g] * combo basis).
    """

    __slots__ = ("ring", "pivots")

    def __init__(self, ring):
        self.ring = ring
        self.pivots = {}

    @property
    def rank(self):
        return len(self.pivots)

    def reduce(self, vec, acc=None):
        ring = self.ring
        vec = {k: v for k, v in vec.items() if v != 0}
        if acc is None:
            acc = {}
        while vec:
            p = min(vec)
            ent = self.pivots.get(p)
            if ent is None:
                break
            pv, pc = ent
            c = vec[p]
            for k, v in pv.items():
                nv = ring.sub(vec.get(k, ring.zero()), ring.mul(c, v))
                if nv == 0:
                    vec.pop(k, None)
                else:
                    vec[k] = nv
            for k, v in pc.items():
                nv = ring.add(acc.get(k, ring.zero()), ring.mul(c, v))
                if nv == 0:
                    acc.pop(k, None)
                else:
                    acc[k] = nv
        return vec, acc

    def add(self, vec, combo=None):
        """Insert vec; returns None if independent, else its combo.

        The returned combo expresses vec in terms of previously added
        combos (combo argument minus the accumulated reduction).
        """
        ring = self.ring
        res, acc = self.reduce(vec)
        rc = dict(combo) if combo else {}
        for k, v in acc.items():
            nv = ring.sub(rc.get(k, ring.zero()), v)
            if nv == 0:
                rc.pop(k, None)
            else:
                rc[k] = nv
        if res:
            p = min(res)
            inv = ring.inv(res[p])
            pv = {k: ring.mul(inv, v) for k, v in res.items()}
            pc = {k: ring.mul(inv, v) for k, v in rc.items()}
            self.pivots[p] = (pv, pc)
            return None
        return rc


class BitEchelon:
    """Column echelon over F2 with python-int bitset vectors.

    With offset=k the low k bits are the vector and the high bits carry
    a combination; reduction stops once the low part is exhausted, so
    add() returns the combination exactly when the vector is dependent.
    """

    __slots__ = ("pivots", "offset", "lowmask")

    def __init__(self, offset=None):
        self.pivots = {}
        self.offset = offset
        self.lowmask = (1 << offset) - 1 if offset is not None else None

    @property
    def rank(self):
        return len(self.pivots)

    def reduce(self, v):
        pivots = self.pivots
        lowmask = self.lowmask
        while True:
            low = v & lowmask if lowmask is not None else v
            if not low:
                return v
            b = (low & -low).bit_length() - 1
            pv = pivots.get(b)
            if pv is None:
                return v
            v ^= pv

    def add(self, v):
        """Insert; None if a new pivot was created, else the combo part."""
        v = self.reduce(v)
        low = v & self.lowmask if self.lowmask is not None else v
        if low:
            b = (low & -low).bit_length() - 1
            self.pivots[b] = v
            return None
        return v >> self.offset if self.offset is not None else 0


def bits_from_dict(vec):
    x = 0
    for i, v in vec.items():
        if v & 1:
            x |= 1 << i
    return x


def dict_from_bits(x):
    out = {}
    while x:
        b = (x & -x).bit_length() - 1
        out[b] = 1
        x &= x - 1
    return out
