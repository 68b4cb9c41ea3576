"""Cochain complexes, double complexes, and filtration spectral sequences.

The double complex here is a truncated window onto something possibly
infinite (a Cech nerve only ever comes with finitely many columns), so
every spectral sequence quantity carries a trust verdict: a cell of a
page is reported only when each cell of the window that enters its
computation is known, either inside the window or known to vanish.
"""

from .elimination import (
    BitEchelon,
    DictEchelon,
    bits_from_dict,
    dict_from_bits,
    kernel_basis_z,
    rank_z,
)
from .errors import CompositionNonzero, FieldRequired, WindowTooSmall
from .matrices import Matrix
from .presentations import cohomology_at, subquotient
from .rings import QQ, ZZ

__all__ = [
    "CochainComplex",
    "PresentedComplex",
    "DoubleComplex",
    "total_complex",
    "ss_pages",
    "SpectralSequencePages",
]


class CochainComplex:
    """Bounded cochain complex with free levels.

    dims maps degree -> rank; diffs maps q -> the matrix of
    d: C^q -> C^{q+1}.  Degrees not present are zero.
    """

    def __init__(self, ring, dims, diffs):
        self.ring = ring
        self.dims = {q: d for q, d in dims.items() if d}
        self.diffs = {q: m for q, m in diffs.items() if m is not None and m.nnz()}
        for q, mat in self.diffs.items():
            if mat.ncols != self.dim(q) or mat.nrows != self.dim(q + 1):
                raise ValueError("differential at %d has shape %dx%d, levels are %d, %d"
                                 % (q, mat.nrows, mat.ncols, self.dim(q + 1), self.dim(q)))

    def dim(self, q):
        return self.dims.get(q, 0)

    def differential(self, q):
        return self.diffs.get(q)

    def degrees(self):
        return sorted(self.dims)

    def validate(self):
        """Check d o d = 0; returns a list of offending degrees."""
        bad = []
        for q in self.diffs:
            nxt = self.diffs.get(q + 1)
            if nxt is not None and not (nxt @ self.diffs[q]).is_zero():
                bad.append(q)
        return bad

    def cohomology(self, q=None, ring=None):
        """Cohomology at one degree, or a dict over all degrees."""
        ring = ring or self.ring
        if q is not None:
            return cohomology_at(self.diffs.get(q - 1), self.diffs.get(q), ring,
                                 dim=self.dim(q))
        degs = set(self.dims)
        degs.update(q2 + 1 for q2 in self.diffs)
        return {q2: self.cohomology(q2, ring) for q2 in sorted(degs)}


class PresentedComplex:
    """Complex whose levels are presented groups, not free modules.

    levels maps degree -> FgAbelianGroup; diffs maps q -> matrix acting
    on generator coordinates.  Cohomology is the subquotient
    {x : d x = 0 in the next level} / (im d + relations), computed over
    the common ring of the levels.
    """

    def __init__(self, levels, diffs):
        self.levels = dict(levels)
        self.diffs = {q: m for q, m in diffs.items() if m is not None}
        rings = {g.ring for g in self.levels.values()}
        if len(rings) > 1:
            raise ValueError("levels live over different rings")
        self.ring = rings.pop() if rings else ZZ

    def level(self, q):
        return self.levels.get(q)

    def validate(self):
        """Degrees where d o d is nonzero modulo the target relations."""
        bad = []
        for q, d1 in self.diffs.items():
            d2 = self.diffs.get(q + 1)
            if d2 is None:
                continue
            comp = d2 @ d1
            tgt = self.levels[q + 2]
            for j in range(comp.ncols):
                col = [comp[(i, j)] for i in range(comp.nrows)]
                if not tgt.class_is_zero(col):
                    bad.append(q)
                    break
        return bad

    def cohomology(self, q):
        lvl = self.levels.get(q)
        if lvl is None or lvl.ngens == 0:
            from .presentations import trivial_group

            return trivial_group(self.ring)
        n = lvl.ngens
        d_out = self.diffs.get(q)
        a = b = None
        if d_out is not None and self.levels.get(q + 1) is not None:
            a = _as_z(d_out)
            b = self.levels[q + 1].relation_matrix()
            if not b.ncols:
                b = None
        parts = []
        d_in = self.diffs.get(q - 1)
        if d_in is not None:
            parts.append(_as_z(d_in))
        rel = lvl.relation_matrix()
        if rel.ncols:
            parts.append(rel)
        k = Matrix.hstack(parts) if parts else None
        return subquotient(a, b, k, self.ring, ambient_dim=n)


def _as_z(m):
    if m.ring == ZZ or m.ring.is_field:
        return m if m.ring == ZZ else m
    return m.change_ring(ZZ)


# ---------------------------------------------------------------------------
# double complexes


class DoubleComplex:
    """First-quadrant double complex window with knownness bookkeeping.

    dims maps (p, q) -> rank.  d_h[(p, q)] maps to (p+1, q) and
    d_v[(p, q)] to (p, q+1); missing blocks between known cells are
    zero.  column_tops[p] gives the highest q known in column p;
    complete_columns marks columns honestly zero above their top (not
    merely truncated), and columns_exhausted says no column exists
    beyond p_max at all.
    """

    def __init__(self, ring, dims, d_h, d_v, column_tops=None, complete_columns=(),
                 columns_exhausted=False, p_max=None):
        self.ring = ring
        self.dims = {pq: d for pq, d in dims.items() if d}
        self.d_h = {pq: m for pq, m in d_h.items() if m is not None and m.nnz()}
        self.d_v = {pq: m for pq, m in d_v.items() if m is not None and m.nnz()}
        tops = dict(column_tops or {})
        for (p, q) in self.dims:
            if tops.get(p, -1) < q:
                tops.setdefault(p, q)
                if tops[p] < q:
                    tops[p] = q
        self.column_tops = tops
        self.complete_columns = set(complete_columns)
        self.columns_exhausted = columns_exhausted
        if p_max is None:
            p_max = max(tops) if tops else -1
        self.p_max = p_max

    def dim(self, p, q):
        return self.dims.get((p, q), 0)

    def is_known(self, p, q):
        if p < 0 or q < 0:
            return True
        if p > self.p_max:
            return self.columns_exhausted
        top = self.column_tops.get(p, -1)
        if q <= top:
            return True
        return p in self.complete_columns

    def validate(self):
        """Cells where a square fails: d_h^2, d_v^2, or commutation."""
        bad = []
        for (p, q) in self.dims:
            h1 = self.d_h.get((p, q))
            h2 = self.d_h.get((p + 1, q))
            if h1 is not None and h2 is not None and not (h2 @ h1).is_zero():
                bad.append(("hh", p, q))
            v1 = self.d_v.get((p, q))
            v2 = self.d_v.get((p, q + 1))
            if v1 is not None and v2 is not None and not (v2 @ v1).is_zero():
                bad.append(("vv", p, q))
            hv = self.d_h.get((p, q + 1))
            vh = self.d_v.get((p + 1, q))
            if v1 is not None and hv is not None:
                lhs = hv @ v1
            else:
                lhs = None
            if h1 is not None and vh is not None:
                rhs = vh @ h1
            else:
                rhs = None
            if lhs is None and rhs is None:
                continue
            z1 = lhs.is_zero() if lhs is not None else True
            z2 = rhs.is_zero() if rhs is not None else True
            if lhs is not None and rhs is not None:
                if lhs != rhs:
                    bad.append(("hv", p, q))
            elif not (z1 and z2):
                bad.append(("hv", p, q))
        return bad


def total_complex(dc):
    """Collapse a double complex to d = d_h + (-1)^p d_v.

    Cells are taken as given, in column order along each antidiagonal;
    the caller owns the question of whether the window covers every
    contributing cell.
    """
    layout = _TotLayout(dc)
    dims = {n: layout.totdim[n] for n in layout.cells}
    diffs = {}
    for n in sorted(layout.cells):
        rows = layout.build_differential(n)
        if rows is None:
            continue
        nxt = layout.totdim.get(n + 1, 0)
        if nxt and layout.totdim[n]:
            diffs[n] = Matrix(dc.ring, nxt, layout.totdim[n], rows)
    tot = CochainComplex(dc.ring, dims, diffs)
    tot.blocks = {n: list(layout.cells[n]) for n in layout.cells}
    return tot


class _TotLayout:
    """Antidiagonal layout of a double complex window."""

    def __init__(self, dc, integral=False):
        self.dc = dc
        self.integral = integral
        self.cells = {}   # n -> list of (p, q, offset, dim), p ascending
        self.offset = {}  # (p, q) -> offset
        self.totdim = {}
        for (p, q), d in sorted(dc.dims.items()):
            self.cells.setdefault(p + q, [])
        for n in self.cells:
            off = 0
            row = []
            for p in range(0, n + 1):
                q = n - p
                d = dc.dim(p, q)
                if d:
                    row.append((p, q, off, d))
                    self.offset[(p, q)] = off
                    off += d
            self.cells[n] = row
            self.totdim[n] = off
        self._diff_cache = {}

    def _block_entries(self, mat, roff, coff, sign, rows):
        for i, r in mat.rows.items():
            tgt = rows.setdefault(roff + i, {})
            for j, v in r.items():
                if self.integral:
                    v = _int_of(v)
                nv = tgt.get(coff + j, 0) + (v if sign > 0 else -v)
                if nv:
                    tgt[coff + j] = nv
                else:
                    del tgt[coff + j]

    def build_differential(self, n):
        """Dict-of-rows of Tot^n -> Tot^{n+1}, or None when empty."""
        if n in self._diff_cache:
            return self._diff_cache[n]
        if not self.cells.get(n) or not self.cells.get(n + 1):
            self._diff_cache[n] = None
            return None
        rows = {}
        for (p, q, off, d) in self.cells[n]:
            h = self.dc.d_h.get((p, q))
            if h is not None and (p + 1, q) in self.offset:
                self._block_entries(h, self.offset[(p + 1, q)], off, 1, rows)
            v = self.dc.d_v.get((p, q))
            if v is not None and (p, q + 1) in self.offset:
                sign = 1 if p % 2 == 0 else -1
                self._block_entries(v, self.offset[(p, q + 1)], off, sign, rows)
        self._diff_cache[n] = rows
        return rows

    def columns_of(self, n, pmin, row_pred):
        """Columns (as dicts over selected rows) of the restriction of
        the differential Tot^n -> Tot^{n+1} to domain cells with
        p >= pmin and target rows selected by row_pred on (p, q).

        Returns (domain_index, cols) where domain_index lists global
        column offsets and cols are dicts over re-indexed rows.
        """
        rows = self.build_differential(n) or {}
        # select target rows
        rowmap = {}
        for (p, q, off, d) in self.cells.get(n + 1, ()):
            if row_pred(p, q):
                for i in range(d):
                    rowmap[off + i] = len(rowmap)
        dom = []
        for (p, q, off, d) in self.cells.get(n, ()):
            if p >= pmin:
                dom.extend(range(off, off + d))
        cols = [dict() for _ in dom]
        colpos = {g: s for s, g in enumerate(dom)}
        for gi, r in rows.items():
            ri = rowmap.get(gi)
            if ri is None:
                continue
            for gj, v in r.items():
                s = colpos.get(gj)
                if s is not None:
                    cols[s][ri] = v
        return dom, cols, len(rowmap)


def _int_of(v):
    if isinstance(v, int):
        return v
    return int(v)


# ---------------------------------------------------------------------------
# spectral sequence pages


class SpectralSequencePages:
    """Trusted window of the filtration spectral sequence of a double
    complex, by increasing page number.

    pages[r] maps (p, q) to a dimension for every trusted cell; the
    sets trusted[r] say which cells those are.  e_infinity and abutment
    carry the same trust discipline.
    """

    def __init__(self, ring, r_max, window):
        self.ring = ring
        self.r_max = r_max
        self.window = window
        self.pages = {}
        self.trusted = {}
        self.e_infinity = {}
        self.e_infinity_trusted = set()
        self.abutment = {}
        self.abutment_trusted = set()

    def page(self, r):
        return self.pages.get(r, {})

    def dim_at(self, r, p, q):
        if (p, q) not in self.trusted.get(r, ()):
            return None
        return self.pages[r].get((p, q), 0)


def ss_pages(dc, r_max, ring=None, window=None):
    """Pages E_1 .. E_r_max of the filtration spectral sequence.

    Needs exact division: over Q the arithmetic runs on cleared integer
    matrices, over F_p on the field engines; raises FieldRequired for
    Z.  Cells are reported only where every touched cell of the window
    is known; if no cell of the final page is trusted the window was
    pointless and WindowTooSmall is raised.
    """
    ring = ring or dc.ring
    if not (ring == QQ or ring.is_field):
        raise FieldRequired("spectral sequence pages need Q or a finite field")
    use_z = ring == QQ
    dc2 = _coerce_window(dc, ring, use_z)
    layout = _TotLayout(dc2, integral=use_z)
    if window is None:
        qtop = max(dc2.column_tops.values()) if dc2.column_tops else -1
        window = (dc2.p_max, qtop)
    pmax_w, qmax_w = window

    result = SpectralSequencePages(ring, r_max, window)
    eng = _ZLinAlg() if use_z else (_F2LinAlg() if ring.modulus == 2 else _FpLinAlg(ring))

    for r in range(1, r_max + 1):
        dims = {}
        trusted = set()
        for p in range(0, pmax_w + 1):
            for q in range(0, qmax_w + 1):
                if not _trusted_cell(dc2, p, q, r):
                    continue
                trusted.add((p, q))
                d = _page_dim(layout, eng, p, q, r)
                if d:
                    dims[(p, q)] = d
        result.pages[r] = dims
        result.trusted[r] = trusted
    if not result.trusted.get(r_max):
        raise WindowTooSmall("no cell of the window survives trust checks at page %d"
                             % r_max)

    for p in range(0, pmax_w + 1):
        for q in range(0, qmax_w + 1):
            rstar = max(p, q + 1) + 1
            if not _trusted_cell(dc2, p, q, rstar):
                continue
            result.e_infinity_trusted.add((p, q))
            d = _page_dim(layout, eng, p, q, rstar)
            if d:
                result.e_infinity[(p, q)] = d

    for n in range(0, pmax_w + qmax_w + 1):
        if not all(_antidiag_known(dc2, m) for m in (n - 1, n, n + 1)):
            continue
        result.abutment_trusted.add(n)
        dim_n = layout.totdim.get(n, 0)
        _, cols_out, _ = layout.columns_of(n, 0, lambda p, q: True)
        rank_out = eng.span_rank(cols_out)
        _, cols_in, _ = layout.columns_of(n - 1, 0, lambda p, q: True)
        rank_in = eng.span_rank(cols_in)
        d = dim_n - rank_out - rank_in
        if d:
            result.abutment[n] = d
    return result


def dr_rank(dc, p, q, r, ring=None):
    """Rank of the page-r differential out of (p, q).

    Meant for fully known windows; raises WindowTooSmall when the
    touched region is not known.
    """
    ring = ring or dc.ring
    if not (ring == QQ or ring.is_field):
        raise FieldRequired("spectral sequence pages need Q or a finite field")
    use_z = ring == QQ
    dc2 = _coerce_window(dc, ring, use_z)
    layout = _TotLayout(dc2, integral=use_z)
    eng = _ZLinAlg() if use_z else (_F2LinAlg() if ring.modulus == 2 else _FpLinAlg(ring))
    n = p + q
    needed = _trusted_cell(dc2, p, q, r) and _trusted_cell(dc2, p + r, q - r + 1, r)
    for pp in range(p, n + 2):
        if not dc2.is_known(pp, n + 1 - pp):
            needed = False
    if not needed:
        raise WindowTooSmall("window does not determine d_%d at (%d, %d)" % (r, p, q))
    zr = _z_basis(layout, eng, p, q, r, n)
    imgs = [_apply_tot(layout, n, v) for v in zr]
    tgt_b = _boundary_basis(layout, eng, p + r, q - r + 1, r)
    base = eng.span_rank(list(tgt_b))
    return eng.span_rank(list(tgt_b) + imgs) - base


def _coerce_window(dc, ring, use_z):
    """Rebuild the window's blocks over the computation ring."""
    if use_z:
        lam = 1
        from fractions import Fraction

        for blocks in (dc.d_h, dc.d_v):
            for m in blocks.values():
                if m.ring == QQ:
                    for row in m.rows.values():
                        for v in row.values():
                            if isinstance(v, Fraction) and v.denominator != 1:
                                lam = lam * v.denominator // _gcd(lam, v.denominator)
        if lam == 1 and all(m.ring == ZZ for bl in (dc.d_h, dc.d_v) for m in bl.values()):
            return dc
        conv = lambda m: m.scale(lam).to_integer()[0] if m.ring == QQ else m
    else:
        conv = lambda m: m.change_ring(ring) if m.ring != ring else m
    d_h = {pq: conv(m) for pq, m in dc.d_h.items()}
    d_v = {pq: conv(m) for pq, m in dc.d_v.items()}
    return DoubleComplex(ZZ if use_z else ring, dc.dims, d_h, d_v,
                         column_tops=dc.column_tops,
                         complete_columns=dc.complete_columns,
                         columns_exhausted=dc.columns_exhausted, p_max=dc.p_max)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _trusted_cell(dc, p, q, r):
    """Every window cell touched by E_r(p, q) must be known."""
    n = p + q
    if r == 1:
        return all(dc.is_known(p, qq) for qq in (q - 1, q, q + 1))
    floor = max(p - r + 1, 0)
    for pp in range(floor, n):
        if not dc.is_known(pp, n - 1 - pp):
            return False
    for pp in range(floor, n + 1):
        if not dc.is_known(pp, n - pp):
            return False
    hi = min(p + r - 1, n + 1)
    for pp in range(p, hi + 1):
        if not dc.is_known(pp, n + 1 - pp):
            return False
    return True


def _antidiag_known(dc, n):
    if n < 0:
        return True
    return all(dc.is_known(p, n - p) for p in range(0, n + 1))


def _page_dim(layout, eng, p, q, r):
    n = p + q
    if layout.totdim.get(n, 0) == 0:
        return 0
    if r == 1:
        return _vertical_h_dim(layout, eng, p, q)
    zdim = _z_dim(layout, eng, p, q, r, n)
    if zdim == 0:
        return 0
    bdim = eng.span_rank(list(_boundary_basis(layout, eng, p, q, r)))
    if bdim > zdim:
        raise AssertionError("boundaries exceed cycles at (%d, %d) page %d" % (p, q, r))
    return zdim - bdim


def _vertical_h_dim(layout, eng, p, q):
    dc = layout.dc
    d = dc.dim(p, q)
    if d == 0:
        return 0
    out = dc.d_v.get((p, q))
    rank_out = eng.matrix_rank(out) if out is not None else 0
    inc = dc.d_v.get((p, q - 1))
    rank_in = eng.matrix_rank(inc) if inc is not None else 0
    return d - rank_out - rank_in


def _z_cols(layout, p, q, r, n):
    floor = p
    hi = p + r - 1
    return layout.columns_of(n, floor, lambda pp, qq: pp <= hi)


def _z_dim(layout, eng, p, q, r, n):
    dom, cols, _ = _z_cols(layout, p, q, r, n)
    if not dom:
        return 0
    return len(dom) - eng.span_rank(cols)


def _z_basis(layout, eng, p, q, r, n):
    """Kernel basis of Z_r^{pq} as dicts over global Tot^n coords."""
    dom, cols, nrows = _z_cols(layout, p, q, r, n)
    if not dom:
        return []
    combos = eng.kernel(cols, nrows)
    return [{dom[s]: v for s, v in combo.items()} for combo in combos]


def _apply_tot(layout, n, vec):
    rows = layout.build_differential(n) or {}
    out = {}
    for gi, r in rows.items():
        acc = 0
        for gj, v in r.items():
            x = vec.get(gj)
            if x:
                acc += v * x
        if acc:
            out[gi] = acc
    return out


def _boundary_basis(layout, eng, p, q, r):
    """Spanning set of Z_{r-1}^{p+1,q-1} + d Z' inside Tot^{p+q}."""
    n = p + q
    out = []
    out.extend(_z_basis(layout, eng, p + 1, q - 1, r - 1))
    # Z' = {x in F^{max(p-r+1,0)} Tot^{n-1} : d x in F^p}
    floor = max(p - r + 1, 0)
    dom, cols, nrows = layout.columns_of(n - 1, floor, lambda pp, qq: floor <= pp < p)
    if dom:
        combos = eng.kernel(cols, nrows)
        for combo in combos:
            vec = {dom[s]: v for s, v in combo.items()}
            img = _apply_tot(layout, n - 1, vec)
            if img:
                out.append(img)
    return out


# Z_{r}^{pq} for r-1 = 0 needs the convention Z_0 = F^p with no
# constraint; columns_of with an empty row zone returns full kernels.


# ---------------------------------------------------------------------------
# little linear algebra adapters


class _ZLinAlg:
    """Rational dimensions through the exact integer engine."""

    def span_rank(self, cols):
        cols = [c for c in cols if c]
        if not cols:
            return 0
        rows = {}
        for j, col in enumerate(cols):
            for i, v in col.items():
                rows.setdefault(i, {})[j] = _int_of(v)
        m = Matrix(ZZ, 1 + max(rows), len(cols), rows)
        return rank_z(m)

    def matrix_rank(self, m):
        if m.ring != ZZ:
            m = m.to_integer()[0]
        return rank_z(m)

    def kernel(self, cols, nrows):
        rows = {}
        for j, col in enumerate(cols):
            for i, v in col.items():
                rows.setdefault(i, {})[j] = _int_of(v)
        m = Matrix(ZZ, nrows or 1, len(cols), rows)
        return kernel_basis_z(m)


class _FpLinAlg:
    def __init__(self, ring):
        self.ring = ring

    def span_rank(self, cols):
        ech = DictEchelon(self.ring)
        for col in cols:
            if col:
                ech.add({i: self.ring.coerce(v) for i, v in col.items()})
        return ech.rank

    def matrix_rank(self, m):
        if m.ring != self.ring:
            m = m.change_ring(self.ring)
        return self.span_rank([m.column(j) for j in range(m.ncols)])

    def kernel(self, cols, nrows):
        ech = DictEchelon(self.ring)
        out = []
        for j, col in enumerate(cols):
            combo = ech.add({i: self.ring.coerce(v) for i, v in col.items()},
                            {j: self.ring.one()})
            if combo is not None:
                out.append(combo)
        return out


class _F2LinAlg:
    def span_rank(self, cols):
        ech = BitEchelon()
        n = 0
        for col in cols:
            b = bits_from_dict(col)
            if b and ech.add(b) is None:
                n += 1
        return n

    def matrix_rank(self, m):
        return self.span_rank([m.column(j) for j in range(m.ncols)])

    def kernel(self, cols, nrows):
        ech = BitEchelon(offset=nrows)
        out = []
        for j, col in enumerate(cols):
            dep = ech.add(bits_from_dict(col) | (1 << (nrows + j)))
            if dep is not None:
                out.append(dict_from_bits(dep))
        return out
