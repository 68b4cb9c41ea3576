"""Finitely generated abelian groups presented by cocycle lifts.

Every cohomology-type computation here returns an FgAbelianGroup: the
invariants (rank, torsion divisors), one ambient lift per generator,
and a solver that writes an arbitrary ambient vector as coordinates in
the generators, raising NotWellDefined when the vector is not in the
subgroup being presented.

Two integer cores:

  * cohomology_at       ker(d_out)/im(d_in) on free cochain levels,
                        done with two log-based diagonalizations and no
                        materialized kernel basis.
  * subquotient         {x : A x in colspan B} / colspan K, the shape
                        shared by mod-m cohomology, normalization
                        kernels and cohomology of presented complexes.

Field coefficients get echelon-based counterparts, with a bitset fast
path for F2.
"""

from fractions import Fraction

from .elimination import (
    BitEchelon,
    Diagonalization,
    DictEchelon,
    bits_from_dict,
    dict_from_bits,
    diagonalize,
    kernel_basis_z,
    replay,
    replay_batch,
    solve_batch_z,
    solve_z,
)
from .errors import CompositionNonzero, NotWellDefined
from .matrices import Matrix
from .rings import QQ, ZZ, Zmod, canonical_divisors, format_abelian

__all__ = [
    "FgAbelianGroup",
    "free_group",
    "cohomology_at",
    "cohomology_mod_m",
    "subquotient",
    "induced_map",
    "tensor_invariants",
    "tor_invariants",
    "sum_invariants",
]


class FgAbelianGroup:
    """A finitely generated abelian group (or module) with lifts.

    Generators are ordered torsion first, by increasing order, then the
    free ones.  `coords` sends an ambient vector to canonical generator
    coordinates and raises NotWellDefined for vectors that do not
    represent a class.
    """

    __slots__ = ("ring", "rank", "torsion", "ambient_dim", "_lifts", "_solver")

    def __init__(self, ring, rank, torsion, ambient_dim, lifts=None, solver=None):
        self.ring = ring
        self.rank = rank
        self.torsion = tuple(torsion)
        self.ambient_dim = ambient_dim
        self._lifts = lifts
        self._solver = solver

    @property
    def ngens(self):
        return len(self.torsion) + self.rank

    @property
    def orders(self):
        return self.torsion + (0,) * self.rank

    def invariants(self):
        return (self.rank, self.torsion)

    def is_trivial(self):
        return self.rank == 0 and not self.torsion

    def order(self):
        """Number of elements, or None for infinite groups."""
        if self.rank:
            return None
        n = 1
        for d in self.torsion:
            n *= d
        return n

    def lift(self, i):
        if self._lifts is None:
            raise ValueError("group was built without generator lifts")
        return dict(self._lifts[i])

    @property
    def generator_lifts(self):
        entries = {}
        for i in range(self.ngens):
            for r, v in self._lifts[i].items():
                entries[(r, i)] = v
        return Matrix.from_entries(self.ring, self.ambient_dim, self.ngens, entries)

    def coords(self, vec):
        if self._solver is None:
            raise ValueError("group was built without a coordinate solver")
        return self._solver.coords(vec)

    def reduce_coords(self, coords):
        """Canonicalize a coordinate list against the generator orders."""
        out = []
        for v, d in zip(coords, self.orders):
            out.append(v % d if d else self.ring.coerce(v))
        return out

    def class_is_zero(self, coords):
        return all(v == 0 for v in self.reduce_coords(coords))

    def relation_matrix(self):
        """Columns d_i e_i for the torsion generators, over Z."""
        entries = {(i, i): d for i, d in enumerate(self.torsion)}
        return Matrix.from_entries(ZZ, self.ngens, len(self.torsion), entries)

    def __str__(self):
        if self.ring == QQ:
            return "0" if self.rank == 0 else ("Q" if self.rank == 1 else "Q^%d" % self.rank)
        if self.ring.kind == "F":
            if self.rank == 0:
                return "0"
            base = "F%d" % self.ring.modulus
            return base if self.rank == 1 else "%s^%d" % (base, self.rank)
        return format_abelian(self.rank, self.torsion)

    def __repr__(self):
        return "FgAbelianGroup(%s over %s)" % (self, self.ring.name)


class _FreeSolver:
    __slots__ = ("ring", "n")

    def __init__(self, ring, n):
        self.ring = ring
        self.n = n

    def coords(self, vec):
        return [self.ring.coerce(vec.get(i, 0)) for i in range(self.n)]


def free_group(ring, n):
    lifts = [{i: ring.one()} for i in range(n)]
    return FgAbelianGroup(ring, n, (), n, lifts, _FreeSolver(ring, n))


def trivial_group(ring):
    return FgAbelianGroup(ring, 0, (), 0, [], None)


# ---------------------------------------------------------------------------
# integer cohomology of free levels


def _empty_diag(nrows, ncols):
    return Diagonalization(nrows, ncols, [], [], [])


def _gens_from_relation_diag(dg, space_dim):
    """Generator rows and orders of Z^space_dim / colspan(relations)."""
    torsion = []
    pivot_rows = set()
    for r, _, v in dg.pivots:
        pivot_rows.add(r)
        if v >= 2:
            torsion.append((v, r))
    torsion.sort()
    free_rows = [r for r in range(space_dim) if r not in pivot_rows]
    gen_rows = [r for _, r in torsion] + free_rows
    orders = tuple(v for v, _ in torsion) + (0,) * len(free_rows)
    return gen_rows, orders


class _ZCohomSolver:
    __slots__ = ("dg_out", "pivot_cols", "free_pos", "dg2", "gen_rows", "orders")

    def __init__(self, dg_out, pivot_cols, free_pos, dg2, gen_rows, orders):
        self.dg_out = dg_out
        self.pivot_cols = pivot_cols
        self.free_pos = free_pos
        self.dg2 = dg2
        self.gen_rows = gen_rows
        self.orders = orders

    def coords(self, vec):
        y = replay(self.dg_out.col_ops, dict(vec), invert=True)
        w = {}
        for c, v in y.items():
            if not v:
                continue
            pos = self.free_pos.get(c)
            if pos is None:
                raise NotWellDefined("vector is not a cocycle")
            w[pos] = v
        z = replay(self.dg2.row_ops, w)
        out = []
        for r, d in zip(self.gen_rows, self.orders):
            v = z.get(r, 0)
            out.append(v % d if d else v)
        return out


def _z_cohomology(d_in, d_out, n):
    """ker(d_out)/im(d_in) over Z on a free level Z^n."""
    if d_out is not None:
        dg_out = diagonalize(d_out.copy_rows(), d_out.nrows, n)
    else:
        dg_out = _empty_diag(0, n)
    pivot_cols = {c for _, c, _ in dg_out.pivots}
    free_cols = [c for c in range(n) if c not in pivot_cols]
    free_pos = {c: i for i, c in enumerate(free_cols)}
    fc = len(free_cols)

    if d_in is not None and d_in.ncols:
        rows = d_in.copy_rows()
        replay_batch(dg_out.col_ops, rows, invert=True)  # V^-1 d_in
        m2 = {}
        for r, cols in rows.items():
            if r in free_pos:
                m2[free_pos[r]] = cols
            elif any(cols.values()):
                raise CompositionNonzero("d_out d_in != 0")
        dg2 = diagonalize(m2, fc, d_in.ncols)
    else:
        dg2 = _empty_diag(fc, 0)

    gen_rows, orders = _gens_from_relation_diag(dg2, fc)
    ntor = sum(1 for d in orders if d)

    # lifts: V_out applied to the embedding of U2^-1 e_row
    batch = {r: {s: 1} for s, r in enumerate(gen_rows)}
    replay_batch(dg2.row_ops, batch, reverse=True, invert=True)
    amb = {free_cols[pos]: dict(slots) for pos, slots in batch.items()}
    replay_batch(dg_out.col_ops, amb, reverse=True)
    lifts = [dict() for _ in gen_rows]
    for coord, slots in amb.items():
        for s, v in slots.items():
            lifts[s][coord] = v

    solver = _ZCohomSolver(dg_out, pivot_cols, free_pos, dg2, gen_rows, orders)
    return FgAbelianGroup(ZZ, len(gen_rows) - ntor, orders[:ntor], n, lifts, solver)


class _RationalSolver:
    __slots__ = ("zsolver", "ntor")

    def __init__(self, zsolver, ntor):
        self.zsolver = zsolver
        self.ntor = ntor

    def coords(self, vec):
        lam = 1
        for v in vec.values():
            if isinstance(v, Fraction):
                d = v.denominator
                g = _gcd(lam, d)
                lam = lam // g * d
        xz = {}
        for k, v in vec.items():
            w = v * lam
            if isinstance(w, Fraction):
                w = w.numerator
            if w:
                xz[k] = int(w)
        zc = self.zsolver.coords(xz)
        return [Fraction(v, lam) for v in zc[self.ntor :]]


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _q_cohomology(d_in, d_out, n):
    din_z = d_in.to_integer()[0] if d_in is not None else None
    dout_z = d_out.to_integer()[0] if d_out is not None else None
    zgroup = _z_cohomology(din_z, dout_z, n)
    ntor = len(zgroup.torsion)
    lifts = [zgroup.lift(i) for i in range(ntor, zgroup.ngens)]
    solver = _RationalSolver(zgroup._solver, ntor)
    return FgAbelianGroup(QQ, zgroup.rank, (), n, lifts, solver)


# ---------------------------------------------------------------------------
# field coefficients


class _FieldCohomSolver:
    __slots__ = ("ring", "d_out", "table", "ngens")

    def __init__(self, ring, d_out, table, ngens):
        self.ring = ring
        self.d_out = d_out
        self.table = table
        self.ngens = ngens

    def coords(self, vec):
        ring = self.ring
        vec = {k: ring.coerce(v) for k, v in vec.items() if ring.coerce(v) != 0}
        if self.d_out is not None and self.d_out.matvec(vec):
            raise NotWellDefined("vector is not a cocycle")
        res, acc = self.table.reduce(vec)
        if res:
            raise NotWellDefined("vector is not a cocycle")
        return [acc.get(g, 0) for g in range(self.ngens)]


class _F2CohomSolver:
    __slots__ = ("d_out", "table", "n", "ngens")

    def __init__(self, d_out, table, n, ngens):
        self.d_out = d_out
        self.table = table
        self.n = n
        self.ngens = ngens

    def coords(self, vec):
        vec = {k: v & 1 for k, v in vec.items() if v & 1}
        if self.d_out is not None and self.d_out.matvec(vec):
            raise NotWellDefined("vector is not a cocycle")
        ext = self.table.reduce(bits_from_dict(vec))
        if ext & ((1 << self.n) - 1):
            raise NotWellDefined("vector is not a cocycle")
        combo = ext >> self.n
        return [(combo >> g) & 1 for g in range(self.ngens)]


def _f2_cohomology(d_in, d_out, n, ring):
    kerech = BitEchelon()
    if d_out is not None:
        cols_out = [bits_from_dict(d_out.column(j)) for j in range(n)]
        for b in cols_out:
            if b:
                kerech.add(b)
    rank_out = kerech.rank
    dim_ker = n - rank_out

    table = BitEchelon(offset=n)
    rank_in = 0
    if d_in is not None:
        for j in range(d_in.ncols):
            b = bits_from_dict(d_in.column(j))
            if b and table.add(b) is None:
                rank_in += 1
    dim_h = dim_ker - rank_in

    lifts = []
    if dim_h:
        m_out = d_out.nrows if d_out is not None else 0
        if d_out is None:
            candidates = (1 << j for j in range(n))
        else:
            def _kernel_stream():
                aug = BitEchelon(offset=m_out)
                for j in range(n):
                    dep = aug.add(cols_out[j] | (1 << (m_out + j)))
                    if dep is not None:
                        yield dep
            candidates = _kernel_stream()
        for k in candidates:
            ext = table.reduce(k)
            if ext & ((1 << n) - 1):
                g = len(lifts)
                table.pivots[(ext & -ext).bit_length() - 1] = ext ^ (1 << (n + g))
                lifts.append(dict_from_bits(k))
                if len(lifts) == dim_h:
                    break
    solver = _F2CohomSolver(d_out, table, n, dim_h)
    return FgAbelianGroup(ring, dim_h, (), n, lifts, solver)


def _field_cohomology(d_in, d_out, n, ring):
    if ring.modulus == 2:
        return _f2_cohomology(d_in, d_out, n, ring)
    kerech = DictEchelon(ring)
    cols_out = []
    if d_out is not None:
        for j in range(n):
            col = d_out.column(j)
            cols_out.append(col)
            if col:
                kerech.add(col)
    dim_ker = n - kerech.rank

    table = DictEchelon(ring)
    rank_in = 0
    if d_in is not None:
        for j in range(d_in.ncols):
            col = d_in.column(j)
            if col and table.add(col) is None:
                rank_in += 1
    dim_h = dim_ker - rank_in

    lifts = []
    if dim_h:
        if d_out is None:
            candidates = ({j: ring.one()} for j in range(n))
        else:
            def _kernel_stream():
                aug = DictEchelon(ring)
                for j in range(n):
                    dep = aug.add(cols_out[j], {j: ring.one()})
                    if dep is not None:
                        yield dep
            candidates = _kernel_stream()
        for k in candidates:
            if table.add(k, {len(lifts): ring.one()}) is None:
                lifts.append(dict(k))
                if len(lifts) == dim_h:
                    break
    solver = _FieldCohomSolver(ring, d_out, table, dim_h)
    return FgAbelianGroup(ring, dim_h, (), n, lifts, solver)


# ---------------------------------------------------------------------------
# public entry points


def _level_dim(d_in, d_out, dim):
    if d_out is not None:
        n = d_out.ncols
        if d_in is not None and d_in.nrows != n:
            raise ValueError("d_in and d_out do not meet in the same level")
        return n
    if d_in is not None:
        return d_in.nrows
    if dim is None:
        raise ValueError("need at least one differential or an explicit dim")
    return dim


def cohomology_at(d_in, d_out, ring=ZZ, dim=None):
    """ker(d_out)/im(d_in) at one cochain level over the given ring.

    d_in maps into the level, d_out out of it; either may be None at
    the ends of a complex.  Raises CompositionNonzero when
    d_out . d_in != 0.
    """
    n = _level_dim(d_in, d_out, dim)
    if d_in is not None and d_out is not None:
        if not (d_out @ d_in).is_zero():
            raise CompositionNonzero("d_out composed with d_in is nonzero")
    if ring.kind == "Zm":
        return cohomology_mod_m(d_in, d_out, ring.modulus, dim=n)
    if d_in is not None and d_in.ring != ring:
        d_in = d_in.change_ring(ring)
    if d_out is not None and d_out.ring != ring:
        d_out = d_out.change_ring(ring)
    if ring == ZZ:
        return _z_cohomology(d_in, d_out, n)
    if ring == QQ:
        return _q_cohomology(d_in, d_out, n)
    if ring.kind == "F":
        return _field_cohomology(d_in, d_out, n, ring)
    raise ValueError("unsupported ring %r" % ring)


def cohomology_mod_m(d_in, d_out, m, dim=None):
    """Cohomology with Z/m coefficients via the integer stack.

    The cocycle condition mod m is encoded as an honest integer kernel
    of [d_out | m I], and im(d_in) is enlarged by m Z^n; the result is
    the subquotient presentation over Z, tagged with the ring Z/m.
    """
    ring = Zmod(m)
    n = _level_dim(d_in, d_out, dim)
    if d_in is not None and d_out is not None and not (d_out @ d_in).is_zero():
        raise CompositionNonzero("d_out composed with d_in is nonzero")
    dout_z = _as_integer(d_out)
    din_z = _as_integer(d_in)
    b = None
    if dout_z is not None:
        b = Matrix.diagonal(ZZ, dout_z.nrows, dout_z.nrows, [m] * dout_z.nrows)
    m_eye = Matrix.diagonal(ZZ, n, n, [m] * n)
    k = Matrix.hstack([din_z, m_eye]) if din_z is not None else m_eye
    return subquotient(dout_z, b, k, ring, ambient_dim=n)


def _as_integer(d):
    if d is None:
        return None
    if d.ring == ZZ:
        return d
    if d.ring.kind in ("Zm", "F"):
        return d.change_ring(ZZ)
    return d.to_integer()[0]


# ---------------------------------------------------------------------------
# general subquotient {x : A x in colspan B} / colspan K


class _ZSubquotSolver:
    __slots__ = ("dgG", "dgR", "gen_rows", "orders", "modulus")

    def __init__(self, dgG, dgR, gen_rows, orders, modulus):
        self.dgG = dgG
        self.dgR = dgR
        self.gen_rows = gen_rows
        self.orders = orders
        self.modulus = modulus

    def coords(self, vec):
        vec = {k: int(v) for k, v in vec.items() if v}
        if self.dgG is None:
            w = vec
        else:
            w = solve_z(self.dgG, vec)
            if w is None:
                raise NotWellDefined("vector is not in the subgroup")
        z = replay(self.dgR.row_ops, dict(w))
        out = []
        for r, d in zip(self.gen_rows, self.orders):
            v = z.get(r, 0)
            if d:
                out.append(v % d)
            elif self.modulus:
                out.append(v % self.modulus)
            else:
                out.append(v)
        return out


def subquotient(a, b, k, ring=ZZ, ambient_dim=None):
    """Present {x : A x in colspan(B)} / colspan(K) over Z or a field.

    a may be None for the full ambient space; b and k may be None for
    zero.  Over Z the result can carry torsion; over a field it is the
    analogous quotient of subspaces.  With ring Z/m the computation
    runs over Z and the answer is tagged mod m (callers include the
    m I relations themselves).
    """
    if ring.is_field:
        return _field_subquotient(a, b, k, ring, ambient_dim)
    n = ambient_dim if ambient_dim is not None else (a.ncols if a is not None else k.nrows)
    modulus = ring.modulus if ring.kind == "Zm" else 0

    if a is None or a.nrows == 0:
        g_mat = None
        dg_g = None
        ker_g = []
        gdim = n
    else:
        s = Matrix.hstack([a, b.scale(-1)]) if b is not None else a
        dg_s = diagonalize(s.copy_rows(), s.nrows, s.ncols)
        pivot_cols = {c for _, c, _ in dg_s.pivots}
        free_cols = [c for c in range(s.ncols) if c not in pivot_cols]
        batch = {c: {sl: 1} for sl, c in enumerate(free_cols)}
        replay_batch(dg_s.col_ops, batch, reverse=True)
        gcols = [dict() for _ in free_cols]
        for coord, slots in batch.items():
            if coord >= n:
                continue  # the B-part of the stacked kernel is scratch
            for sl, v in slots.items():
                gcols[sl][coord] = v
        gcols = [c for c in gcols if c]
        gdim = len(gcols)
        entries = {}
        for j, col in enumerate(gcols):
            for i, v in col.items():
                entries[(i, j)] = v
        g_mat = Matrix.from_entries(ZZ, n, gdim, entries)
        dg_g = diagonalize(g_mat.copy_rows(), n, gdim)
        ker_g = kernel_basis_z(g_mat, dg_g)

    rel_cols = []
    if k is not None and k.ncols:
        kcols = [k.column(j) for j in range(k.ncols)]
        if dg_g is None:
            rel_cols.extend(kcols)
        else:
            sols = solve_batch_z(dg_g, kcols)
            for w in sols:
                if w is None:
                    raise NotWellDefined("relation lies outside the subgroup")
                rel_cols.append(w)
    rel_cols.extend(ker_g)

    rrows = {}
    for j, col in enumerate(rel_cols):
        for i, v in col.items():
            if v:
                rrows.setdefault(i, {})[j] = v
    dg_r = diagonalize(rrows, gdim, len(rel_cols))
    gen_rows, orders = _gens_from_relation_diag(dg_r, gdim)
    ntor = sum(1 for d in orders if d)

    batch = {r: {sl: 1} for sl, r in enumerate(gen_rows)}
    replay_batch(dg_r.row_ops, batch, reverse=True, invert=True)
    wlifts = [dict() for _ in gen_rows]
    for coord, slots in batch.items():
        for sl, v in slots.items():
            wlifts[sl][coord] = v
    if g_mat is None:
        lifts = wlifts
    else:
        lifts = [g_mat.matvec(w) for w in wlifts]
    if modulus:
        lifts = [{i: v % modulus for i, v in l.items() if v % modulus} for l in lifts]

    solver = _ZSubquotSolver(dg_g, dg_r, gen_rows, orders, modulus)
    if modulus:
        # everything is killed by m, so the free part must be empty
        if len(gen_rows) != ntor:
            raise AssertionError("mod-m subquotient produced a free generator")
        return FgAbelianGroup(ring, 0, orders[:ntor], n, lifts, solver)
    return FgAbelianGroup(ring, len(gen_rows) - ntor, orders[:ntor], n, lifts, solver)


class _FieldSubquotSolver:
    __slots__ = ("ring", "a", "im_b", "table", "ngens")

    def __init__(self, ring, a, im_b, table, ngens):
        self.ring = ring
        self.a = a
        self.im_b = im_b
        self.table = table
        self.ngens = ngens

    def coords(self, vec):
        ring = self.ring
        vec = {k: ring.coerce(v) for k, v in vec.items() if ring.coerce(v) != 0}
        if self.a is not None:
            res, _ = self.im_b.reduce(self.a.matvec(vec))
            if res:
                raise NotWellDefined("vector is not in the subgroup")
        res, acc = self.table.reduce(vec)
        if res:
            raise NotWellDefined("vector is not in the subgroup")
        return [acc.get(g, 0) for g in range(self.ngens)]


def _field_subquotient(a, b, k, ring, ambient_dim):
    n = ambient_dim if ambient_dim is not None else (a.ncols if a is not None else k.nrows)
    if a is not None and a.ring != ring:
        a = a.change_ring(ring)
    if b is not None and b.ring != ring:
        b = b.change_ring(ring)
    if k is not None and k.ring != ring:
        k = k.change_ring(ring)

    im_b = DictEchelon(ring)
    if b is not None:
        for j in range(b.ncols):
            col = b.column(j)
            if col:
                im_b.add(col)

    if a is None:
        lbasis = [{j: ring.one()} for j in range(n)]
    else:
        lbasis = []
        ech = DictEchelon(ring)
        for j in range(n):
            res, _ = im_b.reduce(a.column(j))
            combo = ech.add(res, {j: ring.one()})
            if combo is not None:
                lbasis.append(combo)

    table = DictEchelon(ring)
    if k is not None:
        for j in range(k.ncols):
            col = k.column(j)
            if col:
                table.add(col)
    lifts = []
    for v in lbasis:
        if table.add(v, {len(lifts): ring.one()}) is None:
            lifts.append(dict(v))
    solver = _FieldSubquotSolver(ring, a, im_b, table, len(lifts))
    return FgAbelianGroup(ring, len(lifts), (), n, lifts, solver)


# ---------------------------------------------------------------------------
# induced maps and invariant arithmetic


def induced_map(source, target, chain_map):
    """Matrix of the map induced on presented groups by a chain map.

    Columns are target coordinates of the images of source generator
    lifts.  Raises NotWellDefined when an image is not a class of the
    target or a generator's order is not respected.
    """
    if source.ring != target.ring:
        raise ValueError("source and target live over different rings")
    ring = target.ring
    entries = {}
    for i in range(source.ngens):
        img = chain_map.matvec(source.lift(i)) if chain_map is not None else {}
        c = target.coords(img)
        d = source.orders[i]
        if d:
            for j, cv in enumerate(c):
                e = target.orders[j]
                dead = (d * cv) % e == 0 if e else d * cv == 0
                if not dead:
                    raise NotWellDefined("image of an order-%d generator has infinite order" % d)
        for j, cv in enumerate(c):
            if cv:
                entries[(j, i)] = cv
    return Matrix.from_entries(ring, target.ngens, source.ngens, entries)


def tensor_invariants(a, b):
    """Invariants of (Z^r1 + T1) tensor (Z^r2 + T2)."""
    r1, t1 = a
    r2, t2 = b
    divs = []
    divs.extend(d for d in t2 for _ in range(r1))
    divs.extend(d for d in t1 for _ in range(r2))
    for d1 in t1:
        for d2 in t2:
            g = _gcd(d1, d2)
            if g > 1:
                divs.append(g)
    return (r1 * r2, canonical_divisors(divs))


def tor_invariants(a, b):
    """Invariants of Tor(A, B): one Z/gcd per pair of cyclic summands."""
    _, t1 = a
    _, t2 = b
    divs = []
    for d1 in t1:
        for d2 in t2:
            g = _gcd(d1, d2)
            if g > 1:
                divs.append(g)
    return (0, canonical_divisors(divs))


def sum_invariants(parts):
    rank = 0
    divs = []
    for r, t in parts:
        rank += r
        divs.extend(t)
    return (rank, canonical_divisors(divs))
