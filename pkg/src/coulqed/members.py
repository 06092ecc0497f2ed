"""Indexed constraint members with cached, surface-reduced mutual brackets."""
from __future__ import annotations

from fractions import Fraction

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix
import numpy as np

from .errors import StructureError
from .graded import gpb
from .qed import ConstraintSet, SurfaceReducer


class MemberTable:
    """All (unprojected) members of a constraint set plus the independent combinations used for counting.

    Independent members of a zero_mode family are m(x_k) - mean(m) for k < N-1.
    """

    def __init__(self, constraints: ConstraintSet, reducer: SurfaceReducer = None):
        self.constraints = constraints
        system = constraints.system
        self.system = system
        self.exact = system.exact
        self.reducer = reducer or SurfaceReducer(system, constraints.families)
        self.members = []  # (family index, member index, polynomial)
        self.family_slices = []
        for fi, fam in enumerate(constraints.families):
            start = len(self.members)
            for mi, poly in enumerate(fam.members):
                self.members.append((fi, mi, poly))
            self.family_slices.append(range(start, len(self.members)))
        self._by_symbol = {}
        for idx, (_, _, poly) in enumerate(self.members):
            for s in poly.index():
                self._by_symbol.setdefault(s, set()).add(idx)
        self._cache = {}
        self._zero = QQ_I.zero if self.exact else 0j

    def coeff(self, value):
        return self.system.fields.coeff(value)

    def poly(self, idx):
        return self.members[idx][2]

    def neighbours_of_poly(self, poly) -> set:
        """Members that can have a nonzero bracket with poly."""
        space = self.system.space
        out = set()
        for s in poly.index():
            pair = space.partner(s)
            if pair is not None:
                out |= self._by_symbol.get(pair[0], set())
        return out

    def bracket(self, i, j):
        """Reduced [member i, member j]."""
        key = (i, j)
        if key not in self._cache:
            self._cache[key] = self.reducer(gpb(self.poly(i), self.poly(j)))
        return self._cache[key]

    def independent(self, fi) -> list:
        """Independent combinations of family fi as lists of (member index, coefficient)."""
        fam = self.constraints.families[fi]
        sl = self.family_slices[fi]
        one = self.coeff(1)
        if not fam.zero_mode:
            return [[(i, one)] for i in sl]
        n = len(sl)
        mean = self.coeff(Fraction(-1, n))
        out = []
        for k in range(n - 1):
            combo = [(i, mean) for i in sl]
            combo[k] = (sl[k], one + mean)
            out.append(combo)
        return out

    def body_block(self, fi, fj):
        """Constant part of reduced brackets between unprojected members of two families."""
        rows, cols = self.family_slices[fi], self.family_slices[fj]
        col_of = {c: k for k, c in enumerate(cols)}
        block = [[self._zero] * len(cols) for _ in rows]
        for r, i in enumerate(rows):
            for j in self.neighbours_of_poly(self.poly(i)):
                if j in col_of:
                    b = self.bracket(i, j).body()
                    if b:
                        block[r][col_of[j]] = b
        return block

    def projected_block(self, fi, fj):
        """Body of brackets between the independent members of two families."""
        block = self.body_block(fi, fj)
        zi = self.constraints.families[fi].zero_mode
        zj = self.constraints.families[fj].zero_mode
        return project_block(block, zi, zj, self.coeff)


def project_block(block, rows_zero_mode, cols_zero_mode, coeff):
    """P_r B P_c^T with P = (e_k - 1/N) for the first N-1 sites on zero_mode sides."""
    n_r, n_c = len(block), len(block[0])
    if rows_zero_mode:
        inv = coeff(Fraction(1, n_r))
        col_mean = [sum((block[i][j] for i in range(n_r)), coeff(0)) * inv for j in range(n_c)]
        block = [[block[i][j] - col_mean[j] for j in range(n_c)] for i in range(n_r - 1)]
        n_r -= 1
    if cols_zero_mode:
        inv = coeff(Fraction(1, n_c))
        row_mean = [sum(row, coeff(0)) * inv for row in block]
        block = [[row[j] - row_mean[i] for j in range(n_c - 1)] for i, row in enumerate(block)]
    return block


def sparse_components(entries, size):
    """Connected components of the graph with an edge for each nonzero (i, j) entry."""
    parent = list(range(size))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in entries:
        ra, rb = find(i), find(j)
        if ra != rb:
            parent[ra] = rb
    groups = {}
    for i in range(size):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _domain_matrix(rows, exact_mode):
    if not exact_mode:
        return np.array(rows, dtype=complex)
    real = all(not v.y for row in rows for v in row)
    dom = QQ if real else QQ_I
    data = [[(v.x if real else v) for v in row] for row in rows]
    return DomainMatrix(data, (len(rows), len(rows[0]) if rows else 0), dom)


def matrix_rank(rows, exact_mode) -> int:
    if not rows:
        return 0
    m = _domain_matrix(rows, exact_mode)
    if exact_mode:
        return m.rank()
    return int(np.linalg.matrix_rank(m, tol=1e-9))


def matrix_inverse(rows, exact_mode):
    """Inverse of a square matrix given as nested lists; StructureError if singular."""
    m = _domain_matrix(rows, exact_mode)
    if exact_mode:
        try:
            inv = m.inv()
        except Exception as exc:  # sympy raises DMNonInvertibleMatrixError
            raise StructureError("bracket block is singular") from exc
        out = inv.to_list()
        if inv.domain == QQ:
            return [[QQ_I.convert(v) for v in row] for row in out]
        return out
    if np.linalg.matrix_rank(m, tol=1e-9) < len(rows):
        raise StructureError("bracket block is singular")
    return np.linalg.inv(m).tolist()
