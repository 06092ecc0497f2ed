"""Generalized Dirac bracket for a paired second-class constraint set."""
from __future__ import annotations

from .classification import lifted_inverse
from .errors import StructureError
from .graded import GradedPolynomial, gpb, sum_of_products
from .members import MemberTable
from .qed import ConstraintSet


class DiracBracket:
    """[F, G]_D = [F, G] - [F, chi_a] C^{ab} [chi_b, G], evaluated on the constraint surface.

    C^{ab} is assembled pair by pair (cross-pair brackets must vanish on the surface) and lifted
    from the independent members, so zero-mode families are handled on their mean-zero subspace.
    """

    def __init__(self, constraints: ConstraintSet):
        if not constraints.pairs:
            raise StructureError("second-class constraints must be grouped into pairs")
        self.constraints = constraints
        self.table = MemberTable(constraints)
        self.reducer = self.table.reducer
        names = constraints.names()
        self._check_block_form(names)
        self.inverse = {}
        for pair in constraints.pairs:
            idx = [names.index(n) for n in pair]
            for a, row in lifted_inverse(self.table, idx).items():
                self.inverse.setdefault(a, {}).update(row)

    def _check_block_form(self, names):
        pair_of = {}
        for k, pair in enumerate(self.constraints.pairs):
            for n in pair:
                pair_of[names.index(n)] = k
        missing = set(range(len(names))) - set(pair_of)
        if missing:
            raise StructureError(f"families without a pair: {[names[i] for i in sorted(missing)]}")
        t = self.table
        for i, (fi, _, poly) in enumerate(t.members):
            for j in t.neighbours_of_poly(poly):
                if pair_of[t.members[j][0]] != pair_of[fi] and t.bracket(i, j):
                    raise StructureError(
                        f"{names[fi]} and {names[t.members[j][0]]} sit in different pairs but do not commute"
                    )

    def row(self, f: GradedPolynomial) -> dict:
        """{member b: sum_a [F, chi_a] C^{ab}}."""
        contributions = {}
        for a in self.table.neighbours_of_poly(f):
            fa = self.reducer(gpb(f, self.table.poly(a)))
            if not fa:
                continue
            for b, cab in self.inverse.get(a, {}).items():
                contributions.setdefault(b, []).append((fa, cab))
        out = {}
        for b, parts in contributions.items():
            terms = {}
            for fa, cab in parts:
                for m, c in fa.terms.items():
                    v = c * cab
                    terms[m] = terms[m] + v if m in terms else v
            poly = GradedPolynomial(f.space, terms, f.exact)
            if poly:
                out[b] = poly
        return out

    def __call__(self, f: GradedPolynomial, g: GradedPolynomial, row: dict = None) -> GradedPolynomial:
        row = self.row(f) if row is None else row
        result = self.reducer(gpb(f, g))
        if not row:
            return result
        items = []
        one = self.table.coeff(1)
        for b in self.table.neighbours_of_poly(g):
            if b in row:
                bg = self.reducer(gpb(self.table.poly(b), g))
                if bg:
                    items.append((row[b], bg, one))
        return result - sum_of_products(f.space, items, f.exact)

    def with_constraints(self, f: GradedPolynomial) -> dict:
        """[F, member]_D for every independent member, keyed by family name."""
        row = self.row(f)
        out = {}
        for fi, fam in enumerate(self.constraints.families):
            values = [self(f, self.table.poly(i), row) for i in self.table.family_slices[fi]]
            if fam.zero_mode:
                total = f.zero()
                for v in values:
                    total = total + v
                if total:
                    mean = total.scale(self.table.coeff(1) / self.table.coeff(len(values)))
                    values = [v - mean for v in values]
                values = values[:-1]
            out[fam.name] = values
        return out


_CACHE = {}


def dirac_bracket(f: GradedPolynomial, g: GradedPolynomial, constraints: ConstraintSet) -> GradedPolynomial:
    """Convenience wrapper caching the bracket data per constraint set."""
    key = id(constraints)
    if key not in _CACHE or _CACHE[key][0] is not constraints:
        _CACHE.clear()
        _CACHE[key] = (constraints, DiracBracket(constraints))
    return _CACHE[key][1](f, g)
