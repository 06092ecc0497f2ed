"""Consistency (time-preservation) algorithm for lattice constraint families."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix

from .errors import AlgorithmFailure
from .graded import GradedPolynomial, gpb, substitute
from .qed import ConstraintFamily, ConstraintSet, SurfaceReducer

# reference family a new condition is compared against, keyed by the kind of family it came from
_EXPECTED = {"gamma1": "gamma2~", "coulomb": "phi"}


@dataclass
class ConsistencyResult:
    constraints: ConstraintSet
    solutions: dict = field(default_factory=dict)
    new_families: list = field(default_factory=list)
    closed: bool = False
    iterations: int = 0
    free_multipliers: list = field(default_factory=list)
    failure: str = ""

    @property
    def secondary_names(self):
        return [f.name for f in self.new_families]

    def reduced_solution(self, species, component, site):
        """Multiplier solution reduced on the final constraint surface."""
        system = self.constraints.system
        sid = system.space.id(species, component, site)
        return SurfaceReducer(system, self.constraints.families)(self.solutions[sid])


def _split_multipliers(row: GradedPolynomial, is_mult):
    """{multiplier id: coefficient polynomial} and the multiplier-free rest.

    Multipliers have the largest ids, so in a canonical monomial the (single) multiplier is last.
    """
    coeffs = {}
    rest = {}
    for mon, c in row.terms.items():
        if mon and is_mult(mon[-1]):
            coeffs.setdefault(mon[-1], {})[mon[:-1]] = c
        else:
            rest[mon] = c
    space = row.space
    return (
        {u: GradedPolynomial(space, t, row.exact) for u, t in coeffs.items()},
        GradedPolynomial(space, rest, row.exact),
    )


def _check_linear(row, is_mult):
    for mon in row.terms:
        if sum(1 for s in mon if is_mult(s)) > 1:
            raise AlgorithmFailure("multiplier dependence is not linear")


def _combine(space, exact_mode, pairs):
    """sum of coefficient * polynomial, accumulated in one dictionary."""
    terms = {}
    for c, poly in pairs:
        if not c:
            continue
        for mon, v in poly.terms.items():
            w = c * v
            terms[mon] = terms[mon] + w if mon in terms else w
    return GradedPolynomial(space, terms, exact_mode)


def _components(row_mults):
    """Group rows that share multipliers (union-find over multiplier ids)."""
    parent = {}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for mults in row_mults:
        for u in mults:
            parent.setdefault(u, u)
        mults = list(mults)
        for u in mults[1:]:
            ra, rb = find(mults[0]), find(u)
            if ra != rb:
                parent[ra] = rb
    groups = {}
    free_rows = []
    for idx, mults in enumerate(row_mults):
        if not mults:
            free_rows.append(idx)
            continue
        groups.setdefault(find(next(iter(mults))), []).append(idx)
    return list(groups.values()), free_rows


def _row_reduce(matrix, exact_mode):
    """(rref, pivot columns, transform E with E @ matrix = rref) for a small dense matrix."""
    n_rows, n_cols = len(matrix), len(matrix[0])
    if exact_mode:
        real = all(not c.y for row in matrix for c in row)
        dom = QQ if real else QQ_I
        aug = [[(c.x if real else c) for c in row] + [dom.one if i == j else dom.zero for j in range(n_rows)]
               for i, row in enumerate(matrix)]
        red, pivots = DomainMatrix(aug, (n_rows, n_cols + n_rows), dom).rref()
        red = red.to_list()
        conv = (lambda v: QQ_I.convert(v)) if real else (lambda v: v)
        red = [[conv(v) for v in row] for row in red]
        pivots = [p for p in pivots if p < n_cols]
        return [row[:n_cols] for row in red], pivots, [row[n_cols:] for row in red]
    a = np.hstack([np.array(matrix, dtype=complex), np.eye(n_rows, dtype=complex)])
    pivots = []
    r = 0
    for col in range(n_cols):
        if r == n_rows:
            break
        p = r + int(np.argmax(np.abs(a[r:, col])))
        if abs(a[p, col]) < 1e-10:
            continue
        a[[r, p]] = a[[p, r]]
        a[r] /= a[r, col]
        others = np.arange(n_rows) != r
        a[others] -= np.outer(a[others, col], a[r])
        pivots.append(col)
        r += 1
    a[np.abs(a) < 1e-14] = 0
    return a[:, :n_cols].tolist(), pivots, a[:, n_cols:].tolist()


def solve_multipliers(rows, space):
    """Solve the multiplier conditions, which are linear with constant coefficients.

    rows: list of (origin, polynomial).  Returns (solutions, leftover multiplier-free rows).
    """
    is_mult = space.is_multiplier
    split = []
    for origin, r in rows:
        _check_linear(r, is_mult)
        coeffs, rest = _split_multipliers(r, is_mult)
        const = {}
        for u, c in coeffs.items():
            if set(c.terms) != {()}:
                raise AlgorithmFailure(
                    f"multiplier {space.symbols[u]} appears with a field-dependent coefficient; no linear solution"
                )
            const[u] = c.body()
        split.append((origin, const, rest))
    groups, free_rows = _components([set(c) for _, c, _ in split])
    leftovers = [(split[i][0], split[i][2]) for i in free_rows]
    solutions = {}
    exact_mode = rows[0][1].exact if rows else True
    for group in groups:
        mults = sorted({u for i in group for u in split[i][1]})
        col = {u: k for k, u in enumerate(mults)}
        zero = QQ_I.zero if exact_mode else 0j
        matrix = [[zero] * len(mults) for _ in group]
        for r, i in enumerate(group):
            for u, c in split[i][1].items():
                matrix[r][col[u]] = c
        red, pivots, transform = _row_reduce(matrix, exact_mode)
        rests = [split[i][2] for i in group]
        pivot_set = set(pivots)
        for r, row in enumerate(transform):
            combo = _combine(space, exact_mode, list(zip(row, rests)))
            if r < len(pivots):
                # u_p + sum_f red[r][f] u_f + combo = 0
                p = mults[pivots[r]]
                value = -combo
                for f, u in enumerate(mults):
                    if f not in pivot_set and red[r][f]:
                        value = value - GradedPolynomial.symbol(space, u, exact_mode).scale(red[r][f])
                solutions[p] = value
            else:
                leftovers.append((split[group[r]][0], combo))
    return solutions, leftovers


def _match(rows, reference, reducer):
    """Common scalar c with rows[k] == c * reduced reference[k], or None."""
    ref = [reducer(r) for r in reference]
    scale = None
    for got, want in zip(rows, ref):
        if want.is_zero() or got.is_zero():
            if want.is_zero() != got.is_zero():
                return None
            continue
        if scale is None:
            mon = next(iter(want.terms))
            if mon not in got.terms:
                return None
            scale = got.terms[mon] / want.terms[mon]
        if not (got - want.scale(scale)).is_zero():
            return None
    return scale


def _rows(family, hamiltonian_total, solutions, local):
    """Reduced [member, H_T] for the independent members of one family."""
    raw = []
    for member in family.members:
        row = gpb(member, hamiltonian_total)
        if solutions:
            row = substitute(row, solutions.get)
        raw.append(local(row))
    if not family.zero_mode:
        return raw
    total = raw[0].zero()
    for r in raw:
        total = total + r
    if total.is_zero():
        return raw[:-1]
    mean = total.scale(Fraction(1, len(raw)))
    return [r - mean for r in raw[:-1]]


def consistency_step(hamiltonian_total, constraints: ConstraintSet, pending=None, solutions=None):
    """Demand [member, H_T] ~ 0 for every member of the pending families.

    Returns (new families, multiplier solutions).  New families are matched against the known
    reference expressions; unmatched conditions become a generic family.
    Elimination runs on rows reduced only by the site-local substitutions; the full reduction is a
    ring homomorphism, so applying it to what is left afterwards gives the same result.
    """
    system = constraints.system
    space = system.space
    pending = list(constraints.families) if pending is None else list(pending)
    solutions = dict(solutions or {})
    local = SurfaceReducer(system, constraints.families, local_only=True)
    reducer = SurfaceReducer(system, constraints.families)
    rows = []
    for fam in pending:
        rows.extend((fam.name, r) for r in _rows(fam, hamiltonian_total, solutions, local))
    new_solutions, leftovers = solve_multipliers(rows, space)
    for u in list(solutions):
        solutions[u] = local(substitute(solutions[u], new_solutions.get))
    solutions.update(new_solutions)
    by_origin = {}
    for origin, rest in leftovers:
        rest = reducer(rest)
        if rest.is_zero():
            continue
        if set(rest.terms) == {()}:
            raise AlgorithmFailure(f"inconsistent system: constant condition from {origin}")
        by_origin.setdefault(origin, []).append(rest)
    new = []
    for origin, conds in by_origin.items():
        new.append(_identify(system, constraints, origin, conds, reducer))
    return new, solutions


def _identify(system, constraints, origin, conds, reducer):
    origin_fam = constraints.family(origin)
    expected = _EXPECTED.get(origin_fam.kind)
    if expected is not None:
        ref = system.family(expected)
        if len(conds) == len(ref.projected()) and _match(conds, ref.projected(), reducer) is not None:
            return ref
    used = set(constraints.names())
    k = 1
    while f"secondary{k}" in used:
        k += 1
    return ConstraintFamily(f"secondary{k}", "other", tuple(conds))


def run_consistency(constraints: ConstraintSet = None, system=None, max_iterations: int = 4) -> ConsistencyResult:
    """Iterate consistency_step until no new family appears (or the cap is hit)."""
    if constraints is None:
        constraints = system.primaries
    system = constraints.system
    h_total = system.total_hamiltonian(constraints)
    pending = list(constraints.families)
    solutions = {}
    found = []
    for it in range(1, max_iterations + 1):
        try:
            new, solutions = consistency_step(h_total, constraints, pending, solutions)
        except AlgorithmFailure as exc:
            free = _free_multipliers(constraints, solutions)
            return ConsistencyResult(constraints, solutions, found, False, it, free, str(exc))
        if not new:
            free = _free_multipliers(constraints, solutions)
            return ConsistencyResult(constraints, solutions, found, True, it, free)
        found.extend(new)
        constraints = constraints.extended(*new)
        pending = new
    free = _free_multipliers(constraints, solutions)
    return ConsistencyResult(constraints, solutions, found, False, max_iterations, free, "iteration cap reached")


def _free_multipliers(constraints, solutions):
    space = constraints.system.space
    h_total = constraints.system.total_hamiltonian(constraints)
    mults = {s for s in h_total.index() if space.is_multiplier(s)}
    return sorted(str(space.symbols[s]) for s in mults - set(solutions))
