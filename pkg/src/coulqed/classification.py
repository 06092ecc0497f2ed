"""First/second-class classification, first-class completion and pairing of second-class families."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

from .errors import StructureError
from .graded import gpb
from .members import MemberTable, matrix_inverse, matrix_rank, sparse_components
from .qed import ConstraintFamily, ConstraintSet


@dataclass
class Classification:
    constraints: ConstraintSet
    first_members: int
    second_members: int
    renamed: dict = field(default_factory=dict)

    @property
    def first_families(self):
        return [f.name for f in self.constraints.families if f.klass == "first"]

    @property
    def second_families(self):
        return [f.name for f in self.constraints.families if f.klass == "second"]


def _independent_index(table):
    """Flat list of (family index, combination) over all independent members."""
    out = []
    for fi in range(len(table.constraints.families)):
        for combo in table.independent(fi):
            out.append((fi, combo))
    return out


def _family_edges(table):
    """Projected body blocks between families that have any nonzero entry."""
    fams = table.constraints.families
    blocks = {}
    for fi in range(len(fams)):
        for fj in range(len(fams)):
            block = table.projected_block(fi, fj)
            if any(v for row in block for v in row):
                blocks[(fi, fj)] = block
    return blocks


def _rank_analysis(table, blocks):
    offsets = []
    total = 0
    for fi in range(len(table.constraints.families)):
        offsets.append(total)
        total += len(table.independent(fi))
    entries = {}
    for (fi, fj), block in blocks.items():
        for r, row in enumerate(block):
            for c, v in enumerate(row):
                if v:
                    entries[(offsets[fi] + r, offsets[fj] + c)] = v
    rank = 0
    second = set()
    for comp in sparse_components(entries, total):
        if len(comp) == 1 and (comp[0], comp[0]) not in entries:
            continue
        pos = {g: k for k, g in enumerate(comp)}
        zero = table.coeff(0)
        rows = [[zero] * len(comp) for _ in comp]
        for (i, j), v in entries.items():
            if i in pos and j in pos:
                rows[pos[i]][pos[j]] = v
        r = matrix_rank(rows, table.exact)
        if r != len(comp):
            raise StructureError(
                "bracket matrix has a degenerate block: a first-class combination hides among "
                "members with nonzero brackets"
            )
        rank += r
        second.update(comp)
    return total, rank, second, offsets


def decouple(table: MemberTable, family_index: int, targets, check_constant: bool = True):
    """Members f - [f, t_a] C^{ab} t_b of one family, with t running over the target families.

    C is the bracket matrix of the targets' independent members, lifted back to all members.
    Returns the new member polynomials (unchanged members are returned as is).
    """
    targets = list(targets)
    t_members = [i for fi in targets for i in table.family_slices[fi]]
    t_pos = {m: k for k, m in enumerate(t_members)}
    lifted = lifted_inverse(table, targets, check_constant)
    out = []
    for idx in table.family_slices[family_index]:
        f = table.poly(idx)
        row = {}
        for a in table.neighbours_of_poly(f):
            if a in t_pos:
                b = table.reducer(gpb(f, table.poly(a)))
                if b:
                    row[a] = b
        if not row:
            out.append(f)
            continue
        correction = f.zero()
        for a, fa in row.items():
            for b, cab in lifted.get(a, {}).items():
                correction = correction + (fa * table.poly(b)).scale(cab)
        out.append(f - correction)
    return out


def lifted_inverse(table: MemberTable, targets, check_constant: bool = True) -> dict:
    """Sparse {member a: {member b: C^{ab}}} over all members of the target families.

    The inverse lives on the independent members and is lifted with the zero-mode projection.
    """
    targets = list(targets)
    indep = []
    for fi in targets:
        indep.extend(table.independent(fi))
    members = [i for fi in targets for i in table.family_slices[fi]]
    if check_constant:
        mset = set(members)
        for i in members:
            for j in table.neighbours_of_poly(table.poly(i)):
                if j in mset:
                    br = table.bracket(i, j)
                    if br and set(br.terms) != {()}:
                        raise StructureError("bracket matrix of the second-class set is not constant")
    # projected body on the independent members, assembled from family blocks
    offsets = {}
    total = 0
    for fi in targets:
        offsets[fi] = total
        total += len(table.independent(fi))
    entries = {}
    for fi in targets:
        for fj in targets:
            block = table.projected_block(fi, fj)
            for r, row in enumerate(block):
                for c, v in enumerate(row):
                    if v:
                        entries[(offsets[fi] + r, offsets[fj] + c)] = v
    inv = {}
    zero = table.coeff(0)
    for comp in sparse_components(entries, total):
        pos = {g: k for k, g in enumerate(comp)}
        rows = [[zero] * len(comp) for _ in comp]
        for (i, j), v in entries.items():
            if i in pos and j in pos:
                rows[pos[i]][pos[j]] = v
        ci = matrix_inverse(rows, table.exact)
        for a, ga in enumerate(comp):
            for b, gb in enumerate(comp):
                if ci[a][b]:
                    inv[(ga, gb)] = ci[a][b]
    # lift L = P^T Cinv P blockwise; for zero-mode families P^T X P pads and centres X
    fam_of = []
    for fi in targets:
        fam_of.extend((fi, k) for k in range(len(table.independent(fi))))
    blocks = {}
    for (ga, gb), v in inv.items():
        (fi, k), (fj, l) = fam_of[ga], fam_of[gb]
        blocks.setdefault((fi, fj), {})[(k, l)] = v
    lifted = {}
    for (fi, fj), entries in blocks.items():
        rows = table.family_slices[fi]
        cols = table.family_slices[fj]
        dense = [[zero] * len(cols) for _ in rows]
        for (k, l), v in entries.items():
            dense[k][l] = v
        dense = lift_block(dense, table.constraints.families[fi].zero_mode,
                           table.constraints.families[fj].zero_mode, table.coeff)
        for r, a in enumerate(rows):
            d = lifted.setdefault(a, {})
            for c, b in enumerate(cols):
                if dense[r][c]:
                    d[b] = dense[r][c]
    return lifted


def lift_block(block, rows_zero_mode, cols_zero_mode, coeff):
    """P^T X P for the mean-subtracting projection (X already padded to the full member count)."""
    n_r, n_c = len(block), len(block[0])
    if rows_zero_mode:
        inv = coeff(Fraction(1, n_r))
        col_mean = [sum((block[i][j] for i in range(n_r)), coeff(0)) * inv for j in range(n_c)]
        block = [[block[i][j] - col_mean[j] for j in range(n_c)] for i in range(n_r)]
    if cols_zero_mode:
        inv = coeff(Fraction(1, n_c))
        row_mean = [sum(row, coeff(0)) * inv for row in block]
        block = [[v - row_mean[i] for v in row] for i, row in enumerate(block)]
    return block


def _verify_first_class(table: MemberTable, polys) -> bool:
    for f in polys:
        for j in table.neighbours_of_poly(f):
            if table.reducer(gpb(f, table.poly(j))):
                return False
        if table.reducer(gpb(f, f)):
            return False
    return True


def _rename(system, fam: ConstraintFamily, candidates):
    """Match a recombined family against reference families (projected members compared exactly)."""
    mine = fam.projected()
    for name in candidates:
        ref = system.family(name)
        if ref.zero_mode != fam.zero_mode or len(ref.members) != len(fam.members):
            continue
        if all((a - b).is_zero() for a, b in zip(mine, ref.projected())):
            return replace(ref, klass=fam.klass)
    return fam


_RENAMES = {"gauss": ("gamma2",), "phi": ("chi6",), "chi6": ("chi6",), "gauss_first": ("gamma2",)}


def classify_report(constraints: ConstraintSet) -> Classification:
    system = constraints.system
    table = MemberTable(constraints)
    blocks = _family_edges(table)
    total, rank, second, offsets = _rank_analysis(table, blocks)
    fams = list(constraints.families)
    renamed = {}
    klass = []
    for fi, fam in enumerate(fams):
        n_ind = len(table.independent(fi))
        idx = set(range(offsets[fi], offsets[fi] + n_ind))
        if idx <= second:
            klass.append("second")
        elif not idx & second:
            klass.append("first")
        else:
            klass.append("unknown")
    second_fams = [fi for fi, k in enumerate(klass) if k == "second"]
    # first-class candidates: remove their brackets with the second-class set, then verify
    for fi, k in enumerate(klass):
        if k != "first":
            continue
        members = decouple(table, fi, second_fams) if second_fams else list(fams[fi].members)
        if not _verify_first_class(table, members):
            klass[fi] = "unknown"
            continue
        new = _rename(system, replace(fams[fi], members=tuple(members), klass="first"), _RENAMES.get(fams[fi].kind, ()))
        if new.name != fams[fi].name:
            renamed[fams[fi].name] = new.name
        fams[fi] = new
    fams = [f if f.klass == "first" else replace(f, klass=k) for f, k in zip(fams, klass)]
    pairs = []
    if second_fams:
        fams, pairs, more = _pair_second_class(constraints.with_families(fams), second_fams)
        renamed.update(more)
    result = constraints.with_families(fams, pairs)
    return Classification(result, total - rank, rank, renamed)


def classify(constraints: ConstraintSet) -> ConstraintSet:
    """Mark families first/second class; first-class families are returned in completed form."""
    return classify_report(constraints).constraints


def _pair_second_class(constraints: ConstraintSet, second_fams):
    """Greedy grouping of second-class families into mutually commuting pairs.

    At each step a family with a single bracket partner is paired with it, preferring pairs whose
    removal only modifies secondary families; the other families are then decoupled from the pair.
    """
    system = constraints.system
    primary_names = set(system.primaries.names())
    fams = list(constraints.families)
    remaining = list(second_fams)
    pairs = []
    renamed = {}
    while remaining:
        cs = constraints.with_families(fams)
        table = MemberTable(cs)
        blocks = _family_edges(table)
        nbrs = {fi: {fj for (a, fj) in blocks if a == fi and fj != fi and fj in remaining} for fi in remaining}
        options = []
        for fi in remaining:
            if len(nbrs[fi]) == 1:
                fj = next(iter(nbrs[fi]))
                touched = _touched(table, fi, fj, remaining)
                score = sum(1 for t in touched if fams[t].name in primary_names)
                options.append((score, remaining.index(fi), fi, fj))
        if not options:
            fi = remaining[0]
            if not nbrs[fi]:
                pairs.append((fams[fi].name,))
                remaining.remove(fi)
                continue
            fj = min(nbrs[fi], key=remaining.index)
            options = [(0, 0, fi, fj)]
        _, _, fi, fj = min(options)
        first, second = sorted((fi, fj), key=remaining.index)
        for t in _touched(table, fi, fj, remaining):
            old = fams[t]
            members = decouple(table, t, [first, second])
            new = replace(old, members=tuple(members))
            new = _rename(system, new, _RENAMES.get(new.kind, ()))
            if new.name != old.name:
                renamed[old.name] = new.name
            fams[t] = new
        pairs.append((fams[first].name, fams[second].name))
        remaining = [r for r in remaining if r not in (fi, fj)]
    return fams, pairs, renamed


def _touched(table, fi, fj, remaining):
    """Remaining families with any nonzero reduced bracket against the pair (fi, fj)."""
    pair_members = set(table.family_slices[fi]) | set(table.family_slices[fj])
    out = []
    for t in remaining:
        if t in (fi, fj):
            continue
        for idx in table.family_slices[t]:
            if any(table.bracket(idx, j) for j in table.neighbours_of_poly(table.poly(idx)) if j in pair_members):
                out.append(t)
                break
    return out
