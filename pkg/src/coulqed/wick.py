"""Normal ordering and vacuum contractions for ladder operators and free-field pieces.

Every elementary operator is either annihilator-type (kills the vacuum on the
right) or creator-type (kills it on the left).  A contraction <0|O_i O_j|0> with
i left of j is nonzero only for an annihilator-type O_i and a creator-type O_j on
the same channel; it is then the (anti)commutator [O_i, O_j], kept as a symbolic
token.  Tokens between two ladder operators evaluate to Kronecker deltas.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from itertools import product

KINDS = ("a", "a+", "ac", "ac+", "b", "b+")
_PARTNER = {"a": "a+", "ac": "ac+", "b": "b+"}
_DEFAULT_SPECIES = {"a": "electron", "ac": "electron", "b": "photon"}


@dataclass(frozen=True)
class LadderOp:
    kind: str
    mode: int = 0
    label: int = 0
    species: str = ""
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown ladder kind {self.kind!r}")
        if not self.species:
            object.__setattr__(self, "species", _DEFAULT_SPECIES[self.kind.rstrip("+")])
        if not self.name:
            object.__setattr__(self, "name", f"{self.kind}{self.mode}")

    @property
    def annihilator(self) -> bool:
        return not self.kind.endswith("+")

    @property
    def odd(self) -> bool:
        return self.species != "photon"

    @property
    def channel(self) -> tuple:
        return (self.species, "anti" if self.kind.startswith("ac") else "particle")

    @property
    def dagger(self) -> "LadderOp":
        base = self.kind.rstrip("+")
        kind = base if self.kind.endswith("+") else _PARTNER[base]
        return LadderOp(kind, self.mode, self.label, self.species)

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class FieldPiece:
    """Positive- or negative-frequency part of a free field at a site."""

    field: str  # "psi", "psi+" (adjoint), "A"
    piece: str  # "+" or "-"
    site: str
    index: str
    species: str = "electron"

    @property
    def odd(self) -> bool:
        return self.field != "A"

    @property
    def annihilator(self) -> bool:
        # psi(+) ~ a, psi(-) ~ ac+, psi+(+) ~ a+, psi+(-) ~ ac, A(+) ~ b, A(-) ~ b+
        return (self.piece == "+") == (self.field != "psi+")

    @property
    def channel(self) -> tuple:
        if self.field == "A":
            return ("photon", "particle")
        return (self.species, "particle" if self.piece == "+" else "anti")

    def __str__(self):
        dag = "†" if self.field == "psi+" else ""
        return f"{self.site}({self.piece}){dag}_{self.index}"


def relabel(op, sites: dict, indices: dict):
    if isinstance(op, FieldPiece):
        return replace(op, site=sites.get(op.site, op.site), index=indices.get(op.index, op.index))
    return op


@dataclass(frozen=True)
class Contraction:
    left: object
    right: object

    @property
    def category(self) -> str:
        ladders = isinstance(self.left, LadderOp) + isinstance(self.right, LadderOp)
        return ("propagator", "wavefunction", "delta")[ladders]

    def value(self):
        """Numeric value for two ladder operators; None when it stays symbolic."""
        if self.category != "delta":
            return None
        return int((self.left.mode, self.left.label) == (self.right.mode, self.right.label))

    def render(self) -> str:
        return f"[{_short(self.left)},{_short(self.right)}]"


def _short(op):
    if isinstance(op, FieldPiece):
        # a ladder partner pins the piece, so only field-field brackets show it
        dag = "†" if op.field == "psi+" else ""
        return f"{op.site}{dag}_{op.index}"
    return str(op)


@dataclass(frozen=True)
class OperatorWord:
    ops: tuple
    coeff: complex = 1
    factors: tuple = ()
    normal_ordered: bool = False

    def __mul__(self, other: "OperatorWord") -> "OperatorWord":
        return OperatorWord(self.ops + other.ops, self.coeff * other.coeff,
                            self.factors + other.factors, False)


@dataclass(frozen=True)
class Term:
    coeff: complex
    contractions: tuple
    factors: tuple = ()

    @property
    def forward(self) -> bool:
        """True when an incoming and an outgoing external operator contract directly."""
        return any(c.category == "delta" for c in self.contractions)

    def value(self):
        out = self.coeff
        for c in self.contractions:
            v = c.value()
            if v is None:
                raise ValueError("term contains symbolic contractions")
            out *= v
        return out

    def render(self) -> str:
        coeff = self.coeff.real if isinstance(self.coeff, complex) and not self.coeff.imag else self.coeff
        fac = " ".join(self.factors)
        body = "".join(c.render() for c in self.contractions)
        return f"{coeff:+g} {fac} {body}".replace("  ", " ")


def word(*ops, coeff=1, factors=()) -> OperatorWord:
    return OperatorWord(tuple(ops), coeff, tuple(factors))


def normal_order(w: OperatorWord) -> OperatorWord:
    """Creators to the left, annihilators to the right; contraction terms are dropped."""
    sign = 1
    creators, annihilators = [], []
    odd_annihilators = 0
    for op in w.ops:
        if op.annihilator:
            annihilators.append(op)
            odd_annihilators += op.odd
        else:
            creators.append(op)
            if op.odd and odd_annihilators % 2:
                sign = -sign
    return OperatorWord(tuple(creators + annihilators), w.coeff * sign, w.factors, True)


def _pairings(ops):
    """Yield (sign, contractions) for every nonvanishing full contraction."""
    if not ops:
        yield 1, ()
        return
    first, rest = ops[0], ops[1:]
    if not first.annihilator:
        return
    odd_between = 0
    for j, partner in enumerate(rest):
        if (not partner.annihilator and partner.channel == first.channel
                and partner.odd == first.odd):
            sign = -1 if (first.odd and odd_between % 2) else 1
            for sub_sign, sub in _pairings(rest[:j] + rest[j + 1:]):
                yield sign * sub_sign, (Contraction(first, partner),) + sub
        odd_between += partner.odd


def _as_sum(factor):
    if isinstance(factor, OperatorWord):
        return [factor]
    return list(factor)


def vev(*factors) -> list:
    """<0| f_1 f_2 ... |0> for words or sums of words, as a list of Terms.

    Words flagged normal-ordered contribute no internal contractions because
    every annihilator already sits right of every creator.
    """
    collected = {}
    for words in product(*(_as_sum(f) for f in factors)):
        total = words[0]
        for w in words[1:]:
            total = total * w
        for sign, contractions in _pairings(total.ops):
            key = (contractions, total.factors)
            collected[key] = collected.get(key, 0) + sign * total.coeff
    return [Term(c, k[0], k[1]) for k, c in collected.items() if c != 0]


def evaluate(terms) -> complex:
    return sum(t.value() for t in terms)


# --- free fields and interaction densities ---

def dirac_field(site, index, species="electron"):
    return [FieldPiece("psi", "+", site, index, species), FieldPiece("psi", "-", site, index, species)]


def dirac_adjoint_field(site, index, species="electron"):
    return [FieldPiece("psi+", "+", site, index, species), FieldPiece("psi+", "-", site, index, species)]


def photon_field(site, index):
    return [FieldPiece("A", "+", site, index), FieldPiece("A", "-", site, index)]


def normal_product(*fields, coeff=1, factors=()) -> list:
    """:phi_1 phi_2 ...: expanded into normal-ordered words of field pieces."""
    return [normal_order(OperatorWord(pieces, coeff, tuple(factors))) for pieces in product(*fields)]


def h_transverse(site, vector_index, left, right, species="electron") -> list:
    """:e M^j_{ll'} A_j psi+_l psi_l': at one site."""
    return normal_product(photon_field(site, vector_index), dirac_adjoint_field(site, left, species),
                          dirac_field(site, right, species),
                          factors=("e", f"M^{vector_index}_{{{left}{right}}}"))


def charge_density(site, index, species="electron", factors=()):
    """psi+_l psi_l at one site (not yet normal ordered)."""
    return [OperatorWord(p, 1, tuple(factors))
            for p in product(dirac_adjoint_field(site, index, species), dirac_field(site, index, species))]


def _normal_of_product(*sums, factors=()):
    out = []
    for words in product(*sums):
        total = words[0]
        for w in words[1:]:
            total = total * w
        out.append(normal_order(OperatorWord(total.ops, total.coeff, tuple(factors) + total.factors)))
    return out


SWAP_SITES = {"x": "y", "y": "x"}
SWAP_INDICES = {"i": "j", "j": "i", "l": "n", "n": "l", "l'": "n'", "n'": "l'"}


def merge_relabelled(terms, sites=SWAP_SITES, indices=SWAP_INDICES) -> list:
    """Combine terms that coincide after exchanging integration points x <-> y."""
    def image(term):
        return frozenset(Contraction(relabel(c.left, sites, indices), relabel(c.right, sites, indices))
                         for c in term.contractions)

    merged: list = []
    for term in terms:
        key = frozenset(term.contractions)
        for k, other in enumerate(merged):
            if image(other) == key and Counter(other.factors) == Counter(term.factors):
                merged[k] = replace(other, coeff=other.coeff + term.coeff)
                break
        else:
            merged.append(term)
    return [t for t in merged if t.coeff != 0]


def _orientation(c: Contraction) -> int:
    # Dirac propagator: theta(x0-y0)[x(+), y(+)†] - theta(y0-x0)[y(-)†, x(-)]; photon halves both enter with +
    return -1 if c.left.field == "psi+" else 1


def _pattern_key(term, sites, indices):
    def token(c):
        if c.category == "propagator":
            ends = (c.left, c.right)
            return ("prop", frozenset((relabel(o, sites, indices).site, relabel(o, sites, indices).index,
                                       o.field) for o in ends))
        return ("ext", Contraction(relabel(c.left, sites, indices), relabel(c.right, sites, indices)))
    return frozenset(token(c) for c in term.contractions)


@dataclass(frozen=True)
class PropagatorPattern:
    """Terms that time ordering combines into one propagator product."""

    coeff: complex
    members: tuple

    @property
    def consistent(self) -> bool:
        values = {m.coeff * _orientation(_propagator_of(m)) for m in self.members}
        return len(values) == 1

    def render(self) -> str:
        rep = self.members[0]
        body = "".join(c.render() for c in rep.contractions if c.category != "propagator")
        prop = _propagator_of(rep)
        return f"{self.coeff:+g} {' '.join(rep.factors)} {body} D({prop.left.site},{prop.right.site})"


def _propagator_of(term):
    props = [c for c in term.contractions if c.category == "propagator"]
    if len(props) != 1:
        raise ValueError("expected exactly one internal line")
    return props[0]


def propagator_patterns(terms, sites=SWAP_SITES, indices=SWAP_INDICES) -> list:
    """Group tree-level terms by contraction pattern, identifying x <-> y relabellings.

    Each group's coefficient is the sum of member coefficients weighted by the
    sign with which their Wightman half enters the time-ordered propagator.
    """
    groups: dict = {}
    for term in terms:
        own = _pattern_key(term, {}, {})
        image = _pattern_key(term, sites, indices)
        key = own if own in groups else image if image in groups else own
        groups.setdefault(key, []).append(term)
    out = []
    for members in groups.values():
        coeff = sum(m.coeff * _orientation(_propagator_of(m)) for m in members)
        out.append(PropagatorPattern(coeff, tuple(members)))
    return out


@dataclass
class DysonStructure:
    process: str
    order: int
    terms: list = field(default_factory=list)

    @property
    def nonforward(self) -> list:
        return [t for t in self.terms if not t.forward]

    @property
    def forward(self) -> list:
        return [t for t in self.terms if t.forward]

    @property
    def patterns(self) -> list:
        return propagator_patterns(self.nonforward)

    def render(self) -> str:
        return "\n".join(t.render() for t in self.terms)


def compton_externals():
    photon_out = LadderOp("b", 1, name="f'")
    electron_out = LadderOp("a", 1, name="a'")
    electron_in = LadderOp("a+", 0, name="a†")
    photon_in = LadderOp("b+", 0, name="f†")
    return photon_out, electron_out, electron_in, photon_in


def pair_externals():
    muon = LadderOp("a", 1, species="muon", name="b")
    antimuon = LadderOp("ac", 1, species="muon", name="b^c")
    positron = LadderOp("ac+", 0, name="a^c†")
    electron = LadderOp("a+", 0, name="a†")
    return muon, antimuon, positron, electron


def _dyson_prefactor(order):
    # (-i)^N / N!
    return {0: 1, 1: -1j, 2: -0.5}[order]


def dyson_n2_structure(process: str) -> DysonStructure:
    """Lowest-order e^2 contraction patterns of <out| :h_A(x)::h_A(y): |in>, times -1/2."""
    if process == "compton":
        f_out, a_out, a_in, f_in = compton_externals()
        hx = h_transverse("x", "i", "l", "l'")
        hy = h_transverse("y", "j", "n", "n'")
        terms = vev(word(f_out, a_out), hx, hy, word(a_in, f_in))
    elif process == "eemumu":
        b, bc, ac_in, a_in = pair_externals()
        hx = h_transverse("x", "i", "l", "l'", "electron") + h_transverse("x", "i", "l", "l'", "muon")
        hy = h_transverse("y", "j", "n", "n'", "electron") + h_transverse("y", "j", "n", "n'", "muon")
        terms = vev(word(b, bc), hx, hy, word(ac_in, a_in))
    else:
        raise ValueError(f"unknown process {process!r}")
    terms = [replace(t, coeff=t.coeff * _dyson_prefactor(2)) for t in terms]
    return DysonStructure(process, 2, terms)


def n1_structure(process: str, part: str) -> DysonStructure:
    """First-order matrix elements of the transverse ("A") or Coulomb ("C") density.

    For eemumu the Coulomb part is the electron-muon cross term rho_e(x) rho_mu(y).
    """
    if part not in ("A", "C"):
        raise ValueError("part must be 'A' or 'C'")
    if process == "compton":
        f_out, a_out, a_in, f_in = compton_externals()
        if part == "A":
            density = h_transverse("x", "i", "l", "l'")
        else:
            density = _normal_of_product(charge_density("x", "l"), charge_density("y", "l'"),
                                         factors=("e^2/2", "V(x-y)"))
        terms = vev(word(f_out, a_out), density, word(a_in, f_in))
    elif process == "eemumu":
        b, bc, ac_in, a_in = pair_externals()
        if part == "A":
            density = h_transverse("x", "i", "l", "l'", "electron") + h_transverse("x", "i", "l", "l'", "muon")
        else:
            density = _normal_of_product(charge_density("x", "l", "electron"),
                                         charge_density("y", "n", "muon"), factors=("e^2", "V(x-y)"))
        terms = vev(word(b, bc), density, word(ac_in, a_in))
    else:
        raise ValueError(f"unknown process {process!r}")
    terms = [replace(t, coeff=t.coeff * _dyson_prefactor(1)) for t in terms]
    return DysonStructure(process, 1, terms)


def forward_term(process: str = "compton") -> DysonStructure:
    """N = 0 overlap <out|in>."""
    if process == "compton":
        f_out, a_out, a_in, f_in = compton_externals()
        terms = vev(word(f_out, a_out, a_in, f_in))
    else:
        b, bc, ac_in, a_in = pair_externals()
        terms = vev(word(b, bc, ac_in, a_in))
    return DysonStructure(process, 0, terms)
