"""Tree diagrams: unitrivalent trees with leaves colored by the symplectic
basis, presented as two rooted planar binary trees joined root to root.

Swapping the two children of a node flips the sign (the cyclic orientation at
a trivalent vertex); swapping the two halves of a join does not.  Rather than
normalizing modulo the local relations symbolically, canonical equality of
tree sums is equality of images under eta, which sends a diagram to the sum
over its leaves of (leaf color) tensor (bracket of the diagram rerooted at
that leaf) and is injective over Q.  The symbolic presentation is retained
because the contraction operations and the half-tree bookkeeping of the mod-2
cokernel map need it.

Degree of a diagram = number of trivalent vertices = total leaves - 2.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import gcd

from .exact_linalg import (hnf, quotient_diagonal, rref,
                           reduce_mod_rowspace, solve_integer_combination)
from .lie import LieElement, get_context, ideal_omega_component


def lie_lift(ctx, x):
    """Copy a Lie element into another context of the same genus, truncating."""
    if x.ctx is ctx:
        return x
    assert x.ctx.genus == ctx.genus
    return LieElement(ctx, {w: c for w, c in x.terms.items()
                            if len(w) <= ctx.max_degree})


def omega_pairing(genus, x, y):
    """Intersection form on basis letters: omega(a_i, b_i) = 1 = -omega(b_i, a_i)."""
    if y == x + genus:
        return 1
    if x == y + genus:
        return -1
    return 0


def ell_pairing(genus, x, y):
    """One-sided splitting of omega: ell(a_i, b_i) = 1, zero otherwise."""
    return 1 if y == x + genus else 0


# --- rooted planar binary trees (nested tuples, int leaves) -----------------

def tree_key(tree):
    if isinstance(tree, int):
        return (0, tree)
    return (1, tree_key(tree[0]), tree_key(tree[1]))


def tree_leaf_count(tree):
    return 1 if isinstance(tree, int) else (tree_leaf_count(tree[0])
                                            + tree_leaf_count(tree[1]))


def tree_colors(tree):
    if isinstance(tree, int):
        yield tree
    else:
        yield from tree_colors(tree[0])
        yield from tree_colors(tree[1])


def canonical_tree(tree):
    """Sorted-children form with the accumulated AS sign, or (None, 0) if the
    tree vanishes (a node with equal subtrees)."""
    if isinstance(tree, int):
        return tree, 1
    left, sl = canonical_tree(tree[0])
    if left is None:
        return None, 0
    right, sr = canonical_tree(tree[1])
    if right is None:
        return None, 0
    if left == right:
        return None, 0
    if tree_key(left) <= tree_key(right):
        return (left, right), sl * sr
    return (right, left), -sl * sr


def _leaf_decompositions(t, rest):
    """(color, tree hanging at that leaf) for every leaf of t, where rest is
    the subtree across the root edge of t.  The rerooted planar order follows
    the cyclic orientation at each node."""
    if isinstance(t, int):
        return [(t, rest)]
    t1, t2 = t
    return (_leaf_decompositions(t1, (t2, rest))
            + _leaf_decompositions(t2, (rest, t1)))


def join_leaf_decompositions(u, v):
    return _leaf_decompositions(u, v) + _leaf_decompositions(v, u)


class TreeSum:
    """Formal rational combination of joined trees at a fixed genus."""

    __slots__ = ("genus", "terms")

    def __init__(self, genus, terms=None):
        self.genus = genus
        self.terms = terms if terms is not None else {}

    def _check(self, other):
        if self.genus != other.genus:
            raise ValueError("genus mismatch")

    @staticmethod
    def single(genus, u, v, coeff=1):
        ts = TreeSum(genus)
        ts.add_join(u, v, Fraction(coeff))
        return ts

    def add_join(self, u, v, coeff):
        if not coeff:
            return
        u, su = canonical_tree(u)
        if u is None:
            return
        v, sv = canonical_tree(v)
        if v is None:
            return
        if tree_key(v) < tree_key(u):
            u, v = v, u
        key = (u, v)
        c = self.terms.get(key, 0) + coeff * su * sv
        if c:
            self.terms[key] = c
        else:
            self.terms.pop(key, None)

    def __add__(self, other):
        self._check(other)
        out = TreeSum(self.genus, dict(self.terms))
        for (u, v), c in other.terms.items():
            out.add_join(u, v, c)
        return out

    def __sub__(self, other):
        return self + (other * -1)

    def __mul__(self, scalar):
        c = Fraction(scalar)
        if not c:
            return TreeSum(self.genus)
        return TreeSum(self.genus, {k: c * v for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def degrees(self):
        return sorted({tree_leaf_count(u) + tree_leaf_count(v) - 2
                       for (u, v) in self.terms})

    def degree_part(self, d):
        out = TreeSum(self.genus)
        for (u, v), c in self.terms.items():
            if tree_leaf_count(u) + tree_leaf_count(v) - 2 == d:
                out.terms[(u, v)] = c
        return out

    def is_symbolically_zero(self):
        return not self.terms

    def eta(self):
        """Image in H tensor L as a DerivationElement (homogeneous input)."""
        ds = self.degrees()
        if not ds:
            raise ValueError("eta of the symbolic zero needs a degree; "
                             "use eta_graded or DerivationElement.zero")
        if len(ds) > 1:
            raise ValueError(f"mixed degrees {ds}; use eta_graded")
        return self.eta_graded()[ds[0]]

    def eta_graded(self):
        """{degree: DerivationElement} over the degrees present."""
        per = {}
        g = self.genus
        for (u, v), c in self.terms.items():
            d = tree_leaf_count(u) + tree_leaf_count(v) - 2
            if d == 0:
                raise ValueError("degree-0 join has no derivation image")
            ctx = get_context(g, d + 1)
            acc = per.setdefault(d, {})
            for color, tree in join_leaf_decompositions(u, v):
                lie = ctx.from_tree(tree)
                for w, cw in lie.terms.items():
                    key = (color, w)
                    val = acc.get(key, 0) + c * cw
                    if val:
                        acc[key] = val
                    else:
                        del acc[key]
        return {d: DerivationElement(g, d, acc) for d, acc in per.items()}

    def _pairing_product(self, other, pairing):
        self._check(other)
        g = self.genus
        out = TreeSum(g)
        for (u1, v1), c1 in self.terms.items():
            if tree_leaf_count(u1) + tree_leaf_count(v1) == 2:
                raise ValueError("degree-0 join cannot be glued")
            dec1 = join_leaf_decompositions(u1, v1)
            for (u2, v2), c2 in other.terms.items():
                if tree_leaf_count(u2) + tree_leaf_count(v2) == 2:
                    raise ValueError("degree-0 join cannot be glued")
                for x, tx in dec1:
                    for y, ty in join_leaf_decompositions(u2, v2):
                        w = pairing(g, x, y)
                        if w:
                            out.add_join(tx, ty, c1 * c2 * w)
        return out

    def bracket(self, other):
        """Lie bracket: sum of all omega-gluings of one leaf to one leaf."""
        return self._pairing_product(other, omega_pairing)

    def contract(self, other):
        """The one-sided contraction: glue with the pairing ell instead of omega."""
        return self._pairing_product(other, ell_pairing)

    def equals(self, other):
        """Canonical equality, i.e. equality of eta images degreewise."""
        self._check(other)
        diff = self - other
        return all(dv.is_zero() for dv in diff.eta_graded().values())

    def to_json(self):
        g = self.genus
        ctx = get_context(g, 1)

        def render(tree):
            if isinstance(tree, int):
                return ctx.letter_name(tree)
            return [render(tree[0]), render(tree[1])]

        out = []
        for (u, v) in sorted(self.terms, key=lambda k: (tree_key(k[0]), tree_key(k[1]))):
            c = self.terms[(u, v)]
            out.append({"coeff": {"num": c.numerator, "den": c.denominator},
                        "left": render(u), "right": render(v)})
        return out

    def __repr__(self):
        return f"<TreeSum g={self.genus} {len(self.terms)} joins>"


def join(x, y, allow_degree0=False):
    """Bilinear join of two Lie elements root to root.

    Degree-0 joins (both factors in degree 1) are only meaningful inside the
    bounding-pair cancellation and must be requested explicitly.
    """
    if x.ctx.genus != y.ctx.genus:
        raise ValueError("genus mismatch")
    out = TreeSum(x.ctx.genus)
    for cx, tx in x.rooted_terms():
        for cy, ty in y.rooted_terms():
            if not allow_degree0 and isinstance(tx, int) and isinstance(ty, int):
                raise ValueError("degree-0 join; pass allow_degree0=True")
            out.add_join(tx, ty, cx * cy)
    return out


def eta(ts):
    return ts.eta()


def tree_bracket(p, q):
    return p.bracket(q)


def contract(p, q):
    return p.contract(q)


class DerivationElement:
    """Element of H tensor L_{degree+1}: sparse map (letter, word) -> Fraction.

    Under h |-> omega(h, -) this is the derivation z |-> sum omega(h, z) * w.
    """

    __slots__ = ("genus", "degree", "terms")

    def __init__(self, genus, degree, terms=None):
        self.genus = genus
        self.degree = degree
        self.terms = terms if terms is not None else {}

    @staticmethod
    def zero(genus, degree):
        return DerivationElement(genus, degree)

    def _check(self, other):
        if self.genus != other.genus:
            raise ValueError("genus mismatch")

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, DerivationElement):
            return NotImplemented
        return (self.genus, self.degree, self.terms) == \
               (other.genus, other.degree, other.terms)

    def __hash__(self):
        return hash((self.genus, self.degree, frozenset(self.terms.items())))

    def __add__(self, other):
        self._check(other)
        assert self.degree == other.degree
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                del out[k]
        return DerivationElement(self.genus, self.degree, out)

    def __sub__(self, other):
        return self + (other * -1)

    def __mul__(self, scalar):
        c = Fraction(scalar)
        if not c:
            return DerivationElement(self.genus, self.degree)
        return DerivationElement(self.genus, self.degree,
                                 {k: c * v for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def denominator_lcm(self):
        q = 1
        for c in self.terms.values():
            q = q * c.denominator // gcd(q, c.denominator)
        return q

    def is_integral(self):
        return all(c.denominator == 1 for c in self.terms.values())

    def value_on_letter(self, z):
        """The derivation applied to a generator, as a Lie element."""
        ctx = get_context(self.genus, self.degree + 1)
        acc = {}
        for (h, w), c in self.terms.items():
            s = omega_pairing(self.genus, h, z)
            if s:
                v = acc.get(w, 0) + c * s
                if v:
                    acc[w] = v
                else:
                    del acc[w]
        return LieElement(ctx, acc)

    def apply(self, x):
        """Apply the derivation to a Lie element (Leibniz over bracketing trees)."""
        return self.apply_in(x.ctx, x)

    def _apply_tree(self, ctx, values, tree):
        if isinstance(tree, int):
            return values[tree].truncated(ctx.max_degree)
        left = ctx.from_tree(tree[0])
        right = ctx.from_tree(tree[1])
        dl = self._apply_tree(ctx, values, tree[0])
        dr = self._apply_tree(ctx, values, tree[1])
        return dl.bracket(right) + left.bracket(dr)

    def bracket(self, other):
        """Commutator of the associated derivations, back in H tensor L form."""
        self._check(other)
        g = self.genus
        k = self.degree + other.degree
        if k + 1 > 5:
            raise ValueError(
                f"derivation commutator of degrees {self.degree} and "
                f"{other.degree} lands beyond the supported class")
        ctx = get_context(g, k + 1)
        terms = {}
        for z in range(1, 2 * g + 1):
            val = (self.apply_in(ctx, other.value_on_letter(z))
                   - other.apply_in(ctx, self.value_on_letter(z)))
            if val.is_zero():
                continue
            # z = a_i contributes -b_i tensor val; z = b_i contributes a_i tensor val
            if z <= g:
                h, sign = g + z, -1
            else:
                h, sign = z - g, 1
            for w, c in val.terms.items():
                key = (h, w)
                v = terms.get(key, 0) + sign * c
                if v:
                    terms[key] = v
                else:
                    del terms[key]
        return DerivationElement(g, k, terms)

    def apply_in(self, ctx, x):
        """Apply the derivation to x, computing in the given (larger) context."""
        lifted = lie_lift(ctx, x)
        values = {z: lie_lift(ctx, self.value_on_letter(z))
                  for z in range(1, 2 * self.genus + 1)}
        out = ctx.zero()
        for c, tree in lifted.rooted_terms():
            out = out + self._apply_tree(ctx, values, tree) * c
        return out

    def bracket_map_image(self):
        """Image under H tensor L_{k+1} -> L_{k+2}; zero iff symplectic."""
        ctx = get_context(self.genus, self.degree + 2)
        out = ctx.zero()
        for (h, w), c in self.terms.items():
            out = out + ctx.generator(h).bracket(ctx.monomial(w)) * c
        return out

    def is_symplectic(self):
        if self.degree + 2 > 5:
            raise ValueError("bracket-map check unavailable beyond degree 3; "
                             "use the degree-4 lattice membership instead")
        return self.bracket_map_image().is_zero()

    def multidegrees(self):
        return sorted({_term_multidegree(self.genus, k) for k in self.terms})

    def component(self, md):
        return DerivationElement(
            self.genus, self.degree,
            {k: c for k, c in self.terms.items()
             if _term_multidegree(self.genus, k) == md})

    def component_vector(self, md):
        basis = component_basis(self.genus, self.degree, md)
        index = {k: i for i, k in enumerate(basis)}
        vec = [Fraction(0)] * len(basis)
        for k, c in self.terms.items():
            if _term_multidegree(self.genus, k) == md:
                vec[index[k]] = c
        return vec

    def to_json(self):
        ctx = get_context(self.genus, 1)
        out = []
        for (h, w) in sorted(self.terms):
            c = self.terms[(h, w)]
            out.append({"generator": ctx.letter_name(h), "word": list(w),
                        "num": c.numerator, "den": c.denominator})
        return out

    def __repr__(self):
        return f"<Derivation g={self.genus} deg={self.degree} {len(self.terms)} terms>"


def derivation_bracket(d1, d2):
    return d1.bracket(d2)


def _term_multidegree(genus, key):
    h, w = key
    counts = [0] * (2 * genus)
    counts[h - 1] += 1
    for letter in w:
        counts[letter - 1] += 1
    return tuple(counts)


@lru_cache(maxsize=None)
def component_basis(genus, degree, md):
    """Ordered basis of the md component of H tensor L_{degree+1}."""
    if len(md) != 2 * genus or sum(md) != degree + 2 or any(c < 0 for c in md):
        raise ValueError(f"invalid multidegree {md} for degree {degree}")
    ctx = get_context(genus, degree + 1)
    out = []
    for h in range(1, 2 * genus + 1):
        if md[h - 1] == 0:
            continue
        rest = list(md)
        rest[h - 1] -= 1
        for w in ctx.lyndon_basis(degree + 1):
            counts = [0] * (2 * genus)
            for letter in w:
                counts[letter - 1] += 1
            if tuple(counts) == tuple(rest):
                out.append((h, w))
    return tuple(out)


# --- integer tree lattices --------------------------------------------------

def _colorings(md):
    colors = []
    for i, c in enumerate(md):
        colors.extend([i + 1] * c)
    return sorted(set(permutations(colors)))


def _shapes(degree):
    """Join presentations of every diagram shape of the given degree.

    Degrees 2 and 3 have a single shape (a chain of nodes); degree 4 has the
    chain and the shape with a central node.
    """
    if degree == 2:
        return [lambda c: ((c[0], c[1]), (c[2], c[3]))]
    if degree == 3:
        return [lambda c: ((c[0], c[1]), (c[2], (c[3], c[4])))]
    if degree == 4:
        return [lambda c: ((c[0], c[1]), (c[2], (c[3], (c[4], c[5])))),
                lambda c: ((c[0], c[1]), ((c[2], c[3]), (c[4], c[5])))]
    raise ValueError(f"no tree shapes tabulated for degree {degree}")


def basis_colored_trees(genus, degree, md):
    """All basis-colored diagrams of the degree and multidegree, as TreeSums."""
    out = []
    for coloring in _colorings(md):
        for shape in _shapes(degree):
            u, v = shape(coloring)
            ts = TreeSum.single(genus, u, v)
            if ts.terms:
                out.append(ts)
    return out


def half_symmetric_generators(genus, md):
    """The elements (1/2) eta(u -- u) over rooted trees u with half content.

    Returns (tree u, integer eta vector) pairs; empty unless md is even.
    Only left-normed u are needed: their brackets already span degree 3.
    """
    if any(c % 2 for c in md):
        return []
    half = tuple(c // 2 for c in md)
    colors = []
    for i, c in enumerate(half):
        colors.extend([i + 1] * c)
    out = []
    basis = component_basis(genus, sum(md) - 2, md)
    index = {k: i for i, k in enumerate(basis)}
    for (x, y, z) in sorted(set(permutations(colors))):
        u = ((x, y), z)
        cu, _ = canonical_tree(u)
        if cu is None:
            continue
        ts = TreeSum.single(genus, u, u)
        if not ts.terms:
            continue
        vec = ts.eta().component_vector(md)
        ivec = []
        for v in vec:
            assert v.denominator == 1 and v.numerator % 2 == 0
            ivec.append(v.numerator // 2)
        out.append((u, tuple(ivec)))
    return out


def _eta_int_vector(ts, md):
    vec = ts.eta().component_vector(md)
    out = []
    for v in vec:
        assert v.denominator == 1
        out.append(v.numerator)
    return tuple(out)


@lru_cache(maxsize=None)
def tree_lattice(genus, degree, md):
    """HNF lattice of eta images of integer diagrams in the md component."""
    basis = component_basis(genus, degree, md)
    rows = [_eta_int_vector(ts, md) for ts in basis_colored_trees(genus, degree, md)]
    return hnf(rows, ambient_dim=len(basis))


@lru_cache(maxsize=None)
def degree4_presentation(genus, md):
    """Generator list for the md component of the degree-4 derivation lattice.

    Returns (rows, half_trees) where rows lists the integer vectors of all
    basis-colored diagrams followed by the half-symmetric generators, and
    half_trees[i] is the rooted tree of the generator at rows[len - len(half_trees) + i].
    Together the rows generate the full integral degree-4 symplectic
    derivation lattice; the diagram rows alone generate its tree sublattice.
    """
    rows = [_eta_int_vector(ts, md) for ts in basis_colored_trees(genus, 4, md)]
    half = half_symmetric_generators(genus, md)
    rows.extend(vec for (_u, vec) in half)
    return tuple(rows), tuple(u for (u, _vec) in half)


@lru_cache(maxsize=None)
def full_degree4_lattice(genus, md):
    rows, _ = degree4_presentation(genus, md)
    basis = component_basis(genus, 4, md)
    return hnf(rows, ambient_dim=len(basis))


def mod1_class_is_zero(v):
    """Whether a degree-4 derivation element lies in the integer tree lattice.

    Exact per multidegree component: with q the denominator lcm, tests q*v in
    q*Lattice.  Returns (verdict, failing multidegrees).
    """
    assert v.degree == 4
    failing = []
    for md in v.multidegrees():
        vec = v.component_vector(md)
        q = 1
        for c in vec:
            q = q * c.denominator // gcd(q, c.denominator)
        ivec = [int(c * q) for c in vec]
        lat = tree_lattice(v.genus, 4, md)
        if q > 1:
            lat = lat.scaled(q)
        if not lat.contains(ivec):
            failing.append(md)
    return (not failing), tuple(failing)


def congruent_mod_trees(v, w):
    """Whether two derivation elements of equal degree differ by an integer
    combination of diagrams (the displayed congruences of the computation)."""
    assert v.degree == w.degree
    diff = v - w
    ok = True
    for md in diff.multidegrees():
        vec = diff.component_vector(md)
        q = 1
        for c in vec:
            q = q * c.denominator // gcd(q, c.denominator)
        ivec = [int(c * q) for c in vec]
        lat = tree_lattice(v.genus, diff.degree, md)
        if q > 1:
            lat = lat.scaled(q)
        if not lat.contains(ivec):
            ok = False
    return ok


def varpi(v):
    """The mod-2 cokernel class of an integral degree-4 derivation element.

    Presents v as an integer combination of diagram generators and
    half-symmetric generators; the class is the sum of bracket(u) over the
    half-symmetric generators with odd coefficient, in L_3 tensor GF(2).
    Well defined because relations among the generators have even
    half-symmetric part.
    """
    assert v.degree == 4
    if not v.is_integral():
        raise ValueError("varpi needs an integral element")
    g = v.genus
    out = 0
    for md in v.multidegrees():
        rows, half_trees = degree4_presentation(g, md)
        target = [int(c) for c in v.component_vector(md)]
        combo = solve_integer_combination(rows, target, width=len(target))
        if combo is None:
            raise ValueError(f"component {md} is outside the degree-4 "
                             "derivation lattice")
        n_half = len(half_trees)
        for i in range(n_half):
            if combo[len(rows) - n_half + i] % 2:
                out ^= l3_mod2_bits(g, half_trees[i])
    return out


@lru_cache(maxsize=None)
def _l3_basis_index(genus):
    ctx = get_context(genus, 3)
    return {w: i for i, w in enumerate(ctx.lyndon_basis(3))}


def l3_mod2_bits(genus, tree_or_elt):
    """A degree-3 bracket (tree or Lie element) as a bitmask over the Lyndon
    basis of L_3, mod 2."""
    ctx = get_context(genus, 3)
    x = ctx.from_tree(tree_or_elt) if not hasattr(tree_or_elt, "terms") else tree_or_elt
    index = _l3_basis_index(genus)
    bits = 0
    for w, c in x.terms.items():
        assert c.denominator == 1
        if c.numerator % 2:
            bits ^= 1 << index[w]
    return bits


@lru_cache(maxsize=None)
def _a_quotient_basis(genus):
    """Lyndon words of length 3 in the a-letters only (the quotient by all b_i)."""
    ctx = get_context(genus, 3)
    return tuple(w for w in ctx.lyndon_basis(3) if all(l <= genus for l in w))


def project_l3_to_a(genus, bits):
    """Image of an L_3 mod-2 class under killing every b generator.

    Words using a b letter die; pure a-words survive and form the Lyndon basis
    of the free Lie algebra on the a generators.
    """
    ctx = get_context(genus, 3)
    basis = ctx.lyndon_basis(3)
    abasis = _a_quotient_basis(genus)
    aindex = {w: i for i, w in enumerate(abasis)}
    out = 0
    for i, w in enumerate(basis):
        if (bits >> i) & 1 and w in aindex:
            out ^= 1 << aindex[w]
    return out


# --- quotients for the closed surface ---------------------------------------

def lcst_component_diagonal(genus, md):
    """Invariant factors of (degree-4 derivation lattice)/(tree lattice) in
    the md component."""
    basis = component_basis(genus, 4, md)
    rows, _ = degree4_presentation(genus, md)
    sub = tree_lattice(genus, 4, md)
    sup = hnf(rows, ambient_dim=len(basis))
    if sup.rank == 0:
        return []
    return quotient_diagonal(sub.rows, rows, len(basis))


def all_multidegrees(genus, total):
    """All color-count vectors of the given total over 2g colors."""
    def rec(slots, left):
        if slots == 1:
            yield (left,)
            return
        for c in range(left + 1):
            for rest in rec(slots - 1, left - c):
                yield (c,) + rest
    return list(rec(2 * genus, total))


def lcst_full_diagonals(genus):
    """Invariant factors of the full degree-4 quotient, all components combined."""
    out = []
    for md in all_multidegrees(genus, 6):
        out.extend(d for d in lcst_component_diagonal(genus, md))
    return sorted(out)


@lru_cache(maxsize=None)
def odbar_subspace(genus, degree):
    """RREF data of the subspace of H tensor L_{degree+1} that dies in the
    closed-surface derivation quotient: H tensor <<omega>> plus the inner part
    omega tensor L_degree pushed through the bracket."""
    d = degree
    ctx = get_context(genus, d + 1)
    basis = []
    for h in range(1, 2 * genus + 1):
        for w in ctx.lyndon_basis(d + 1):
            basis.append((h, w))
    index = {k: i for i, k in enumerate(basis)}
    rows = []

    def add_elt(terms):
        row = [Fraction(0)] * len(basis)
        for k, c in terms.items():
            row[index[k]] = c
        rows.append(row)

    for h in range(1, 2 * genus + 1):
        for x in ideal_omega_component(ctx, d + 1):
            add_elt({(h, w): c for w, c in x.terms.items()})
    ctx_low = get_context(genus, d)
    for w in ctx_low.lyndon_basis(d):
        y = ctx.monomial(w)
        terms = {}
        for i in range(1, genus + 1):
            ai, bi = ctx.generator(i), ctx.generator(genus + i)
            for h, val in ((i, bi.bracket(y)), (genus + i, ai.bracket(y) * -1)):
                for ww, c in val.terms.items():
                    key = (h, ww)
                    vv = terms.get(key, 0) + c
                    if vv:
                        terms[key] = vv
                    else:
                        del terms[key]
        add_elt(terms)
    reduced, pivots = rref(rows)
    return basis, reduced, pivots


def odbar_reduce(v):
    """Canonical representative of a derivation element in the closed-surface
    quotient (rational coefficients)."""
    basis, reduced, pivots = odbar_subspace(v.genus, v.degree)
    index = {k: i for i, k in enumerate(basis)}
    vec = [Fraction(0)] * len(basis)
    for k, c in v.terms.items():
        vec[index[k]] = c
    out = reduce_mod_rowspace(vec, reduced, pivots)
    return DerivationElement(v.genus, v.degree,
                             {basis[i]: c for i, c in enumerate(out) if c})
