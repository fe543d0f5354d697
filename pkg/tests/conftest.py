"""Shared helpers: seeded random generators for algebraic objects and an
independent reimplementation of the leaf-rerooting map used as an oracle."""

import random
from fractions import Fraction

import pytest

from torelli.lie import get_context
from torelli.trees import TreeSum, join
from torelli.words import GroupWord, comm, get_table, parse_word, theta

SEED = 1729

# One line per acceptance criterion, printed in the terminal summary.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return random.Random(SEED)


def rand_coeff(rng):
    num = rng.choice([-3, -2, -1, 1, 2, 3])
    den = rng.choice([1, 1, 2])
    return Fraction(num, den)


def rand_lie(ctx, rng, terms=3, min_degree=1, max_degree=None):
    """Random sparse Lie element with small rational coefficients."""
    max_degree = max_degree or ctx.max_degree
    out = ctx.zero()
    for _ in range(terms):
        d = rng.randint(min_degree, max_degree)
        basis = ctx.lyndon_basis(d)
        out = out + ctx.monomial(rng.choice(basis), rand_coeff(rng))
    return out


def rand_homogeneous(ctx, rng, degree, terms=2):
    out = ctx.zero()
    basis = ctx.lyndon_basis(degree)
    for _ in range(terms):
        out = out + ctx.monomial(rng.choice(basis), rand_coeff(rng))
    return out


def rand_tree_sum(genus, rng, degree, terms=2):
    """Random tree sum of the given degree built from joins of Lie elements."""
    ctx = get_context(genus, degree + 1)
    out = TreeSum(genus)
    for _ in range(terms):
        d1 = rng.randint(1, degree + 1)
        d2 = degree + 2 - d1
        if d1 < 1 or d2 < 1 or (d1 == 1 and d2 == 1):
            continue
        x = rand_homogeneous(ctx, rng, d1, terms=1)
        y = rand_homogeneous(ctx, rng, d2, terms=1)
        out = out + join(x, y)
    return out


def rand_word(genus, rng, length):
    letters = []
    for _ in range(length):
        letters.append((rng.choice("ab"), rng.randint(1, genus),
                        rng.choice((1, -1))))
    return GroupWord(letters)


def rand_null_word(genus, rng, half_length=2):
    """A random null-homologous word: a product of one or two commutators."""
    w = comm(rand_word(genus, rng, half_length), rand_word(genus, rng, half_length))
    if rng.random() < 0.5:
        w = w * comm(rand_word(genus, rng, 1), rand_word(genus, rng, 1))
    return w


# --- independent eta oracle ---------------------------------------------------

def _graph_of_join(u, v):
    """Adjacency-list picture of the joined tree: node -> cyclically ordered
    neighbors, leaf -> (color, unique neighbor).  Node ids are negative ints,
    leaf ids nonnegative."""
    nodes = {}
    leaves = {}
    counter = {"leaf": 0, "node": -1}

    def build(tree):
        if isinstance(tree, int):
            lid = counter["leaf"]
            counter["leaf"] += 1
            leaves[lid] = [tree, None]
            return lid
        nid = counter["node"]
        counter["node"] -= 1
        nodes[nid] = [None, None, None]
        left = build(tree[0])
        right = build(tree[1])
        for child, slot in ((left, 1), (right, 2)):
            nodes[nid][slot] = child
            if child in leaves:
                leaves[child][1] = nid
            else:
                nodes[child][0] = nid
        return nid

    ru = build(u)
    rv = build(v)
    for r, other in ((ru, rv), (rv, ru)):
        if r in leaves:
            leaves[r][1] = other
        else:
            nodes[r][0] = other
    return nodes, leaves


def independent_eta(ts):
    """Recompute the leaf-reroot map from the adjacency picture (an oracle)."""
    from torelli.trees import DerivationElement
    genus = ts.genus
    per_degree = {}
    for (u, v), coeff in ts.terms.items():
        from torelli.trees import tree_leaf_count
        degree = tree_leaf_count(u) + tree_leaf_count(v) - 2
        ctx = get_context(genus, degree + 1)
        nodes, leaves = _graph_of_join(u, v)

        def expand(vertex, came_from):
            if vertex in leaves:
                return ctx.generator(leaves[vertex][0])
            nbrs = nodes[vertex]
            k = nbrs.index(came_from)
            first, second = nbrs[(k + 1) % 3], nbrs[(k + 2) % 3]
            return expand(first, vertex).bracket(expand(second, vertex))

        acc = per_degree.setdefault(degree, {})
        for lid, (color, nbr) in leaves.items():
            lie = expand(nbr, lid)
            for w, c in lie.terms.items():
                key = (color, w)
                val = acc.get(key, 0) + coeff * c
                if val:
                    acc[key] = val
                else:
                    del acc[key]
    from torelli.trees import DerivationElement
    return {d: DerivationElement(genus, d, acc) for d, acc in per_degree.items()}


_POOLS = {}


def twist_pool(genus, degree, count, seed=SEED):
    """Deterministic pool of twist values of random null-homologous lifts."""
    key = (genus, degree, count, seed)
    if key not in _POOLS:
        from torelli.mcg import SeparatingTwist, twist_value
        rng = random.Random(seed)
        table = get_table(genus, degree)
        out = []
        while len(out) < count:
            lift = rand_null_word(genus, rng)
            try:
                out.append(twist_value(table, SeparatingTwist(lift)))
            except Exception:
                continue
        _POOLS[key] = out
    return _POOLS[key]
