"""
Seeded random instances for the command line and the test sweeps.

Every generator takes a random.Random so that a seed reproduces the instance.
"""

import random
from fractions import Fraction
from typing import List, Optional, Sequence, Set

from .core import complete_instance, make_instance, path_instance
from .grid import GridInstance, Rect
from .models import Instance
from .variant_hierarchy import CategoryTree


def random_values(rng: random.Random, n: int, top: int = 6, denominators: Sequence[int] = (1, 2, 3)) -> List[Fraction]:
    """n positive rationals with small numerators; ties are frequent on purpose."""
    return [Fraction(rng.randint(1, top), rng.choice(denominators)) for _ in range(n)]


def _connected_subset(rng: random.Random, adjacency: List[Set[int]], k: int) -> Set[int]:
    start = rng.randrange(len(adjacency))
    chosen = {start}
    while len(chosen) < k:
        frontier = sorted({u for v in chosen for u in adjacency[v]} - chosen)
        if not frontier:
            break
        chosen.add(rng.choice(frontier))
    return chosen


def random_connected_instance(rng: random.Random, n: int, k: int = 1, extra_edge_prob: float = 0.3) -> Instance:
    """A random spanning tree plus extra edges, with a connected S* of up to k vertices."""
    edges = set()
    for v in range(1, n):
        edges.add((rng.randrange(v), v))
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < extra_edge_prob:
                edges.add((u, v))
    adjacency: List[Set[int]] = [set() for _ in range(n)]
    for u, v in edges:
        adjacency[u].add(v)
        adjacency[v].add(u)
    special = _connected_subset(rng, adjacency, k) if k else set()
    return make_instance(random_values(rng, n), sorted(edges), special)


def random_complete_instance(rng: random.Random, n: int, k: int = 1) -> Instance:
    return complete_instance(random_values(rng, n), rng.sample(range(n), k))


def random_path_instance(rng: random.Random, n: int, k: int = 1) -> Instance:
    start = rng.randrange(n - k + 1)
    return path_instance(random_values(rng, n), range(start, start + k))


def random_classes(rng: random.Random, items: Sequence[int], largest: int = 3) -> List[List[int]]:
    """Shuffle the items and cut them into classes of 1..largest elements."""
    pool = list(items)
    rng.shuffle(pool)
    classes = []
    while pool:
        size = rng.randint(1, min(largest, len(pool)))
        classes.append(sorted(pool[:size]))
        pool = pool[size:]
    return classes


def random_tree(
    rng: random.Random, n_leaves: int, zero_leaves: bool = False, special: bool = True
) -> CategoryTree:
    """Random category tree: every internal node has at least two children.

    Labels are dotted codes ("1", "1.2", ...). With special set, S* is a random
    non-root node.
    """
    entries: List[tuple] = []

    def grow(count: int, parent: Optional[int], label: str) -> None:
        index = len(entries)
        if count == 1:
            low = 0 if zero_leaves else 1
            entries.append((label, parent, Fraction(rng.randint(low, 6), rng.choice((1, 2)))))
            return
        entries.append((label, parent, None))
        parts = rng.randint(2, min(count, 4))
        cuts = sorted(rng.sample(range(1, count), parts - 1))
        sizes = [b - a for a, b in zip([0] + cuts, cuts + [count])]
        for i, size in enumerate(sizes, start=1):
            grow(size, index, f"{label}.{i}")

    grow(n_leaves, None, "1")
    tree = CategoryTree.from_parents(entries)
    if special and len(entries) > 1:
        return tree.with_special(rng.randrange(1, len(entries)))
    return tree


def random_grid(
    rng: random.Random, l: int, w: int, vacancies: int = 0, with_special: bool = True
) -> GridInstance:
    """Random grid with a random S* rectangle and a few vacant cells outside it."""
    special = None
    if with_special:
        a, b = sorted(rng.sample(range(1, l + 1), 2)) if l > 1 else (1, 1)
        c, d = sorted(rng.sample(range(1, w + 1), 2)) if w > 1 else (1, 1)
        if rng.random() < 0.5:
            b = a
        if rng.random() < 0.5:
            d = c
        special = Rect(a=a, b=b, c=c, d=d)
    free = [
        (x, y) for x in range(1, l + 1) for y in range(1, w + 1)
        if special is None or not (special.a <= x <= special.b and special.c <= y <= special.d)
    ]
    vacant = frozenset(rng.sample(free, min(vacancies, max(len(free) - 1, 0))))
    mu = {cell: value for cell, value in zip(
        ((x, y) for x in range(1, l + 1) for y in range(1, w + 1)),
        random_values(rng, l * w),
    ) if cell not in vacant}
    return GridInstance(l=l, w=w, mu=mu, vacancies=vacant, special=special)
