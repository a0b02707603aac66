"""
Grid variants.

Elements are the non-vacant cells of an l x w grid and blocks are rectangles
intersected with V. The hierarchical (guillotine) variants are solved by
memoised recursion over subgrids; free tilings are enumerated for small grids.
Redistricting with hierarchical rectangles reuses the same recursion.

Cells are (x, y) with 1 <= x <= l (column) and 1 <= y <= w (row); vertex ids
follow row-major order over the non-vacant cells.
"""

import logging
from fractions import Fraction
from functools import cache, cached_property
from typing import Dict, FrozenSet, Iterator, List, NamedTuple, Optional, Set, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .config import load_settings
from .core import classify_value, counts, percentile_from_score, score_of
from .errors import CaseError, DomainError, InfeasibleError, SizeLimitError, ValidityError
from .models import (
    Direction,
    Instance,
    Objective,
    OracleResult,
    Partition,
    PercentileSolution,
    Rational,
    RankConvention,
    RankSolution,
)
from .oracle import PartitionConstraint, exact_optimum

logger = logging.getLogger(__name__)

Cell = Tuple[int, int]
Box = Tuple[int, int, int, int]


class Rect(BaseModel):
    """The rectangle [a, b] x [c, d]: columns a..b, rows c..d."""

    model_config = ConfigDict(frozen=True)

    a: int = Field(..., ge=1)
    b: int = Field(..., ge=1)
    c: int = Field(..., ge=1)
    d: int = Field(..., ge=1)

    @model_validator(mode="after")
    def _check_order(self) -> "Rect":
        if self.a > self.b or self.c > self.d:
            raise ValidityError(f"rectangle [{self.a},{self.b}]x[{self.c},{self.d}] has reversed bounds")
        return self

    @classmethod
    def of(cls, box: Box) -> "Rect":
        return cls(a=box[0], b=box[1], c=box[2], d=box[3])

    @property
    def box(self) -> Box:
        return (self.a, self.b, self.c, self.d)

    def cells(self) -> Iterator[Cell]:
        for y in range(self.c, self.d + 1):
            for x in range(self.a, self.b + 1):
                yield (x, y)


def _contains(outer: Box, inner: Box) -> bool:
    return outer[0] <= inner[0] and inner[1] <= outer[1] and outer[2] <= inner[2] and inner[3] <= outer[3]


def _intersects(p: Box, q: Box) -> bool:
    return p[0] <= q[1] and q[0] <= p[1] and p[2] <= q[3] and q[2] <= p[3]


def _box_cells(box: Box) -> Iterator[Cell]:
    a, b, c, d = box
    for y in range(c, d + 1):
        for x in range(a, b + 1):
            yield (x, y)


class Whitelist(BaseModel):
    """Which rectangles may be blocks.

    A rectangle without vacancies is always allowed. Any other rectangle is
    allowed exactly when its set of vacancies is an allowed one, so rectangles
    holding the same vacancies share their status.
    """

    model_config = ConfigDict(frozen=True)

    allow_all: bool = True
    allowed: FrozenSet[FrozenSet[Cell]] = Field(default_factory=frozenset)

    @classmethod
    def from_rects(cls, vacancies: FrozenSet[Cell], rects: List[Rect]) -> "Whitelist":
        subsets = {frozenset(cell for cell in rect.cells() if cell in vacancies) for rect in rects}
        return cls(allow_all=False, allowed=frozenset(subsets))

    def allows(self, vacancy_subset: FrozenSet[Cell]) -> bool:
        return self.allow_all or not vacancy_subset or vacancy_subset in self.allowed


class GridInstance(BaseModel):
    """Grid with vacancies, a positive measure on the other cells and an optional S* rectangle."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    l: int = Field(..., ge=1, description="Number of columns")
    w: int = Field(..., ge=1, description="Number of rows")
    mu: Dict[Cell, Rational]
    vacancies: FrozenSet[Cell] = Field(default_factory=frozenset)
    special: Optional[Rect] = None
    whitelist: Whitelist = Field(default_factory=Whitelist)

    @model_validator(mode="after")
    def _check_cells(self) -> "GridInstance":
        board = {(x, y) for x in range(1, self.l + 1) for y in range(1, self.w + 1)}
        if not self.vacancies <= board:
            raise ValidityError("a vacancy lies outside the grid")
        if set(self.mu) != board - self.vacancies:
            raise ValidityError("mu must give a value for exactly the non-vacant cells")
        for cell, value in self.mu.items():
            if value <= 0:
                raise ValidityError(f"cell {cell} has non-positive value {value}")
        if self.special is not None:
            if self.special.b > self.l or self.special.d > self.w:
                raise ValidityError("S* extends beyond the grid")
            if any(cell in self.vacancies for cell in self.special.cells()):
                raise ValidityError("S* must not contain vacancies")
        return self

    @classmethod
    def uniform(cls, l: int, w: int, value: object = 1, **kwargs) -> "GridInstance":
        vacancies = frozenset(kwargs.pop("vacancies", frozenset()))
        mu = {(x, y): value for x in range(1, l + 1) for y in range(1, w + 1) if (x, y) not in vacancies}
        return cls(l=l, w=w, mu=mu, vacancies=vacancies, **kwargs)

    @property
    def full(self) -> Box:
        return (1, self.l, 1, self.w)

    @cached_property
    def cells(self) -> Tuple[Cell, ...]:
        """Non-vacant cells in row-major order; position i is vertex i."""
        return tuple(
            (x, y) for y in range(1, self.w + 1) for x in range(1, self.l + 1) if (x, y) not in self.vacancies
        )

    @cached_property
    def vertex_of(self) -> Dict[Cell, int]:
        return {cell: i for i, cell in enumerate(self.cells)}

    @cached_property
    def special_box(self) -> Optional[Box]:
        return self.special.box if self.special is not None else None

    @cached_property
    def special_vertices(self) -> FrozenSet[int]:
        if self.special is None:
            return frozenset()
        return frozenset(self.vertex_of[cell] for cell in self.special.cells())

    @cached_property
    def special_mu(self) -> Fraction:
        return sum((self.mu[self.cells[v]] for v in self.special_vertices), Fraction(0))

    def block(self, box: Box) -> FrozenSet[int]:
        return frozenset(self.vertex_of[cell] for cell in _box_cells(box) if cell in self.vertex_of)

    def box_mu(self, box: Box) -> Fraction:
        return sum((self.mu[cell] for cell in _box_cells(box) if cell in self.mu), Fraction(0))

    def box_vacancies(self, box: Box) -> FrozenSet[Cell]:
        return frozenset(cell for cell in _box_cells(box) if cell in self.vacancies)

    def allowed(self, box: Box) -> bool:
        return self.whitelist.allows(self.box_vacancies(box))

    def is_vacant(self, box: Box) -> bool:
        return all(cell in self.vacancies for cell in _box_cells(box))

    def to_instance(self) -> Instance:
        """The cells as an instance on the grid graph (4-neighbour adjacency)."""
        edges = []
        for (x, y), v in self.vertex_of.items():
            for neighbour in ((x + 1, y), (x, y + 1)):
                if neighbour in self.vertex_of:
                    edges.append((v, self.vertex_of[neighbour]))
        labels = tuple(f"({x},{y})" for x, y in self.cells)
        return Instance(
            mu=tuple(self.mu[cell] for cell in self.cells),
            edges=tuple(edges),
            special=self.special_vertices,
            labels=labels,
        )


class GerrymanderInstance(BaseModel):
    """Grid, signed margins, district count N and population tolerance rho."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: GridInstance
    mu_r: Dict[Cell, Rational]
    n_districts: int = Field(..., ge=1)
    rho: Rational = Fraction(0)

    @model_validator(mode="after")
    def _check_margins(self) -> "GerrymanderInstance":
        if self.grid.special is not None:
            raise ValidityError("redistricting has no S*")
        if set(self.mu_r) != set(self.grid.mu):
            raise ValidityError("mu_r must give a margin for exactly the non-vacant cells")
        for cell, margin in self.mu_r.items():
            if abs(margin) > self.grid.mu[cell]:
                raise ValidityError(f"margin {margin} at {cell} exceeds the population {self.grid.mu[cell]}")
        if self.rho < 0 or self.rho * (self.n_districts + 1) >= 1:
            raise DomainError(f"rho = {self.rho} must lie in [0, 1/(N+1))")
        return self

    @cached_property
    def window(self) -> Tuple[Fraction, Fraction]:
        ideal = sum(self.grid.mu.values(), Fraction(0)) / self.n_districts
        return (1 - self.rho) * ideal, (1 + self.rho) * ideal

    def box_margin(self, box: Box) -> Fraction:
        return sum((self.mu_r[cell] for cell in _box_cells(box) if cell in self.mu_r), Fraction(0))


class Redistricting(NamedTuple):
    slate: int
    witness: Partition


def _cuts(box: Box) -> Iterator[Tuple[str, int, Box, Box]]:
    a, b, c, d = box
    for x in range(a, b):
        yield "v", x, (a, x, c, d), (x + 1, b, c, d)
    for y in range(c, d):
        yield "h", y, (a, b, c, y), (a, b, y + 1, d)


def _require_rect_special(grid: GridInstance) -> Box:
    if grid.special is None:
        raise CaseError("the grid solvers need a rectangular S*")
    return grid.special_box


def _better(direction: Direction, candidate, incumbent) -> bool:
    if incumbent is None:
        return True
    return candidate < incumbent if direction == Direction.MIN else candidate > incumbent


# a subgrid decomposition: ("whole", box) | ("cut", left, right) | ("none",)
Plan = tuple


def _plan_blocks(grid: GridInstance, plan: Plan) -> List[FrozenSet[int]]:
    blocks: List[FrozenSet[int]] = []
    stack = [plan]
    while stack:
        item = stack.pop()
        if item[0] == "whole":
            blocks.append(grid.block(item[1]))
        elif item[0] == "cut":
            stack.extend(item[1:])
    return blocks


def grid_hier_rank(
    grid: GridInstance, direction: Direction, conv: Optional[RankConvention] = None
) -> RankSolution:
    """Optimal rank over hierarchical rectangle partitions.

    A subgrid equal to S* or fully vacant costs nothing; one that cuts through
    S* is infeasible. Any other subgrid is either one allowed block disjoint
    from S* or the best of its vertical and horizontal cuts.
    """
    special = _require_rect_special(grid)
    if conv is None:
        conv = RankConvention.STRICT_ABOVE if direction == Direction.MIN else RankConvention.AT_LEAST
    special_mu = grid.special_mu

    @cache
    def opt(box: Box) -> Optional[Tuple[int, Plan]]:
        if box == special or grid.is_vacant(box):
            return 0, ("none",)
        if _intersects(box, special) and not _contains(box, special):
            return None
        best: Optional[Tuple[int, Plan]] = None
        if not _intersects(box, special) and grid.allowed(box):
            best = (1 if counts(grid.box_mu(box), special_mu, conv) else 0, ("whole", box))
        for _, _, left, right in _cuts(box):
            first, second = opt(left), opt(right)
            if first is None or second is None:
                continue
            value = first[0] + second[0]
            if _better(direction, value, best[0] if best else None):
                best = (value, ("cut", first[1], second[1]))
        return best

    result = opt(grid.full)
    logger.debug("grid rank recursion filled %d states", opt.cache_info().currsize)
    witness = Partition.of(_plan_blocks(grid, result[1]), grid.special_vertices)
    return RankSolution(1 + result[0], witness)


Table = Dict[int, Tuple[Fraction, Plan]]


def grid_hier_percentile(grid: GridInstance, direction: Direction) -> PercentileSolution:
    """Optimal percentile over hierarchical rectangle partitions.

    G[box][k] is the optimal l + m/2 over decompositions of the subgrid into k
    blocks besides S*; a cut sums the two sides' scores over every split of k.
    Only fully vacant subgrids and S* itself admit k = 0.
    """
    special = _require_rect_special(grid)
    special_mu = grid.special_mu

    @cache
    def table(box: Box) -> Table:
        if box == special or grid.is_vacant(box):
            return {0: (Fraction(0), ("none",))}
        if _intersects(box, special) and not _contains(box, special):
            return {}
        result: Table = {}
        if not _intersects(box, special) and grid.allowed(box):
            result[1] = (score_of(classify_value(grid.box_mu(box), special_mu)), ("whole", box))
        for _, _, left, right in _cuts(box):
            first, second = table(left), table(right)
            for k1, (s1, p1) in first.items():
                for k2, (s2, p2) in second.items():
                    score = s1 + s2
                    incumbent = result.get(k1 + k2)
                    if _better(direction, score, incumbent[0] if incumbent else None):
                        result[k1 + k2] = (score, ("cut", p1, p2))
        return result

    root = table(grid.full)
    best: Optional[Fraction] = None
    plan: Plan = ("none",)
    for k in sorted(root):
        if k == 0:
            continue
        value = percentile_from_score(root[k][0], k)
        if _better(direction, value, best):
            best, plan = value, root[k][1]
    if best is None:
        raise DomainError("percentile is undefined when S* covers every non-vacant cell")
    witness = Partition.of(_plan_blocks(grid, plan), grid.special_vertices)
    return PercentileSolution(best, witness)


def _check_cells(grid: GridInstance, limit: Optional[int]) -> None:
    if limit is None:
        limit = load_settings().grid_cell_limit
    if grid.l * grid.w > limit:
        raise SizeLimitError(grid.l * grid.w, limit, what="grid cells")


class GridRectangles(PartitionConstraint):
    """Partitions induced by arbitrary rectangle tilings of the grid."""

    name = "grid"

    def __init__(self, grid: GridInstance, cell_limit: Optional[int] = None):
        self.grid = grid
        self.cell_limit = cell_limit

    def check_size(self, inst: Instance, limit: int) -> None:
        _check_cells(self.grid, self.cell_limit)

    def _tile_ok(self, box: Box) -> bool:
        grid = self.grid
        special = grid.special_box
        if grid.is_vacant(box):
            return True
        if special is not None and _intersects(box, special):
            return box == special
        return grid.allowed(box)

    def tilings(self) -> Iterator[List[Box]]:
        grid = self.grid
        order = [(x, y) for y in range(1, grid.w + 1) for x in range(1, grid.l + 1)]
        covered: Set[Cell] = set()
        tiles: List[Box] = []

        def place(start: int):
            while start < len(order) and order[start] in covered:
                start += 1
            if start == len(order):
                yield list(tiles)
                return
            x0, y0 = order[start]
            max_x = grid.l
            for y1 in range(y0, grid.w + 1):
                x1 = x0
                while x1 <= max_x and (x1, y1) not in covered:
                    x1 += 1
                max_x = min(max_x, x1 - 1)
                if max_x < x0:
                    break
                for x_end in range(x0, max_x + 1):
                    box = (x0, x_end, y0, y1)
                    if not self._tile_ok(box):
                        continue
                    cells = list(_box_cells(box))
                    covered.update(cells)
                    tiles.append(box)
                    yield from place(start + 1)
                    tiles.pop()
                    covered.difference_update(cells)

        yield from place(0)

    def partitions(self, inst: Instance) -> Iterator[Partition]:
        seen: Set[FrozenSet[FrozenSet[int]]] = set()
        for tiles in self.tilings():
            blocks = [
                self.grid.block(box) for box in tiles
                if box != self.grid.special_box and not self.grid.is_vacant(box)
            ]
            key = frozenset(blocks)
            if key in seen:
                continue
            seen.add(key)
            yield Partition.trusted(sorted(blocks, key=min), inst.special)


class GridHierarchicalRectangles(GridRectangles):
    """Partitions induced by guillotine decompositions of the grid."""

    name = "grid-hier"

    def partitions(self, inst: Instance) -> Iterator[Partition]:
        grid = self.grid
        special = grid.special_box

        @cache
        def induced(box: Box) -> FrozenSet[FrozenSet[FrozenSet[int]]]:
            if grid.is_vacant(box) or box == special:
                return frozenset({frozenset()})
            if special is not None and _intersects(box, special) and not _contains(box, special):
                return frozenset()
            options: Set[FrozenSet[FrozenSet[int]]] = set()
            if (special is None or not _intersects(box, special)) and grid.allowed(box):
                options.add(frozenset({grid.block(box)}))
            for _, _, left, right in _cuts(box):
                for first in induced(left):
                    for second in induced(right):
                        options.add(first | second)
            return frozenset(options)

        for blocks in sorted(induced(grid.full), key=lambda p: sorted(min(b) for b in p)):
            yield Partition.trusted(sorted(blocks, key=min), inst.special)


def grid_free_rect_oracle(
    grid: GridInstance,
    objective: Objective,
    conv: Optional[RankConvention] = None,
    hierarchical: bool = False,
    limit: Optional[int] = None,
) -> OracleResult:
    """Exhaustive optimum over rectangle tilings (or guillotine ones) of a small grid."""
    _require_rect_special(grid)
    kind = GridHierarchicalRectangles if hierarchical else GridRectangles
    return exact_optimum(grid.to_instance(), objective, conv, kind(grid, limit))


def count_tilings(l: int, w: int) -> int:
    """Number of tilings of an l x w board by rectangles, by a column-profile recursion."""
    if l < 1 or w < 1:
        raise DomainError("board dimensions must be positive")

    @cache
    def count(filled: Tuple[int, ...]) -> int:
        # filled[y]: number of leading columns already covered in row y
        lowest = min(filled)
        if lowest == l:
            return 1
        y0 = filled.index(lowest)
        total = 0
        y1 = y0
        while y1 < w and filled[y1] == lowest:
            for x_end in range(lowest + 1, l + 1):
                total += count(tuple(
                    x_end if y0 <= y <= y1 else f for y, f in enumerate(filled)
                ))
            y1 += 1
        return total

    return count(tuple([0] * w))


def gerrymander_hier(inst: GerrymanderInstance) -> Redistricting:
    """Most districts with nonnegative margin over hierarchical rectangle plans.

    A district must be an allowed rectangle whose population lies in the
    window (1 +- rho) mu(V)/N; ties in the margin go to Player 1.
    """
    grid = inst.grid
    low, high = inst.window

    @cache
    def opt(box: Box) -> Optional[Tuple[int, Plan]]:
        if grid.is_vacant(box):
            return 0, ("none",)
        best: Optional[Tuple[int, Plan]] = None
        population = grid.box_mu(box)
        if grid.allowed(box) and low <= population <= high:
            best = (1 if inst.box_margin(box) >= 0 else 0, ("whole", box))
        for _, _, left, right in _cuts(box):
            first, second = opt(left), opt(right)
            if first is None or second is None:
                continue
            value = first[0] + second[0]
            if best is None or value > best[0]:
                best = (value, ("cut", first[1], second[1]))
        return best

    result = opt(grid.full)
    if result is None:
        raise InfeasibleError(f"no hierarchical plan into {inst.n_districts} districts fits the population window")
    witness = Partition.of(_plan_blocks(grid, result[1]))
    logger.info("gerrymander: slate %d over %d districts", result[0], len(witness.blocks))
    return Redistricting(result[0], witness)
