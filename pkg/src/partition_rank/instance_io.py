"""
Instance files.

A single JSON document describes a graph instance and, optionally, the
sections a variant needs (equivalence classes, a category tree, a grid, a
circulant description, redistricting parameters). Rationals are written as
"p/q" or decimal strings; JSON numbers are read exactly as well.
"""

import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .case_uniform import CirculantSpec
from .errors import ParseError, ValidityError
from .grading import GradeInstance, WeightConvention
from .grid import GerrymanderInstance, GridInstance, Rect, Whitelist
from .models import Instance, Partition, Rational
from .variant_equivalence import EquivalenceInstance
from .variant_hierarchy import CategoryTree

logger = logging.getLogger(__name__)


class VertexSpec(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    id: int = Field(..., ge=0)
    label: Optional[str] = None
    mu: Rational


class TreeNodeSpec(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    id: int
    label: str
    parent: Optional[int] = None
    mu: Optional[Rational] = None


class TreeSpec(BaseModel):
    nodes: List[TreeNodeSpec]
    special_node: Optional[int] = None


class RectSpec(BaseModel):
    a: int
    b: int
    c: int
    d: int

    def to_rect(self) -> Rect:
        return Rect(a=self.a, b=self.b, c=self.c, d=self.d)


class GridSpec(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    l: int
    w: int
    cells: List[Tuple[int, int, Rational]]
    vacancies: List[Tuple[int, int]] = Field(default_factory=list)
    special: Optional[RectSpec] = None
    whitelist: Union[str, List[RectSpec]] = "all"
    mu_r: Optional[List[Tuple[int, int, Rational]]] = None


class CirculantSection(BaseModel):
    n: int
    jumps: List[int]


class InstanceDocument(BaseModel):
    """Schema of an instance file."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    vertices: List[VertexSpec] = Field(default_factory=list)
    edges: List[Tuple[int, int]] = Field(default_factory=list)
    special: List[int] = Field(default_factory=list)
    classes: Optional[List[List[int]]] = None
    tree: Optional[TreeSpec] = None
    grid: Optional[GridSpec] = None
    circulant: Optional[CirculantSection] = None
    districts: Optional[int] = None
    rho: Optional[Rational] = None

    def to_instance(self) -> Instance:
        if not self.vertices:
            raise ValidityError("the file has no vertices section")
        ordered = sorted(self.vertices, key=lambda vertex: vertex.id)
        if [vertex.id for vertex in ordered] != list(range(len(ordered))):
            raise ValidityError("vertex ids must be exactly 0..n-1")
        labels = None
        if any(vertex.label is not None for vertex in ordered):
            labels = tuple(vertex.label if vertex.label is not None else str(vertex.id) for vertex in ordered)
        return Instance(
            mu=tuple(vertex.mu for vertex in ordered),
            edges=tuple(tuple(edge) for edge in self.edges),
            special=frozenset(self.special),
            labels=labels,
        )

    def to_equivalence(self) -> EquivalenceInstance:
        if self.classes is None:
            raise ValidityError("the file has no classes section")
        return EquivalenceInstance(instance=self.to_instance(), classes=self.classes)

    def to_tree(self) -> CategoryTree:
        if self.tree is None:
            raise ValidityError("the file has no tree section")
        position = {node.id: i for i, node in enumerate(self.tree.nodes)}
        if len(position) != len(self.tree.nodes):
            raise ValidityError("tree node ids must be distinct")
        entries = []
        for node in self.tree.nodes:
            if node.parent is not None and node.parent not in position:
                raise ValidityError(f"tree node {node.id} has unknown parent {node.parent}")
            parent = position[node.parent] if node.parent is not None else None
            entries.append((node.label, parent, node.mu))
        special = position.get(self.tree.special_node) if self.tree.special_node is not None else None
        if self.tree.special_node is not None and special is None:
            raise ValidityError(f"special node {self.tree.special_node} is not in the tree")
        return CategoryTree.from_parents(entries, special=special)

    def to_grid(self) -> GridInstance:
        if self.grid is None:
            raise ValidityError("the file has no grid section")
        spec = self.grid
        vacancies = frozenset(tuple(cell) for cell in spec.vacancies)
        if spec.whitelist == "all":
            whitelist = Whitelist()
        elif isinstance(spec.whitelist, str):
            raise ValidityError(f"whitelist must be 'all' or a list of rectangles, got {spec.whitelist!r}")
        else:
            whitelist = Whitelist.from_rects(vacancies, [rect.to_rect() for rect in spec.whitelist])
        return GridInstance(
            l=spec.l,
            w=spec.w,
            mu={(x, y): value for x, y, value in spec.cells},
            vacancies=vacancies,
            special=spec.special.to_rect() if spec.special else None,
            whitelist=whitelist,
        )

    def to_gerrymander(self) -> GerrymanderInstance:
        if self.districts is None or self.grid is None or self.grid.mu_r is None:
            raise ValidityError("redistricting needs grid.mu_r and districts")
        return GerrymanderInstance(
            grid=self.to_grid(),
            mu_r={(x, y): value for x, y, value in self.grid.mu_r},
            n_districts=self.districts,
            rho=self.rho if self.rho is not None else Fraction(0),
        )

    def to_circulant(self) -> CirculantSpec:
        if self.circulant is None:
            raise ValidityError("the file has no circulant section")
        return CirculantSpec(n=self.circulant.n, jumps=tuple(self.circulant.jumps))


def _load_json(text: str, source: str) -> Any:
    try:
        return json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as e:
        raise ParseError(f"{source}: {e.msg}", e.lineno)


def _validation_message(error: ValidationError) -> str:
    first = error.errors()[0]
    location = ".".join(str(part) for part in first["loc"])
    return f"{location}: {first['msg']}" if location else first["msg"]


def parse_document(text: str, source: str = "<string>") -> InstanceDocument:
    data = _load_json(text, source)
    try:
        return InstanceDocument.model_validate(data)
    except ValidationError as e:
        raise ValidityError(f"{source}: {_validation_message(e)}")


def read_document(path: Union[str, Path]) -> InstanceDocument:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}")
    return parse_document(text, str(path))


def build(document: InstanceDocument, method: str):
    """Call a document conversion, turning schema errors into ValidityError."""
    try:
        return getattr(document, method)()
    except ValidationError as e:
        raise ValidityError(_validation_message(e))


def instance_to_document(inst: Instance) -> Dict[str, Any]:
    vertices = []
    for v in inst.vertices:
        entry: Dict[str, Any] = {"id": v, "mu": str(inst.mu[v])}
        if inst.labels is not None:
            entry["label"] = inst.labels[v]
        vertices.append(entry)
    return {
        "vertices": vertices,
        "edges": [list(edge) for edge in inst.edges],
        "special": sorted(inst.special),
    }


def write_instance(inst: Instance, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(instance_to_document(inst), ensure_ascii=False, indent=2), encoding="utf-8")


def read_partition(path: Union[str, Path], special: frozenset) -> Partition:
    """A witness file: a JSON list of blocks, each a list of vertex ids."""
    path = Path(path)
    try:
        data = _load_json(path.read_text(encoding="utf-8"), str(path))
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}")
    if not isinstance(data, list) or not all(isinstance(block, list) for block in data):
        raise ParseError(f"{path}: expected a list of blocks")
    return Partition.of(data, special)


def parse_grades(text: str, convention: WeightConvention = WeightConvention.AS_WRITTEN) -> GradeInstance:
    """Two columns per line: earned and possible points of one period."""
    earned, possible = [], []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'earned possible', got {line!r}", number)
        try:
            earned.append(Fraction(parts[0]))
            possible.append(Fraction(parts[1]))
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"not a rational number in {line!r}", number)
    try:
        return GradeInstance(earned=tuple(earned), possible=tuple(possible), convention=convention)
    except ValidationError as e:
        raise ValidityError(_validation_message(e))


def partition_to_dot(inst: Instance, partition: Partition) -> str:
    """Graphviz rendering: one cluster per block, S* filled."""
    lines = ["graph partition {", "  node [shape=circle];"]
    for index, block in enumerate(partition.blocks):
        lines.append(f"  subgraph cluster_{index} {{")
        lines.append(f'    label="{inst.mu_of(block)}";')
        lines.extend(f'    {v} [label="{inst.label(v)}"];' for v in sorted(block))
        lines.append("  }")
    if inst.special:
        lines.append("  subgraph cluster_special {")
        lines.append('    label="S*"; style=filled; fillcolor=lightgrey;')
        lines.extend(f'    {v} [label="{inst.label(v)}"];' for v in sorted(inst.special))
        lines.append("  }")
    lines.extend(f"  {u} -- {v};" for u, v in inst.edges)
    lines.append("}")
    return "\n".join(lines)
