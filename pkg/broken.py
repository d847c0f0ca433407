"""
Broken Map Combinatorics Module
Combinatorial types of broken strips and point-constrained broken discs: validation of levels,
chord matchings and stability, virtual dimensions, the rigidity classification and an exhaustive
enumeration of level-respecting types within small bounds
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import settings
from errors import ResourceError, StructuralError
from index_theory import IndexData, disc_index

logger = logging.getLogger(__name__)

KINDS = ("strip", "disc_with_point_constraint")
SHAPES = ("disc", "sphere", "strip")

# Verdict reasons
NEGATIVE_INDEX = "negative index"
TRANSLATION = "translation deformation"
CRITICAL_LOCUS = "critical locus"
NON_ELEMENTARY = "non-elementary inner"


# -----------------------------
# Types
# -----------------------------
@dataclass(frozen=True)
class Component:
    """
    One piece of a broken map. Punctures are numbered boundary first, then interior;
    the numbers are chord (or orbit) multiplicities.
    """
    shape: str
    boundary_punctures: Tuple[int, ...] = ()
    interior_punctures: Tuple[int, ...] = ()
    nontrivial: bool = True
    markings: int = 0
    touches_critical_locus: bool = False
    index_data: Optional[IndexData] = None
    index: Optional[int] = None
    aut: int = 0

    @property
    def punctures(self) -> Tuple[int, ...]:
        return tuple(self.boundary_punctures) + tuple(self.interior_punctures)

    def is_boundary(self, puncture: int) -> bool:
        return puncture < len(self.boundary_punctures)

    def fredholm_index(self) -> int:
        if self.index_data is not None:
            return disc_index(self.index_data)
        if self.index is not None:
            return self.index
        raise StructuralError(f"{self.shape} component carries neither index data nor an index")


@dataclass(frozen=True)
class Level:
    label: str
    components: Tuple[Component, ...]


@dataclass(frozen=True, order=True)
class PunctureRef:
    level: int
    component: int
    puncture: int


@dataclass(frozen=True)
class Matching:
    first: PunctureRef
    second: PunctureRef


@dataclass(frozen=True)
class CombType:
    kind: str
    levels: Tuple[Level, ...]
    matchings: Tuple[Matching, ...] = ()

    @property
    def level_count(self) -> int:
        return len(self.levels)

    def component(self, ref: PunctureRef) -> Component:
        return self.levels[ref.level].components[ref.component]


@dataclass(frozen=True)
class Verdict:
    status: str
    reason: Optional[str] = None
    detail: str = ""


@dataclass
class ValidationReport:
    ok: bool
    violations: List[str] = field(default_factory=list)


@dataclass(frozen=True)
class EnumerationBounds:
    max_levels: int = 3
    max_components_per_level: int = 3
    max_chord_multiplicity: int = 3
    max_punctures_per_component: int = 3


def level_labels(count: int) -> List[str]:
    if count == 1:
        return ["out"]
    return ["in"] + [str(i) for i in range(1, count - 1)] + ["out"]


# -----------------------------
# Validation
# -----------------------------
def _puncture_exists(t: CombType, ref: PunctureRef) -> bool:
    if not 0 <= ref.level < len(t.levels):
        return False
    components = t.levels[ref.level].components
    if not 0 <= ref.component < len(components):
        return False
    return 0 <= ref.puncture < len(components[ref.component].punctures)


def _neck_signs(t: CombType) -> Dict[Tuple[int, int], Tuple[List[int], List[int]]]:
    """(positive, negative) multiplicities per component; positive punctures face the outer level"""
    signs: Dict[Tuple[int, int], Tuple[List[int], List[int]]] = {}
    for m in t.matchings:
        if not (_puncture_exists(t, m.first) and _puncture_exists(t, m.second)):
            continue
        low, high = sorted((m.first, m.second), key=lambda r: r.level)
        if low.level == high.level:
            continue
        multiplicity = t.component(low).punctures[low.puncture]
        signs.setdefault((low.level, low.component), ([], []))[0].append(multiplicity)
        signs.setdefault((high.level, high.component), ([], []))[1].append(multiplicity)
    return signs


def validate_type(t: CombType) -> ValidationReport:
    """Labels, chord matching, strip count, stability, tree shape and neck puncture rules"""
    violations: List[str] = []
    if t.kind not in KINDS:
        violations.append(f"kind: unknown kind {t.kind!r}")
    if not t.levels:
        return ValidationReport(ok=False, violations=violations + ["label gap: no levels"])

    labels = [level.label for level in t.levels]
    if labels != level_labels(len(t.levels)):
        violations.append(f"label gap: labels {labels}, expected {level_labels(len(t.levels))}")
    for i, level in enumerate(t.levels):
        for j, component in enumerate(level.components):
            if component.shape not in SHAPES:
                violations.append(f"shape: component ({i}, {j}) has shape {component.shape!r}")
            if component.shape == "sphere" and component.boundary_punctures:
                violations.append(f"shape: sphere ({i}, {j}) cannot have boundary punctures")

    uses: Dict[PunctureRef, int] = {}
    edges = []
    for m in t.matchings:
        if not (_puncture_exists(t, m.first) and _puncture_exists(t, m.second)):
            violations.append(f"dangling puncture: {m.first} - {m.second}")
            continue
        gap = abs(m.first.level - m.second.level)
        if gap == 0:
            violations.append(f"same-level node: {m.first} - {m.second}")
        elif gap > 1:
            violations.append(f"label gap: node {m.first} - {m.second} skips a level")
        a, b = t.component(m.first), t.component(m.second)
        if a.is_boundary(m.first.puncture) != b.is_boundary(m.second.puncture) or \
                a.punctures[m.first.puncture] != b.punctures[m.second.puncture]:
            violations.append(f"asymptote mismatch: {m.first} - {m.second}")
        for ref in (m.first, m.second):
            uses[ref] = uses.get(ref, 0) + 1
        edges.append(((m.first.level, m.first.component), (m.second.level, m.second.component)))

    nodes = [(i, j) for i, level in enumerate(t.levels) for j in range(len(level.components))]
    for i, j in nodes:
        for k in range(len(t.levels[i].components[j].punctures)):
            count = uses.get(PunctureRef(i, j, k), 0)
            if count == 0:
                violations.append(f"unmatched puncture: ({i}, {j}, {k})")
            elif count > 1:
                violations.append(f"doubly matched puncture: ({i}, {j}, {k})")

    strips = [(i, j) for i, j in nodes if t.levels[i].components[j].shape == "strip"]
    if t.kind == "strip":
        if len(strips) != 1 or strips[0][0] != len(t.levels) - 1:
            violations.append(f"strip count: need exactly one strip, on the outer level; found {strips}")
    elif strips:
        violations.append(f"strip count: a point-constrained disc has no strip components; found {strips}")

    if nodes:
        parent = {node: node for node in nodes}

        def find(node):
            while parent[node] != node:
                parent[node] = parent[parent[node]]
                node = parent[node]
            return node

        for a, b in edges:
            parent[find(a)] = find(b)
        if len({find(node) for node in nodes}) > 1:
            violations.append("disconnected: components do not form one tree")
        elif len(edges) > len(nodes) - 1:
            violations.append("cycle: puncture nodes close a loop")

    signs = _neck_signs(t)
    for i in range(1, len(t.levels) - 1):
        level = t.levels[i]
        if not any(c.nontrivial or c.markings >= 1 for c in level.components):
            violations.append(f"unstable neck: level {level.label} has only trivial unmarked components")
        for j, component in enumerate(level.components):
            positive, negative = signs.get((i, j), ([], []))
            if len(positive) != 1:
                violations.append(f"neck component ({i}, {j}) needs exactly one positive puncture, has {len(positive)}")
                continue
            gap = positive[0] - sum(negative)
            if component.nontrivial and gap <= 0:
                violations.append(f"action gap: nontrivial neck component ({i}, {j}) has gap {gap}")
            if not component.nontrivial and (len(negative) != 1 or gap != 0):
                violations.append(f"trivial neck component: ({i}, {j}) must be a trivial strip over one chord")

    return ValidationReport(ok=not violations, violations=violations)


# -----------------------------
# Dimension and classification
# -----------------------------
def type_virtual_dimension(t: CombType, n: int) -> int:
    """Sum of indices minus (n - 1) per node minus automorphisms, minus n for a point constraint"""
    components = [c for level in t.levels for c in level.components]
    total = sum(c.fredholm_index() for c in components)
    vir = total - len(t.matchings) * (n - 1) - sum(c.aut for c in components)
    if t.kind == "disc_with_point_constraint":
        vir -= n
    return vir


def _is_elementary(c: Component) -> bool:
    return (
        c.shape == "disc"
        and len(c.boundary_punctures) == 1
        and not c.interior_punctures
        and c.boundary_punctures[0] == 1
    )


def classify(t: CombType, n: int) -> Verdict:
    """
    Verdict for a valid type: dimension first, then the structural exclusions in order
    (extra levels, critical contact, non-elementary inner pieces)

    Raises:
        StructuralError: the type fails validate_type or lacks index information
    """
    report = validate_type(t)
    if not report.ok:
        raise StructuralError(f"invalid combinatorial type: {report.violations}")
    return _verdict(t, n)


def _verdict(t: CombType, n: int) -> Verdict:
    return _dimension_verdict(type_virtual_dimension(t, n), lambda: _structural_verdict(t))


def _dimension_verdict(vir: int, structural) -> Verdict:
    if vir < 0:
        return Verdict("Excluded", NEGATIVE_INDEX, f"expected dimension {vir}")
    if vir > 0:
        return Verdict("HighIndex", None, f"expected dimension {vir}")
    return structural()


def _structural_verdict(t: CombType) -> Verdict:
    """Verdict of a dimension-zero type"""
    if t.level_count > 2:
        return Verdict("Excluded", TRANSLATION, f"{t.level_count} levels; the neck translates freely")
    inner = t.levels[0].components if t.level_count == 2 else ()
    if any(c.touches_critical_locus for c in inner):
        return Verdict("Excluded", CRITICAL_LOCUS, "an inner piece meets the critical locus")
    for c in inner:
        if not _is_elementary(c):
            return Verdict(
                "Excluded", NON_ELEMENTARY,
                f"inner {c.shape} with punctures {list(c.punctures)} is not a single-chord elementary disc",
            )
    return Verdict("Rigid")


# -----------------------------
# Enumeration
# -----------------------------
class _TreeBuilder:
    """
    Canonical level-respecting trees rooted at the main outer component.

    A tree is (level, role, touches, edges) with edges a sorted tuple of (direction, multiplicity, subtree);
    roles are main, aux (further outer discs), neck and inner.
    """

    def __init__(self, levels: int, bounds: EnumerationBounds):
        self.levels = levels
        self.bounds = bounds
        self.cache: Dict[tuple, list] = {}
        self.produced = 0

    def _role(self, level: int) -> str:
        if level == 0:
            return "inner"
        if level == self.levels - 1:
            return "aux"
        return "neck"

    def _options(self, level: int, direction: str, budget: Tuple[int, ...]) -> list:
        target = level - 1 if direction == "down" else level + 1
        if not 0 <= target < self.levels:
            return []
        child_parent = "above" if direction == "down" else "below"
        options = []
        for mult in range(1, self.bounds.max_chord_multiplicity + 1):
            for tree, usage in self.subtrees(target, self._role(target), child_parent, mult, budget):
                options.append(((direction, mult, tree), usage))
        return options

    @staticmethod
    def _multisets(options: list, low: int, high: int, budget: Tuple[int, ...]) -> list:
        """Multisets of low..high options within the budget; each is returned once, edges sorted"""
        if high < low:
            return []
        ranked = sorted(options, key=lambda item: (sum(item[1]), item[0]))
        sizes = [sum(usage) for _, usage in ranked]
        results = []
        chosen: list = []

        def extend(start: int, left: Tuple[int, ...]):
            if len(chosen) >= low:
                results.append((tuple(sorted(chosen)), tuple(b - l for b, l in zip(budget, left))))
            if len(chosen) == high:
                return
            room = sum(left)
            for i in range(start, len(ranked)):
                if sizes[i] > room:
                    break
                edge, usage = ranked[i]
                rest = tuple(l - u for l, u in zip(left, usage))
                if min(rest) < 0:
                    continue
                chosen.append(edge)
                extend(i, rest)
                chosen.pop()

        extend(0, tuple(budget))
        return results

    def _edge_sets(self, level: int, role: str, parent: Optional[str], parent_mult: int,
                   budget: Tuple[int, ...]) -> Iterable[Tuple[tuple, Tuple[int, ...]]]:
        most = self.bounds.max_punctures_per_component
        if role == "main":
            yield from self._multisets(self._options(level, "down", budget), 1, most, budget)
        elif role == "inner":
            yield from self._multisets(self._options(level, "up", budget), 0, most - 1, budget)
        elif role == "aux":
            yield from self._multisets(self._options(level, "down", budget), 0, most - 1, budget)
        elif parent == "above":
            # the parent edge is the positive puncture
            for edges, usage in self._multisets(self._options(level, "down", budget), 0, most - 1, budget):
                gap = parent_mult - sum(mult for _, mult, _ in edges)
                if gap > 0 or (gap == 0 and len(edges) == 1):
                    yield edges, usage
        else:
            downs = self._options(level, "down", budget)
            for up, up_usage in self._options(level, "up", budget):
                rest = tuple(b - u for b, u in zip(budget, up_usage))
                for edges, usage in self._multisets(downs, 0, most - 2, rest):
                    gap = up[1] - parent_mult - sum(mult for _, mult, _ in edges)
                    if gap > 0 or (gap == 0 and not edges):
                        yield tuple(sorted((up,) + edges)), tuple(a + b for a, b in zip(up_usage, usage))

    def subtrees(self, level: int, role: str, parent: Optional[str], parent_mult: int,
                 budget: Tuple[int, ...]) -> list:
        key = (level, role, parent, parent_mult, budget)
        if key in self.cache:
            return self.cache[key]
        result = []
        if budget[level] >= 1:
            rest = tuple(b - (1 if i == level else 0) for i, b in enumerate(budget))
            own = tuple(1 if i == level else 0 for i in range(self.levels))
            for edges, usage in self._edge_sets(level, role, parent, parent_mult, rest):
                total = tuple(a + b for a, b in zip(usage, own))
                for touches in ((False, True) if role == "inner" else (False,)):
                    result.append(((level, role, touches, edges), total))
        self.cache[key] = result
        self.produced += len(result)
        if self.produced > settings.MAX_ENUMERATED_TYPES:
            raise ResourceError(f"enumeration exceeded {settings.MAX_ENUMERATED_TYPES} partial types")
        return result

    def roots(self) -> List[tuple]:
        budget = (self.bounds.max_components_per_level,) * self.levels
        trees = self.subtrees(self.levels - 1, "main", None, 0, budget)
        return sorted(tree for tree, usage in trees if all(u >= 1 for u in usage))


def _assemble(tree: tuple, levels: int, kind: str, n: int) -> CombType:
    """Turn a canonical tree into a CombType; the main component is level out, position 0, index 0"""
    built: List[List[Optional[Component]]] = [[] for _ in range(levels)]
    matchings: List[Matching] = []

    def visit(node: tuple, parent_mult: int, parent_above: bool) -> int:
        level, role, touches, edges = node
        position = len(built[level])
        built[level].append(None)
        mults = ([parent_mult] if parent_mult else []) + [mult for _, mult, _ in edges]
        offset = 1 if parent_mult else 0
        for k, (direction, mult, child) in enumerate(edges):
            child_position = visit(child, mult, direction == "down")
            matchings.append(Matching(PunctureRef(level, position, offset + k), PunctureRef(child[0], child_position, 0)))

        if role == "main":
            strip = kind == "strip"
            component = Component(shape="strip" if strip else "disc", boundary_punctures=tuple(mults),
                                  index=0, aut=1 if strip else 0)
        elif role == "inner":
            total = sum(mults)
            data = IndexData(n=n, maslov=2 * total, weighted_infinity=total,
                             critical_touches=((1, 1),) if touches else ())
            component = Component(shape="disc", boundary_punctures=tuple(mults),
                                  touches_critical_locus=touches, index_data=data)
        elif role == "aux":
            component = Component(shape="disc", boundary_punctures=tuple(mults), index=(n - 1) * len(mults))
        else:
            ups = [mult for direction, mult, _ in edges if direction == "up"]
            downs = [mult for direction, mult, _ in edges if direction == "down"]
            if parent_mult:
                (ups if parent_above else downs).append(parent_mult)
            gap = ups[0] - sum(downs)
            component = Component(shape="disc", boundary_punctures=tuple(mults), nontrivial=gap > 0,
                                  index=(n - 1) * len(downs) + gap)
        built[level][position] = component
        return position

    visit(tree, 0, False)
    labels = level_labels(levels)
    return CombType(
        kind=kind,
        levels=tuple(Level(labels[i], tuple(built[i])) for i in range(levels)),
        matchings=tuple(matchings),
    )


def with_main_index(t: CombType, index: int) -> CombType:
    """Set the index of the main outer component (outer level, position 0)"""
    outer = t.levels[-1]
    main = replace(outer.components[0], index=index)
    levels = t.levels[:-1] + (Level(outer.label, (main,) + outer.components[1:]),)
    return replace(t, levels=levels)


def enumerate_types(bounds: EnumerationBounds, n: int, index_budget: Optional[Sequence[int]] = None,
                    kinds: Sequence[str] = KINDS) -> List[Tuple[CombType, Verdict]]:
    """
    Every valid type with 2..max_levels levels within the bounds, for every main outer index
    in index_budget (default -2..n), classified; deterministic order
    """
    if bounds.max_levels < 2:
        return []
    for kind in kinds:
        if kind not in KINDS:
            raise StructuralError(f"unknown kind {kind!r}")
    budget = list(index_budget) if index_budget is not None else list(range(-2, n + 1))
    results: List[Tuple[CombType, Verdict]] = []
    for levels in range(2, bounds.max_levels + 1):
        roots = _TreeBuilder(levels, bounds).roots()
        logger.info(f"🔍 {levels} levels: {len(roots)} tree skeletons")
        for kind in kinds:
            for tree in roots:
                skeleton = _assemble(tree, levels, kind, n)
                report = validate_type(skeleton)
                if not report.ok:
                    logger.debug(f"skipping skeleton: {report.violations[0]}")
                    continue
                # the main index enters the dimension linearly and nothing else
                base = type_virtual_dimension(skeleton, n)
                structural = _structural_verdict(skeleton)
                for index in budget:
                    t = with_main_index(skeleton, index)
                    results.append((t, _dimension_verdict(base + index, lambda: structural)))
                    if len(results) > settings.MAX_ENUMERATED_TYPES:
                        raise ResourceError(f"enumeration exceeded {settings.MAX_ENUMERATED_TYPES} types")
    rigid = sum(1 for _, verdict in results if verdict.status == "Rigid")
    logger.info(f"📊 enumerated {len(results)} classified types, {rigid} rigid")
    return results
