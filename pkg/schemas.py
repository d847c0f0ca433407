"""
JSON Schemas
Pydantic models for every file the command line reads or writes, with conversions to and from
the domain objects. Exact rationals travel as "p/q" strings, Gaussian rationals as {re, im}.
"""

import logging
from fractions import Fraction
from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, RootModel, field_validator, model_validator

from algebra import LaurentPolynomial, MutationRule, RationalFunction, gaussian, gaussian_parts, iter_terms
from broken import CombType, Component, Level, Matching, PunctureRef, Verdict
from floer import CoboundaryMatrix, FloerComplex, StripDatum
from geometry import ArcSegment, LineSegment, PlanarPath, PolylineSegment
from index_theory import DiscClass, IndexData

logger = logging.getLogger(__name__)

RationalText = Union[int, str]


def fraction_text(q: Fraction) -> str:
    """"p/q", or "p" for integers"""
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _parse_fraction(value: RationalText) -> Fraction:
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"expected an exact rational like '3/4', got {value!r}")


# -----------------------------
# Algebra
# -----------------------------
class GaussianValue(BaseModel):
    re: RationalText = Field("0", description="Real part as 'p/q'")
    im: RationalText = Field("0", description="Imaginary part as 'p/q'")

    @field_validator("re", "im")
    @classmethod
    def check_rational(cls, v):
        return fraction_text(_parse_fraction(v))

    def to_domain(self):
        return gaussian((self.re, self.im))

    @classmethod
    def from_domain(cls, c) -> "GaussianValue":
        re, im = gaussian_parts(c)
        return cls(re=fraction_text(re), im=fraction_text(im))


class TermModel(BaseModel):
    exponents: List[int] = Field(..., description="One integer exponent per variable")
    coeff: GaussianValue = Field(..., description="Gaussian rational coefficient")


class PotentialModel(BaseModel):
    """Laurent polynomial with Gaussian rational coefficients"""
    variables: List[str] = Field(..., description="Ordered variable names")
    terms: List[TermModel] = Field(default_factory=list, description="Terms; repeated exponents add")

    @field_validator("variables")
    @classmethod
    def unique_variables(cls, v):
        if len(set(v)) != len(v):
            raise ValueError(f"variable names must be unique, got {v}")
        return v

    @model_validator(mode="after")
    def exponent_lengths(self):
        for term in self.terms:
            if len(term.exponents) != len(self.variables):
                raise ValueError(
                    f"term exponents {term.exponents} do not match {len(self.variables)} variables"
                )
        return self

    def to_domain(self) -> LaurentPolynomial:
        collected: Dict[Tuple[int, ...], object] = {}
        for term in self.terms:
            key = tuple(term.exponents)
            value = term.coeff.to_domain()
            collected[key] = collected[key] + value if key in collected else value
        return LaurentPolynomial.from_terms(self.variables, collected)

    @classmethod
    def from_domain(cls, poly: LaurentPolynomial) -> "PotentialModel":
        terms = [
            TermModel(exponents=list(exponents), coeff=GaussianValue.from_domain(coeff))
            for exponents, coeff in sorted(iter_terms(poly), key=lambda item: item[0])
        ]
        return cls(variables=list(poly.variables), terms=terms)


class RationalModel(BaseModel):
    numerator: PotentialModel
    denominator: PotentialModel

    @classmethod
    def from_domain(cls, f: RationalFunction) -> "RationalModel":
        return cls(numerator=PotentialModel.from_domain(f.numerator),
                   denominator=PotentialModel.from_domain(f.denominator))

    def to_domain(self) -> RationalFunction:
        return RationalFunction.normalized(self.numerator.to_domain(), self.denominator.to_domain())


class RuleModel(BaseModel):
    n: Optional[int] = Field(None, ge=1, description="Number of mutated plus fiber variables")
    mutated: str = Field(..., description="The variable x_n")
    fiber: List[str] = Field(default_factory=list, description="x_1 .. x_{n-1}")
    passive: Optional[List[str]] = Field(None, description="Variables the mutation fixes; default: all others")

    def to_domain(self, variables) -> MutationRule:
        passive = self.passive
        if passive is None:
            passive = [v for v in variables if v != self.mutated and v not in self.fiber]
        return MutationRule.from_names(variables, self.mutated, self.fiber, passive, n=self.n)

    @classmethod
    def from_domain(cls, rule: MutationRule) -> "RuleModel":
        return cls(n=rule.n, mutated=rule.mutated, fiber=list(rule.fiber), passive=list(rule.passive))


class AssignmentModel(RootModel[Dict[str, Union[GaussianValue, RationalText]]]):
    """Holonomy values by variable name"""

    def to_domain(self) -> Dict[str, object]:
        point = {}
        for name, value in self.root.items():
            point[name] = value.to_domain() if isinstance(value, GaussianValue) else gaussian(value)
        return point


# -----------------------------
# Paths
# -----------------------------
Point = Tuple[float, float]


def _complex(p: Point) -> complex:
    return complex(p[0], p[1])


def _pair(z: complex) -> Point:
    return (float(z.real), float(z.imag))


class LineModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    type: Literal["line"] = "line"
    from_: Point = Field(..., alias="from", description="Start point [re, im]")
    to: Point = Field(..., description="End point [re, im]")


class ArcModel(BaseModel):
    type: Literal["arc"] = "arc"
    center: Point = Field(..., description="Centre [re, im]")
    radius: float = Field(..., gt=0, description="Radius")
    theta0: float = Field(..., description="Start angle")
    theta1: float = Field(..., description="End angle; the sweep direction follows theta1 - theta0")


class PolylineModel(BaseModel):
    type: Literal["polyline"] = "polyline"
    points: List[Point] = Field(..., min_length=2, description="Vertices [re, im]")


SegmentModel = Annotated[Union[LineModel, ArcModel, PolylineModel], Field(discriminator="type")]


class PathModel(BaseModel):
    closed: bool = Field(False, description="Whether the path is a loop")
    segments: List[SegmentModel] = Field(..., min_length=1)

    def to_domain(self) -> PlanarPath:
        segments = []
        for s in self.segments:
            if isinstance(s, LineModel):
                segments.append(LineSegment(_complex(s.from_), _complex(s.to)))
            elif isinstance(s, ArcModel):
                segments.append(ArcSegment(_complex(s.center), s.radius, s.theta0, s.theta1))
            else:
                segments.append(PolylineSegment(tuple(_complex(p) for p in s.points)))
        return PlanarPath(tuple(segments), closed=self.closed)

    @classmethod
    def from_domain(cls, path: PlanarPath) -> "PathModel":
        segments = []
        for s in path.segments:
            if isinstance(s, LineSegment):
                segments.append(LineModel(from_=_pair(s.start), to=_pair(s.end)))
            elif isinstance(s, ArcSegment):
                segments.append(ArcModel(center=_pair(s.center), radius=s.radius, theta0=s.theta0, theta1=s.theta1))
            else:
                segments.append(PolylineModel(points=[_pair(p) for p in s.points]))
        return cls(closed=path.closed, segments=segments)


# -----------------------------
# Index data
# -----------------------------
class IndexDataModel(BaseModel):
    n: int = Field(..., ge=2, description="Complex dimension")
    maslov: int = Field(..., description="Maslov index of the compactified projection")
    weighted_infinity: int = Field(0, ge=0, description="Preimages of infinity, interior 2 and boundary 1")
    critical_touches: List[List[int]] = Field(default_factory=list, description="Vanishing orders per touch")

    def to_domain(self) -> IndexData:
        return IndexData(self.n, self.maslov, self.weighted_infinity,
                         tuple(tuple(t) for t in self.critical_touches))

    @classmethod
    def from_domain(cls, d: IndexData) -> "IndexDataModel":
        return cls(n=d.n, maslov=d.maslov, weighted_infinity=d.weighted_infinity,
                   critical_touches=[list(t) for t in d.critical_touches])


class DiscClassModel(BaseModel):
    area: RationalText = Field(..., description="Exact area as 'p/q'")
    maslov: int
    boundary_class: List[int] = Field(default_factory=list)

    @field_validator("area")
    @classmethod
    def check_area(cls, v):
        return fraction_text(_parse_fraction(v))

    def to_domain(self) -> DiscClass:
        return DiscClass(Fraction(self.area), self.maslov, tuple(self.boundary_class))


class DiscClassesModel(BaseModel):
    mode: Literal["lagrangian", "pair"] = "lagrangian"
    classes: List[DiscClassModel] = Field(..., description="Disc classes to test for monotonicity")


# -----------------------------
# Floer complexes
# -----------------------------
class StripModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    from_: str = Field(..., alias="from", description="Input generator")
    to: str = Field(..., description="Output generator")
    count: int = Field(..., description="Signed number of rigid strips")
    class_L: List[int] = Field(default_factory=list, description="Boundary class on L")
    class_K: List[int] = Field(default_factory=list, description="Boundary class on K")


class ComplexModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    generators: List[str] = Field(..., min_length=1)
    rank_L: int = Field(..., ge=1, description="H_1 rank of L; a simply-connected side takes one variable with zero classes")
    rank_K: int = Field(..., ge=1, description="H_1 rank of K; a simply-connected side takes one variable with zero classes")
    strips: List[StripModel] = Field(default_factory=list)
    W_L: PotentialModel = Field(..., description="Disc potential of L in the L variables")
    W_K: PotentialModel = Field(..., description="Disc potential of K in the K variables")

    @model_validator(mode="after")
    def ranks_match(self):
        if len(self.W_L.variables) != self.rank_L or len(self.W_K.variables) != self.rank_K:
            raise ValueError("W_L and W_K must have rank_L and rank_K variables")
        return self

    def to_domain(self) -> FloerComplex:
        return FloerComplex(
            generators=tuple(self.generators),
            strips=tuple(StripDatum(s.from_, s.to, s.count, s.class_L, s.class_K) for s in self.strips),
            variables_L=tuple(self.W_L.variables),
            variables_K=tuple(self.W_K.variables),
            potential_L=self.W_L.to_domain(),
            potential_K=self.W_K.to_domain(),
        )

    @classmethod
    def from_domain(cls, c: FloerComplex) -> "ComplexModel":
        return cls(
            generators=list(c.generators),
            rank_L=c.rank_L,
            rank_K=c.rank_K,
            strips=[StripModel(from_=s.from_point, to=s.to_point, count=s.count,
                               class_L=list(s.class_L), class_K=list(s.class_K)) for s in c.strips],
            W_L=PotentialModel.from_domain(c.potential_L),
            W_K=PotentialModel.from_domain(c.potential_K),
        )


class MatrixModel(BaseModel):
    generators: List[str]
    entries: List[List[RationalModel]] = Field(..., description="entries[to][from]")

    @classmethod
    def from_domain(cls, m: CoboundaryMatrix) -> "MatrixModel":
        return cls(generators=list(m.generators),
                   entries=[[RationalModel.from_domain(f) for f in row] for row in m.entries])


# -----------------------------
# Combinatorial types
# -----------------------------
Ref = Tuple[int, int, int]


class ComponentModel(BaseModel):
    shape: Literal["disc", "sphere", "strip"]
    boundary_punctures: List[Annotated[int, Field(ge=1)]] = Field(default_factory=list)
    interior_punctures: List[Annotated[int, Field(ge=1)]] = Field(default_factory=list)
    nontrivial: bool = True
    markings: int = Field(0, ge=0)
    touches_critical_locus: bool = False
    index_data: Optional[IndexDataModel] = None
    index: Optional[int] = None
    aut: int = Field(0, ge=0)

    def to_domain(self) -> Component:
        return Component(
            shape=self.shape,
            boundary_punctures=tuple(self.boundary_punctures),
            interior_punctures=tuple(self.interior_punctures),
            nontrivial=self.nontrivial,
            markings=self.markings,
            touches_critical_locus=self.touches_critical_locus,
            index_data=self.index_data.to_domain() if self.index_data else None,
            index=self.index,
            aut=self.aut,
        )

    @classmethod
    def from_domain(cls, c: Component) -> "ComponentModel":
        return cls(
            shape=c.shape,
            boundary_punctures=list(c.boundary_punctures),
            interior_punctures=list(c.interior_punctures),
            nontrivial=c.nontrivial,
            markings=c.markings,
            touches_critical_locus=c.touches_critical_locus,
            index_data=IndexDataModel.from_domain(c.index_data) if c.index_data else None,
            index=c.index,
            aut=c.aut,
        )


class LevelModel(BaseModel):
    label: str
    components: List[ComponentModel] = Field(default_factory=list)


class CombTypeModel(BaseModel):
    kind: Literal["strip", "disc_with_point_constraint"]
    levels: List[LevelModel] = Field(..., min_length=1)
    matchings: List[Tuple[Ref, Ref]] = Field(
        default_factory=list, description="Node pairs of [level, component, puncture] references"
    )

    def to_domain(self) -> CombType:
        return CombType(
            kind=self.kind,
            levels=tuple(Level(l.label, tuple(c.to_domain() for c in l.components)) for l in self.levels),
            matchings=tuple(Matching(PunctureRef(*a), PunctureRef(*b)) for a, b in self.matchings),
        )

    @classmethod
    def from_domain(cls, t: CombType) -> "CombTypeModel":
        return cls(
            kind=t.kind,
            levels=[LevelModel(label=l.label, components=[ComponentModel.from_domain(c) for c in l.components])
                    for l in t.levels],
            matchings=[
                ((m.first.level, m.first.component, m.first.puncture),
                 (m.second.level, m.second.component, m.second.puncture))
                for m in t.matchings
            ],
        )


class VerdictModel(BaseModel):
    status: Literal["Rigid", "HighIndex", "Excluded"]
    reason: Optional[str] = None
    detail: str = ""

    @classmethod
    def from_domain(cls, v: Verdict) -> "VerdictModel":
        return cls(status=v.status, reason=v.reason, detail=v.detail)
