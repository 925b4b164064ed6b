"""Problem-file schema and construction of charts and connections from it."""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .connection import Connection
from .liealg import Algebra
from .ring import Chart, Coord
from .symtensor import SymField, parse_index

TASKS = ("kill", "cohomology", "affine", "pw", "pw-lift", "kunneth", "circle", "lieadm",
         "geodesic", "identities")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class CoordModel(_Strict):
    name: str
    kind: Literal["affine", "angle"] = "affine"


class ManifoldModel(_Strict):
    dim: int = Field(ge=1, le=8)
    coords: list[CoordModel]

    @model_validator(mode="after")
    def _dims(self):
        if len(self.coords) != self.dim:
            raise ValueError(f"dim is {self.dim} but {len(self.coords)} coordinates are listed")
        return self

    def chart(self) -> Chart:
        return Chart(tuple(Coord(c.name, c.kind) for c in self.coords))


class ConnectionModel(_Strict):
    gamma: dict[str, str] = Field(default_factory=dict)


class MetricModel(_Strict):
    components: dict[str, str]


class AlgebraModel(_Strict):
    dim: int = Field(ge=1, le=8)
    product: dict[str, list[int | str]] = Field(default_factory=dict)


class TaskModel(_Strict):
    task: Literal[TASKS]
    name: str | None = None
    params: dict[str, Any] = Field(default_factory=dict)
    expect: dict[str, Any] = Field(default_factory=dict)


class ProblemFile(_Strict):
    name: str = "problem"
    tags: list[str] = Field(default_factory=list)
    manifold: ManifoldModel | None = None
    connection: ConnectionModel | None = None
    metric: MetricModel | None = None
    algebra: AlgebraModel | None = None
    tasks: list[TaskModel] = Field(default_factory=list)

    @model_validator(mode="after")
    def _consistent(self):
        if self.manifold is None and self.algebra is None:
            raise ValueError("a problem needs a manifold or an algebra")
        geometric = [t.task for t in self.tasks if t.task != "lieadm"]
        if geometric and self.manifold is None:
            raise ValueError(f"tasks {geometric} need a manifold")
        if any(t.task == "lieadm" for t in self.tasks) and self.algebra is None:
            raise ValueError("task lieadm needs an algebra")
        names = [t.name for t in self.tasks if t.name]
        if len(names) != len(set(names)):
            raise ValueError("task names must be unique")
        return self


class Problem:
    """Validated problem with the chart, connection and metric built (schema errors raise ValueError)."""

    def __init__(self, source: ProblemFile):
        self.source = source
        self.chart = self.connection = self.metric = self.algebra = None
        if source.manifold is not None:
            self.chart = source.manifold.chart()
            self.connection = build_connection(self.chart, source.connection)
            if source.metric is not None:
                self.metric = build_symfield(self.chart, 2, source.metric.components)
        if source.algebra is not None:
            self.algebra = Algebra.from_json(source.algebra.model_dump())

    @classmethod
    def from_json(cls, data: dict) -> "Problem":
        return cls(ProblemFile.model_validate(data))


def build_connection(chart: Chart, model: ConnectionModel | dict | None) -> Connection:
    if model is None:
        return Connection.flat(chart)
    gamma = model.gamma if isinstance(model, ConnectionModel) else model.get("gamma", {})
    return Connection.from_json(chart, {"gamma": gamma})


def build_symfield(chart: Chart, degree: int, components: dict[str, str]) -> SymField:
    return SymField.from_components(chart, degree, {parse_index(chart, k, degree): v
                                                    for k, v in components.items()})


def build_vector(chart: Chart, values) -> list:
    if len(values) != chart.dim:
        raise ValueError(f"vector needs {chart.dim} components")
    return [chart.field(v) for v in values]
