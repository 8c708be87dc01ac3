"""Pydantic request/response models for the HTTP API.

Response bodies for direction and traversal endpoints are the library's own
JSON serializations (contract: service output equals library output), so
those are returned as plain dicts rather than re-modeled here.
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class CatalogStats(BaseModel):
    dim: int
    product_count: int
    prompt_count: int


class RetrieveRequest(BaseModel):
    prompt: str
    n: int = Field(ge=1)


class RetrieveItem(BaseModel):
    id: str
    similarity: float
    display_ref: str | None = None


class RetrieveResponse(BaseModel):
    items: list[RetrieveItem]


class DirectionRef(BaseModel):
    """Identifies a direction by its build inputs (also the cache key)."""

    neutral_prompt: str
    exemplar_prompt: str
    m: int | None = Field(default=None, ge=2)
    n: int | None = Field(default=None, ge=2)
    epsilon: float | None = Field(default=None, gt=0)
    invert: bool = False


class DirectionRequest(BaseModel):
    neutral_prompt: str
    exemplar_prompt: str
    m: int | None = Field(default=None, ge=2)
    n: int | None = Field(default=None, ge=2)
    epsilon: float | None = Field(default=None, gt=0)


class TraverseRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    seed_id: str
    direction: dict | None = None
    direction_ref: DirectionRef | None = None
    lambda_: float | None = Field(default=None, alias="lambda", gt=0)
    rho: float | None = Field(default=None, ge=0, lt=1)
    steps: int | None = Field(default=None, ge=1)
    k_rec: int | None = Field(default=None, ge=1)
    k_reg: int | None = Field(default=None, ge=1)
    include_positions: bool = False


class StepRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    position: list[float] | None = None
    seed_id: str | None = None
    direction: dict | None = None
    direction_ref: DirectionRef | None = None
    lambda_: float | None = Field(default=None, alias="lambda", gt=0)
    rho: float | None = Field(default=None, ge=0, lt=1)
    k_rec: int | None = Field(default=None, ge=1)
    k_reg: int | None = Field(default=None, ge=1)
    exclude: list[str] = Field(default_factory=list)


class ProjectRequest(BaseModel):
    ids: list[str] = Field(default_factory=list)
    positions: list[list[float]] = Field(default_factory=list)
