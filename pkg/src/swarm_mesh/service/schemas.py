"""Request/response models for the HTTP service."""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class RandomWeightsRequest(BaseModel):
    seed: int = 0
    latent_dim: int = 16
    hidden: list[int] = Field(default_factory=lambda: [64, 64])
    path: Optional[str] = None  # when set, weights are saved server-side


class RandomWeightsResponse(BaseModel):
    path: Optional[str] = None
    latent_dim: int
    layer_counts: dict[str, int]


class RunRequest(BaseModel):
    plan: Optional[dict[str, Any]] = None  # inline plan document
    plan_path: Optional[str] = None  # or a server-side plan file
    out_dir: str
    seed_override: Optional[int] = None


class RunResponse(BaseModel):
    out_dir: str
    episodes: int
    trace_files: list[str]
    summary: dict[str, Any]


class NetbenchRequest(BaseModel):
    nodes: int = 5
    rates: list[float] = Field(default_factory=lambda: [60.0])
    presets: list[str] = Field(default_factory=lambda: ["adhoc-multicast-r1"])
    backend: str = "emu"
    duration: float = 10.0
    seed: int = 0
    out_dir: Optional[str] = None


class CdfSummary(BaseModel):
    preset: str
    rate: float
    total_records: int
    delivered_fraction: float
    saturated: bool
    file: Optional[str] = None


class NetbenchResponse(BaseModel):
    datasets: list[CdfSummary]


class ReportRequest(BaseModel):
    traces_dir: str
    out_dir: str
    compare_dir: Optional[str] = None
    label: Optional[str] = None


class ReportResponse(BaseModel):
    out_dir: str
    summary: dict[str, Any]
