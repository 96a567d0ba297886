"""Request bodies for the advisor HTTP API."""

from __future__ import annotations

from pydantic import BaseModel


class PriorIn(BaseModel):
    theta: list[float]
    sigma_mat: list[float]


class SessionCreateIn(BaseModel):
    materials: list[list[float]]
    stresses: list[list[float]]
    target_stress: list[float]
    noise_var: float
    tau: float
    material_labels: list[str] | None = None
    prior: PriorIn | str = "diffuse"
    prior_scale: float = 100.0
    policy: str = "seq-ei"
    track: str = "approx"
    schedule_length: int | None = None
    seed: int = 0

    def as_config(self) -> dict:
        doc = {
            "materials": self.materials,
            "stresses": self.stresses,
            "target_stress": self.target_stress,
            "noise_var": self.noise_var,
            "tau": self.tau,
            "policy": self.policy,
            "track": self.track,
            "seed": self.seed,
        }
        if self.material_labels is not None:
            doc["material_labels"] = self.material_labels
        if isinstance(self.prior, PriorIn):
            doc["prior"] = {"theta": self.prior.theta, "sigma_mat": self.prior.sigma_mat}
        else:
            doc["prior"] = self.prior
            doc["prior_scale"] = self.prior_scale
        if self.schedule_length is not None:
            doc["schedule_length"] = self.schedule_length
        return doc


class ObservationIn(BaseModel):
    lifetime: float | None
    tau: float


class HistoricalRunIn(BaseModel):
    z: list[float]
    v: list[float]
    lifetime: float


class PriorElicitIn(BaseModel):
    observations: list[HistoricalRunIn]
