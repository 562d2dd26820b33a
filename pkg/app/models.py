# app/models.py
# Cuerpos de petición de la API. Los campos algebraicos viajan en el mismo
# formato JSON que usa hecke.serialize (listas little-endian "n/d" en λ_p).
from __future__ import annotations

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class ClassIn(BaseModel):
    form: Optional[Any] = None
    cycle: Optional[Dict[str, Any]] = None
    coeff: Any = 1


class BuildIn(BaseModel):
    p: int = Field(..., ge=3)
    k: int = Field(..., ge=1)
    mode: str = "symmetric"
    classes: List[ClassIn] = []
    c0: Any = 0
    a0: Any = 0
    b1: Any = 0
    cn: Optional[List[Any]] = None

    def as_spec(self) -> Dict[str, Any]:
        data = self.model_dump(exclude_none=True) if hasattr(self, "model_dump") else self.dict(exclude_none=True)
        data["classes"] = [{k: v for k, v in c.items() if v is not None} for c in data.get("classes", [])]
        return data


class VerifyIn(BaseModel):
    # Un spec (se construye antes de verificar) o una RatFunc serializada con su k
    spec: Optional[BuildIn] = None
    rpf: Optional[Dict[str, Any]] = None
    k: Optional[int] = Field(None, ge=1)
    numeric_check: int = Field(0, ge=0, le=200)
