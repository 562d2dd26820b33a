# hecke/errors.py
from __future__ import annotations
from typing import Optional


class HeckeError(Exception):
    """Base de todos los errores del paquete."""


class ContextMismatch(HeckeError):
    pass


class FieldDivisionByZero(HeckeError, ZeroDivisionError):
    pass


class PrecisionExhausted(HeckeError):
    pass


class NotInGroup(HeckeError):
    pass


class NotHyperbolic(HeckeError):
    pass


class FixedPointAtInfinity(HeckeError):
    pass


class NotSimple(HeckeError):
    pass


class InvariantViolation(HeckeError):
    pass


class CycleLimitExceeded(HeckeError):
    pass


class PoleProximity(HeckeError):
    pass


class MalformedCombination(HeckeError):
    def __init__(self, msg: str, sqrt_multiple: bool = False):
        super().__init__(msg)
        self.sqrt_multiple = sqrt_multiple


class AsymmetricClass(HeckeError):
    def __init__(self, class_tag: str, msg: Optional[str] = None):
        super().__init__(msg or f"clase no simétrica (-A != A): {class_tag}")
        self.class_tag = class_tag


class SpecError(HeckeError):
    pass
