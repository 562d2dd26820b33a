# hecke: grupos de Hecke G_p, formas λ_p-BQF, dinámica Φ_p y funciones de período racionales
from .errors import HeckeError, SpecError
from .numberfield import NFContext, NFElem, QElem, make_context
from .heckealg import BQF, Mat2, generators, make_bqf
from .dynamics import Cycle, cycle_from, enumerate_classes, reduce_to_cycle
from .ratfunc import RatFunc, slash
from .rpf import ClassTerm, RPFSpec, build, pole_audit, verify

__all__ = [
    "HeckeError", "SpecError",
    "NFContext", "NFElem", "QElem", "make_context",
    "BQF", "Mat2", "generators", "make_bqf",
    "Cycle", "cycle_from", "enumerate_classes", "reduce_to_cycle",
    "RatFunc", "slash",
    "ClassTerm", "RPFSpec", "build", "pole_audit", "verify",
]
