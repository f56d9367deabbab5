"""Exact minimal A-infinity models of Ginzburg dg algebras of acyclic quivers."""
from .quiver import Quiver, parse_quiver
from .ginzburg import build_ginzburg, truncate_dg
from .transfer import Retraction, transfer, check_ainf_relations
from .ar_mesh import knit, nakayama_and_N
from .translation import build_U, build_twisted, compare_bigraded

__all__ = [
    "Quiver", "parse_quiver", "build_ginzburg", "truncate_dg", "Retraction", "transfer",
    "check_ainf_relations", "knit", "nakayama_and_N", "build_U", "build_twisted", "compare_bigraded",
]
__version__ = "0.1.0"
