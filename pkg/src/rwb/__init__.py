"""rwb: a structural Ramsey workbench for finite relational structures."""
from rwb.core import (
    Embedding,
    QfType,
    Signature,
    Structure,
    automorphisms,
    canonical_form,
    enumerate_embeddings,
    induced_substructure,
    is_isomorphic,
    qf_type,
)
from rwb.kernels import BACKEND

__all__ = [
    "BACKEND",
    "Embedding",
    "QfType",
    "Signature",
    "Structure",
    "automorphisms",
    "canonical_form",
    "enumerate_embeddings",
    "induced_substructure",
    "is_isomorphic",
    "qf_type",
]
__version__ = "0.1.0"
