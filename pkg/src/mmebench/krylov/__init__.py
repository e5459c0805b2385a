from .oracle import (
    KrylovBasis,
    attainment_holds,
    build_krylov_basis,
    optimal_krylov_distance,
    verify_theorem1,
)

__all__ = [
    "KrylovBasis",
    "attainment_holds",
    "build_krylov_basis",
    "optimal_krylov_distance",
    "verify_theorem1",
]
