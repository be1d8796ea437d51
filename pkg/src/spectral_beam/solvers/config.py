from dataclasses import dataclass


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and limits shared by the iterative solvers."""

    newton_tol: float = 1e-10
    max_newton: int = 30
    max_bisections: int = 6
    n_harmonics: int = 3
    steps_per_period: int = 400
    even_harmonic_tol: float = 1e-10
