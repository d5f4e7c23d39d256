"""Central tolerance bundle.

Every report echoes the bundle it was produced with, and the CLI honors
``STEKLOV_TOL_<FIELD>`` environment overrides so numeric thresholds live in
exactly one place.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    eigensolver_offdiag: float = 1e-13  # Jacobi off-diagonal Frobenius target
    eigen_residual: float = 1e-9        # max ||A v - w v|| accepted per eigenpair
    assertion: float = 1e-8             # assertion-class comparisons in checks
    agreement: float = 1e-8             # cross-method agreement (sigma methods)
    harmonic_residual: float = 1e-10    # interior Laplacian residual, relative
    flow_residual: float = 1e-10        # transfer-recursion system residual
    dense_flow_residual: float = 1e-9   # dense-solve system residual
    resonance: float = 1e-12            # vanishing transfer coefficient cutoff
    bisection: float = 1e-11            # sigma bisection interval width
    sigma_witness: float = 1e-9         # witness flow value / positivity slack
    multiplicity: float = 1e-8          # eigenvalue grouping width
    vanishing: float = 1e-7             # eigenvector vanishing threshold
    dtn_symmetry: float = 1e-12         # DtN asymmetry bound
    dtn_rowsum: float = 1e-10           # DtN row-sum bound
    green: float = 1e-10                # Green identity gap, relative

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_env(cls, env=None) -> "Tolerances":
        """Default bundle with STEKLOV_TOL_<FIELD> overrides applied."""
        env = os.environ if env is None else env
        overrides = {}
        for f in fields(cls):
            raw = env.get("STEKLOV_TOL_" + f.name.upper())
            if raw is not None:
                overrides[f.name] = float(raw)
        return replace(cls(), **overrides)


DEFAULT_TOLERANCES = Tolerances()
