"""
Gain certificates: definiteness of the quadratic bound 𝒲′ on V̇.

𝒲′ is built entry for entry as derived for the six norms
z = (‖r_b‖, ‖ṙ_b‖, ‖η‖, ‖Ω_p‖, |o_pᵀe₃|, |ȯ_pᵀe₃|). Its (5,5) entry is +2k₆,
so e₅ᵀ𝒲′e₅ > 0 and the matrix is never negative definite; the
certificate reports the spectrum and that reason.
"""

from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field

from models.gains import Gains


class Verdict(str, Enum):
    ACCEPTED = "accepted"
    REJECTED = "rejected"


class GainCertificate(BaseModel):
    """Outcome of a definiteness check on 𝒲′."""
    gains: Gains
    c0: float
    c1: float
    c2: float
    C1: float
    C2: float
    eigenvalues: List[float] = Field(description="Spectrum of the symmetrized 𝒲′, ascending")
    poly_eigenvalues: List[float] = Field(description="Same spectrum from the characteristic polynomial")
    oracle_agrees: bool
    verdict: Verdict
    reason: Optional[str] = None

    @property
    def accepted(self) -> bool:
        return self.verdict == Verdict.ACCEPTED


def build_w_prime(g: Gains, c1: float, c2: float, C1: float, C2: float) -> np.ndarray:
    k1, k2, k3, k4, k5, k6 = g.k1, g.k2, g.k3, g.k4, g.k5, g.k6
    a = 0.5 * (k2 * C2 + k1 * C1)
    b = 0.5 * k4 + 0.5 * C1**2
    c = 0.5 * k3 + 0.5 * C2**2
    return np.array([
        [-c1 * k4, a, 0.0, 0.0, 0.0, b],
        [a, -k3 + c1, 0.0, 0.0, 0.0, c],
        [0.0, 0.0, -c2 * k2, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -k1 + c2, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 2.0 * k6, k5],
        [b, c, 0.0, 0.0, k5, -k5],
    ])


def characteristic_eigenvalues(W: np.ndarray) -> np.ndarray:
    """Eigenvalues as roots of det(λI − W), real parts ascending."""
    return np.sort(np.real(np.roots(np.poly(W))))


def sampled_negative_definite(W: np.ndarray, n_samples: int = 100_000,
                              rng: Optional[np.random.Generator] = None) -> bool:
    """
    Brute-force definiteness: xᵀWx < 0 for every sampled x.

    Samples are the ± coordinate axes plus Gaussian directions.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    n = W.shape[0]
    X = np.vstack([np.eye(n), rng.standard_normal((n_samples, n))])
    values = np.einsum("ij,jk,ik->i", X, W, X)
    return bool(np.all(values < 0.0))


def eigen_negative_definite(W: np.ndarray) -> bool:
    """Largest eigenvalue of the symmetric part < 0."""
    return bool(np.linalg.eigvalsh(0.5 * (W + W.T))[-1] < 0.0)


def gain_condition_check(g: Gains, c0: float, c1: float, c2: float, C1: float, C2: float) -> GainCertificate:
    W = build_w_prime(g, c1, c2, C1, C2)
    Ws = 0.5 * (W + W.T)
    eig = np.linalg.eigvalsh(Ws)
    poly = characteristic_eigenvalues(Ws)
    scale = max(1.0, float(np.max(np.abs(eig))))
    agree = bool(np.allclose(eig, poly, atol=1e-6 * scale))

    accepted = bool(eig[-1] < 0.0)
    reason = None
    if not accepted:
        diag = np.diag(Ws)
        if np.any(diag >= 0.0):
            idx = int(np.argmax(diag))
            reason = f"diagonal entry ({idx + 1},{idx + 1}) = {diag[idx]:.4g} is not negative"
        else:
            reason = f"largest eigenvalue {eig[-1]:.4g} is not negative"

    return GainCertificate(
        gains=g, c0=c0, c1=c1, c2=c2, C1=C1, C2=C2,
        eigenvalues=[float(v) for v in eig],
        poly_eigenvalues=[float(v) for v in poly],
        oracle_agrees=agree,
        verdict=Verdict.ACCEPTED if accepted else Verdict.REJECTED,
        reason=reason,
    )
