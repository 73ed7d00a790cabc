"""Mixing matrices: base ``W = I - eps L``, per-round compensated, expected."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .eigen import eigenvalues
from .errors import MixingError
from .graph import Graph, laplacian, max_degree

__all__ = [
    "default_epsilon",
    "base_mixing_matrix",
    "round_matrix",
    "expected_matrix",
    "projected_spectral_radius",
    "SpectrumReport",
    "verify_convergence_conditions",
    "write_matrix_csv",
]


def default_epsilon(g: Graph) -> float:
    """Step size ``1 / (max_degree + 1)``."""
    return 1.0 / (max_degree(g) + 1)


def base_mixing_matrix(g: Graph, epsilon: float | None = None) -> np.ndarray:
    """``W = I - epsilon * L``; requires ``0 < epsilon < 1/max_degree``."""
    if epsilon is None:
        epsilon = default_epsilon(g)
    dmax = max_degree(g)
    bound = np.inf if dmax == 0 else 1.0 / dmax
    if not 0.0 < epsilon < bound:
        raise MixingError(f"epsilon={epsilon} outside (0, 1/max_degree) = (0, {bound:.6g})")
    return np.eye(g.n) - epsilon * laplacian(g)


def _check_square(W: np.ndarray, v: np.ndarray) -> None:
    if W.ndim != 2 or W.shape[0] != W.shape[1] or v.shape != (W.shape[0],):
        raise MixingError(f"dimension mismatch: W {W.shape}, vector {v.shape}")


def _compensated(W: np.ndarray, weights: np.ndarray) -> np.ndarray:
    off = W * weights[None, :]
    np.fill_diagonal(off, 0.0)
    off[np.diag_indices_from(off)] = 1.0 - off.sum(axis=1)
    return off


def round_matrix(W: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Biased-compensation matrix for one schedule ``v``.

    Off-diagonal weights of silent neighbours are dropped and folded back
    into the diagonal, so every row still sums to one.
    """
    W = np.asarray(W, dtype=float)
    v = np.asarray(v)
    _check_square(W, v)
    if not np.all((v == 0) | (v == 1)):
        raise MixingError("schedule must be binary")
    return _compensated(W, v.astype(float))


def expected_matrix(W: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Expectation of :func:`round_matrix` under independent ``v_j ~ Bernoulli(p_j)``."""
    W = np.asarray(W, dtype=float)
    p = np.asarray(p, dtype=float)
    _check_square(W, p)
    return _compensated(W, p)


def projected_spectral_radius(M: np.ndarray) -> float:
    """``rho(M - u u^T / n)`` over all complex eigenvalues."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    return float(np.max(np.abs(eigenvalues(M - 1.0 / n))))


@dataclass(frozen=True)
class SpectrumReport:
    moduli: np.ndarray  # eigenvalue moduli of M - u u^T / n, descending
    row_stochastic: bool  # W u = u
    column_stochastic: bool  # u^T W = u^T
    contracting: bool  # rho(W - u u^T / n) < 1

    @property
    def rho(self) -> float:
        return float(self.moduli[0]) if self.moduli.size else 0.0

    @property
    def all_hold(self) -> bool:
        return self.row_stochastic and self.column_stochastic and self.contracting

    def to_text(self) -> str:
        lines = [
            f"condition_1_Wu_eq_u={self.row_stochastic}",
            f"condition_2_uTW_eq_uT={self.column_stochastic}",
            f"condition_3_rho_lt_1={self.contracting}",
            f"projected_spectral_radius={self.rho!r}",
            "moduli=" + " ".join(f"{m:.12g}" for m in self.moduli),
        ]
        return "\n".join(lines) + "\n"


def verify_convergence_conditions(W: np.ndarray, atol: float = 1e-12) -> SpectrumReport:
    """Check the three average-consensus conditions; ``atol`` also guards rho against 1."""
    W = np.asarray(W, dtype=float)
    n = W.shape[0]
    moduli = np.sort(np.abs(eigenvalues(W - 1.0 / n)))[::-1]
    ones = np.ones(n)
    return SpectrumReport(
        moduli=moduli,
        row_stochastic=bool(np.allclose(W @ ones, ones, rtol=0, atol=atol)),
        column_stochastic=bool(np.allclose(ones @ W, ones, rtol=0, atol=atol)),
        contracting=bool(moduli[0] < 1.0 - atol),
    )


def write_matrix_csv(M: np.ndarray, path: str | Path) -> None:
    Path(path).write_text("".join(",".join(repr(float(x)) for x in row) + "\n" for row in M))
