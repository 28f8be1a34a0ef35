"""State vectors from rank-1 projectors via a complex Jacobi eigensolver.

The eigensolver is a cyclic-by-row Jacobi iteration for complex Hermitian
matrices, written out here rather than delegated: each sweep visits every
off-diagonal pivot once and annihilates it with a unitary plane rotation.
Off-diagonal mass never increases, so convergence is monotone and the sweep
cap is a hard safety net, not a tuning knob.  For a projector known to have
rank 1 the eigenvector of the top eigenvalue recovers the state up to a
global phase, which :func:`canonical_phase` then fixes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import MubFamily, canonical_phase

__all__ = [
    "EigenDecomposition",
    "eigen_hermitian",
    "reconstruct_all",
    "state_from_projector",
]

_MAX_SWEEPS = 30


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectral decomposition of a Hermitian matrix.

    ``eigenvalues`` are real, sorted in descending order; column j of
    ``eigenvectors`` is the unit eigenvector for ``eigenvalues[j]``.
    ``sweeps`` counts full Jacobi passes until the off-diagonal mass fell
    below the convergence threshold.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int

    def __post_init__(self):
        vals = np.array(self.eigenvalues, dtype=float)
        vecs = np.array(self.eigenvectors, dtype=complex)
        vals.setflags(write=False)
        vecs.setflags(write=False)
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "eigenvectors", vecs)

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        """Reassemble V diag(w) V^dagger; equals the input up to roundoff."""
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.conj().T


def _jacobi(matrix: np.ndarray):
    """Diagonalize a complex Hermitian matrix by cyclic Jacobi rotations.

    Returns (eigenvalues, eigenvectors, off_history) where off_history[k] is
    the off-diagonal Frobenius mass after sweep k.  Unsorted; the caller
    orders the spectrum.
    """
    a = matrix.astype(complex).copy()
    d = a.shape[0]
    v = np.eye(d, dtype=complex)
    scale = float(np.linalg.norm(a))
    if scale == 0.0:
        return np.zeros(d), v, [0.0]
    threshold = 1e-13 * scale

    def off_mass() -> float:
        strictly_upper = np.triu(a, 1)
        return float(np.sqrt(2.0) * np.linalg.norm(strictly_upper))

    history = [off_mass()]
    for _ in range(_MAX_SWEEPS):
        if history[-1] <= threshold:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                beta = a[p, q]
                mod = abs(beta)
                if mod == 0.0:
                    continue
                # Unitary plane rotation in coordinates (p, q) chosen so the
                # transformed (p, q) entry vanishes exactly.
                phi = beta.conjugate() / mod
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mod)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * phi * col_q
                a[:, q] = s * col_p + c * phi * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * phi.conjugate() * row_q
                a[q, :] = s * row_p + c * phi.conjugate() * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real

                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * phi * vec_q
                v[:, q] = s * vec_p + c * phi * vec_q
        history.append(off_mass())
    return np.diag(a).real.copy(), v, history


def eigen_hermitian(matrix, hermiticity_tol: float = 1e-10) -> EigenDecomposition:
    """Eigenvalues and eigenvectors of a Hermitian matrix, descending order.

    Rejects matrices whose Hermitian defect max|M - M^dagger| exceeds
    ``hermiticity_tol``; the iteration itself then works on the symmetrized
    matrix (M + M^dagger) / 2 so the arithmetic sees exact Hermitian data.
    """
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValueError(f"expected a nonempty square matrix, got shape {m.shape}")
    defect = float(np.max(np.abs(m - m.conj().T)))
    if defect > hermiticity_tol:
        raise ValueError(
            f"matrix is not Hermitian: max deviation {defect:.3e} exceeds {hermiticity_tol:.1e}"
        )
    sym = 0.5 * (m + m.conj().T)
    vals, vecs, history = _jacobi(sym)
    scale = float(np.linalg.norm(sym))
    if history[-1] > 1e-13 * scale:
        raise RuntimeError(
            f"eigensolver did not converge within {_MAX_SWEEPS} sweeps: "
            f"off-diagonal mass {history[-1]:.3e} against scale {scale:.3e}"
        )
    order = np.argsort(-vals, kind="stable")
    return EigenDecomposition(vals[order], vecs[:, order], sweeps=len(history) - 1)


def state_from_projector(projector, tol: float = 1e-10) -> np.ndarray:
    """Recover the unit state vector of a rank-1 projector.

    Checks, in order: the top eigenvalue is separated from the rest by more
    than ``tol`` (a degenerate top eigenvalue means no single ray is
    defined, so an arbitrary pick is refused), the top eigenvalue is 1, and
    the remaining eigenvalues vanish.  The returned vector has its global
    phase fixed by :func:`canonical_phase`.
    """
    decomp = eigen_hermitian(projector, hermiticity_tol=tol)
    vals = decomp.eigenvalues
    if vals.size > 1:
        gap = float(vals[0] - vals[1])
        if gap < tol:
            raise ValueError(
                f"top eigenvalue is degenerate (gap {gap:.3e}); projector does not define a ray"
            )
        residual_mass = float(np.max(np.abs(vals[1:])))
        if residual_mass > tol:
            raise ValueError(
                f"matrix has rank above 1: residual eigenvalue mass {residual_mass:.3e}"
            )
    if abs(vals[0] - 1.0) > tol:
        raise ValueError(f"top eigenvalue {vals[0]!r} deviates from 1 beyond {tol:.1e}")
    return canonical_phase(decomp.eigenvectors[:, 0])


def reconstruct_all(family: MubFamily, tol: float = 1e-10) -> np.ndarray:
    """State vectors for every projector of a family.

    Returns a (num_bases, d, d) array; entry [a, alpha] is the state for
    projector (a, alpha).  Failure on any single projector is annotated with
    its labels so bad entries are easy to locate.
    """
    n, d = family.num_bases, family.dim
    states = np.zeros((n, d, d), dtype=complex)
    for a in range(n):
        for alpha in range(d):
            try:
                states[a, alpha] = state_from_projector(family.projector(a, alpha), tol)
            except ValueError as exc:
                raise ValueError(f"projector (basis {a}, vector {alpha}): {exc}") from exc
    return states
