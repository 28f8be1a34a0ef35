"""Numerical search for unbiased projector families in arbitrary dimension.

Each candidate projector is parameterized as M = B^dagger B / Tr(B^dagger B)
with an unconstrained complex d x d factor B, so Hermiticity, positive
semidefiniteness, and unit trace hold by construction and the optimizer
never leaves the feasible set.  Rank 1 is a soft constraint: for PSD unit
trace M the self trace product Tr(M^2) is 1 exactly when M has rank 1, so
the penalty includes [Tr(M^2) - 1]^2 alongside the pairwise terms.

The optimizer is monotone descent with Armijo backtracking and seeded
random restarts.  Far from a solution the direction is steepest descent
with a Barzilai-Borwein trial step; once the objective is small the
penalty's least-squares structure takes over and damped normal-equation
steps finish the job, since pure gradient steps crawl on the last ten
decades.  Every accepted step satisfies the slope condition, so the
objective trajectory never increases.  Everything is deterministic for a
fixed configuration.

Non-convergence is an outcome, not an error: the result reports the best
residual floor reached and never interprets it as evidence that no family
exists.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .algebra import MubFamily, unbiased_gram_target
from .reconstruct import eigen_hermitian

__all__ = [
    "SearchConfig",
    "SearchResult",
    "SearchState",
    "gradient",
    "objective",
    "polish",
    "run_search",
]

# Descent stops on gradient norms below this even when the objective target
# was not met; a flat point this deep is a residual floor, not progress.
GRADIENT_FLOOR = 1e-12

# Factors with Tr(B^dagger B) at roundoff scale have no meaningful derived
# projector; dividing by such a trace is refused.
DEGENERATE_TRACE = 1e-14

# Line-search steps below this mean no acceptable descent exists at double
# precision; the restart terminates where it stands.
_MIN_STEP = 1e-20

# Fallback growth for the trial step when the Barzilai-Borwein curvature
# estimate is unusable (non-positive); backtracking still shrinks every
# trial that fails the acceptance slope.
_STEP_GROWTH = 2.0

# Hand the endgame to least-squares steps only once the objective is this
# small; the damped normal equations are reliable near a solution and
# pointless far from one.
_REFINE_CROSSOVER = 1e-5

# Skip the least-squares refinement when the residual count would make the
# normal equations quadratically large; gradient steps still apply.
_REFINE_ROWS_CAP = 4000

# A restart that cannot shave 0.1 percent off the objective across this
# many iterations sits at a residual floor and stops.
_STALL_WINDOW = 250
_STALL_GAIN = 1e-3


@dataclass(frozen=True)
class SearchConfig:
    """Everything that determines a search run.

    ``dim`` and ``num_bases`` fix the problem; the rest control the
    optimizer.  ``target_residual`` is the objective value counted as
    convergence.  ``initial_step``, ``shrink``, and ``slope`` drive the
    Armijo backtracking line search.  Identical configurations (seed
    included) give bit-identical runs.
    """

    dim: int
    num_bases: int
    restarts: int = 20
    max_iterations: int = 50000
    seed: int = 0
    target_residual: float = 1e-16
    initial_step: float = 1.0
    shrink: float = 0.5
    slope: float = 1e-4

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError(f"dimension must be at least 2, got {self.dim}")
        if not 2 <= self.num_bases <= self.dim + 1:
            raise ValueError(
                f"num_bases must lie in 2..dim+1 = 2..{self.dim + 1}, got {self.num_bases}"
            )
        if self.restarts < 1:
            raise ValueError(f"restarts must be positive, got {self.restarts}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be positive, got {self.max_iterations}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")
        if not self.target_residual > 0.0:
            raise ValueError(f"target_residual must be positive, got {self.target_residual}")
        if not self.initial_step > 0.0:
            raise ValueError(f"initial_step must be positive, got {self.initial_step}")
        if not 0.0 < self.shrink < 1.0:
            raise ValueError(f"shrink must lie in (0, 1), got {self.shrink}")
        if not 0.0 < self.slope < 1.0:
            raise ValueError(f"slope must lie in (0, 1), got {self.slope}")


@dataclass(frozen=True, eq=False)
class SearchState:
    """A point in parameter space: one complex factor per (basis, vector).

    ``factors[a, alpha]`` is the d x d factor whose derived projector is
    B^dagger B / Tr(B^dagger B).  The factors are unconstrained; objective
    and gradient norm are computed on demand and fail only if some factor
    is degenerate (trace norm at roundoff scale).
    """

    factors: np.ndarray

    def __post_init__(self):
        arr = np.array(self.factors, dtype=complex)
        if arr.ndim != 4 or arr.shape[2] != arr.shape[1] or arr.shape[3] != arr.shape[1]:
            raise ValueError(
                f"factors must be shaped (num_bases, d, d, d), got {arr.shape}"
            )
        if not np.all(np.isfinite(arr.view(float))):
            raise ValueError("factor entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "factors", arr)

    @property
    def dim(self) -> int:
        return self.factors.shape[1]

    @property
    def num_bases(self) -> int:
        return self.factors.shape[0]

    @cached_property
    def objective(self) -> float:
        return objective(self)

    @cached_property
    def gradient_norm(self) -> float:
        return float(np.linalg.norm(gradient(self)))

    def projectors(self) -> np.ndarray:
        """Derived projectors, shaped like a family's projector array."""
        n, d = self.num_bases, self.dim
        m, _ = _derive(self.factors.reshape(n * d, d, d))
        return m.reshape(n, d, d, d)

    def family(self) -> MubFamily:
        """The derived projectors as a family, converged or not."""
        return MubFamily(self.projectors())

    @classmethod
    def from_family(cls, family: MubFamily, psd_floor: float = -1e-8) -> "SearchState":
        """Factors whose derived projectors reproduce ``family``.

        Each factor is the Hermitian square root of its projector, so the
        state starts exactly at the family.  Eigenvalues below ``psd_floor``
        have no real square root and are refused; small negatives above the
        floor are clamped to zero.
        """
        n, d = family.num_bases, family.dim
        factors = np.zeros((n, d, d, d), dtype=complex)
        for a in range(n):
            for alpha in range(d):
                decomp = eigen_hermitian(family.projector(a, alpha))
                vals = decomp.eigenvalues
                if float(vals.min()) < psd_floor:
                    raise ValueError(
                        f"projector (basis {a}, vector {alpha}) has eigenvalue "
                        f"{vals.min():.3e} below {psd_floor:.1e}; no real square root"
                    )
                roots = np.sqrt(np.clip(vals, 0.0, None))
                vecs = decomp.eigenvectors
                factors[a, alpha] = (vecs * roots) @ vecs.conj().T
        return cls(factors)


@dataclass(frozen=True, eq=False)
class SearchResult:
    """Outcome of a search: best point found plus per-restart accounting.

    ``converged`` means ``best_objective <= target_residual``.  ``history``
    holds each restart's final objective and ``restart_iterations`` its
    iteration count, in restart order; both stop at the restart where the
    search first converged.
    """

    best_family: MubFamily
    best_objective: float
    iterations_used: int
    restarts_used: int
    converged: bool
    history: tuple = field(default_factory=tuple)
    restart_iterations: tuple = field(default_factory=tuple)


def _derive(b: np.ndarray):
    """Projectors M = B^dagger B / Tr(B^dagger B) for a stack of factors.

    Returns (projectors, traces).  Raises on degenerate factors; callers in
    the line search catch this and treat the trial step as rejected.
    """
    raw = np.einsum("nki,nkj->nij", b.conj(), b)
    traces = np.einsum("nii->n", raw).real
    bad = np.flatnonzero(traces < DEGENERATE_TRACE)
    if bad.size:
        raise _DegenerateFactor(int(bad[0]), float(traces[bad[0]]))
    return raw / traces[:, None, None], traces


class _DegenerateFactor(ValueError):
    def __init__(self, index: int, trace: float):
        self.index = index
        self.trace = trace
        super().__init__(f"factor {index} has trace norm {trace:.3e} below {DEGENERATE_TRACE:.1e}")


def _residual(m: np.ndarray, target: np.ndarray):
    """Gram residual R = G - target for derived projectors m."""
    n_total = m.shape[0]
    w = m.reshape(n_total, -1)
    return (w.conj() @ w.T).real - target


def _objective_value(r: np.ndarray) -> float:
    # Unordered pairs once each plus the rank-1 self terms: R is symmetric,
    # so the Frobenius mass counts off-diagonal pairs twice and the
    # diagonal once; adding the diagonal again and halving fixes both.
    diag = np.diagonal(r)
    return 0.5 * float(np.sum(r * r) + np.sum(diag * diag))


def _gradient_array(b: np.ndarray, m: np.ndarray, traces: np.ndarray, r: np.ndarray):
    """Objective derivative for every factor entry, complex-packed.

    Entry (i, p, q) holds d(objective)/d(Re B_i[p, q]) in its real part and
    d(objective)/d(Im B_i[p, q]) in its imaginary part.
    """
    # Matrix-space direction: K_i = 2 (sum_j R_ij M_j + R_ii M_i).
    k = 2.0 * (np.einsum("ij,jkl->ikl", r, m) + np.diagonal(r)[:, None, None] * m)
    bk = b @ k
    tr_mk = np.einsum("nij,nji->n", m, k).real
    return (2.0 / traces)[:, None, None] * (bk - tr_mk[:, None, None] * b)


def objective(state: SearchState) -> float:
    """Penalty value of a state: squared Gram residuals plus rank-1 terms.

    Sum over unordered projector pairs of [Tr(M_i M_j) - t]^2 with target
    t = 1/d across bases, 0 for distinct vectors of one basis, plus
    [Tr(M_i^2) - 1]^2 for every projector.  Zero exactly on families of
    mutually unbiased bases.
    """
    n, d = state.num_bases, state.dim
    b = state.factors.reshape(n * d, d, d)
    m, _ = _derive(b)
    return _objective_value(_residual(m, unbiased_gram_target(n, d)))


def gradient(state: SearchState) -> np.ndarray:
    """Analytic objective gradient with respect to every factor entry.

    Returned array has the factors' shape; the real and imaginary parts of
    entry (a, alpha, p, q) are the partial derivatives with respect to the
    real and imaginary parts of that factor entry.  A factor with trace
    norm below 1e-14 has no derived projector; the error names it.
    """
    n, d = state.num_bases, state.dim
    b = state.factors.reshape(n * d, d, d)
    try:
        m, traces = _derive(b)
    except _DegenerateFactor as exc:
        raise ValueError(
            f"factor (basis {exc.index // d}, vector {exc.index % d}) has trace norm "
            f"{exc.trace:.3e} below {DEGENERATE_TRACE:.1e}; derived projector undefined"
        ) from None
    r = _residual(m, unbiased_gram_target(n, d))
    return _gradient_array(b, m, traces, r).reshape(n, d, d, d)


def _refine_direction(b, m, traces, r, g, pair_rows):
    """Damped least-squares step on the stacked residuals, complex-packed.

    Each residual is linear in the derived projectors; the step solves the
    damped normal equations in row space, which is small (one row per
    unordered pair plus one per self term).  Returns None when the solve
    fails or does not yield a descent direction; the caller falls back to
    the gradient.
    """
    n_total, d = b.shape[0], b.shape[1]
    iu, ju = pair_rows
    n_pairs = iu.size
    rows = n_pairs + n_total
    # The derivative of Tr(M_i M_j) in factor i is (2/s_i)(B_i M_j - G_ij B_i),
    # complex-packed like the gradient.
    gij = np.einsum("ik,jk->ij", m.reshape(n_total, -1).conj(), m.reshape(n_total, -1)).real
    c = (2.0 / traces)[:, None, None, None] * (
        np.einsum("ipk,jkq->ijpq", b, m) - gij[:, :, None, None] * b[:, None, :, :]
    )
    jac = np.zeros((rows, n_total, d * d), dtype=complex)
    jac[np.arange(n_pairs), iu] = c[iu, ju].reshape(n_pairs, -1)
    jac[np.arange(n_pairs), ju] = c[ju, iu].reshape(n_pairs, -1)
    jac[n_pairs + np.arange(n_total), np.arange(n_total)] = 2.0 * c[
        np.arange(n_total), np.arange(n_total)
    ].reshape(n_total, -1)
    jac = jac.reshape(rows, -1)
    rvec = np.concatenate([r[iu, ju], np.diagonal(r)])

    normal = (jac @ jac.conj().T).real
    damping = 1e-10 * (float(np.trace(normal)) / rows + 1.0)
    try:
        z = np.linalg.solve(normal + damping * np.eye(rows), rvec)
    except np.linalg.LinAlgError:
        return None, 0.0
    direction = -(z @ jac).reshape(b.shape)
    slope_term = float(np.vdot(g, direction).real)
    if not slope_term < 0.0:
        return None, 0.0
    return direction, slope_term


def _minimize(b0: np.ndarray, target: np.ndarray, cfg: SearchConfig):
    """Descend from factors b0; returns (factors, objective, iterations, trajectory).

    Armijo backtracking along either the steepest-descent direction (with a
    Barzilai-Borwein trial step) or, once the objective is small, the
    damped least-squares direction.  Stops on the objective target, on
    gradient norms at the floor, on a stalled line search or stalled
    progress window, or at the iteration cap.  The trajectory of accepted
    objective values is non-increasing by construction.
    """
    b = b0
    n_total = b.shape[0]
    pair_rows = np.triu_indices(n_total, k=1)
    refine_ok = pair_rows[0].size + n_total <= _REFINE_ROWS_CAP
    m, traces = _derive(b)
    r = _residual(m, target)
    f = _objective_value(r)
    g = _gradient_array(b, m, traces, r)
    trajectory = [f]
    step = cfg.initial_step
    window_f = np.inf
    iterations = 0
    while iterations < cfg.max_iterations:
        if f <= cfg.target_residual:
            break
        gnorm_sq = float(np.vdot(g, g).real)
        if np.sqrt(gnorm_sq) < GRADIENT_FLOOR:
            break
        if iterations % _STALL_WINDOW == 0:
            if f > window_f * (1.0 - _STALL_GAIN):
                break
            window_f = f
        iterations += 1

        direction = None
        if refine_ok and f < _REFINE_CROSSOVER:
            direction, slope_term = _refine_direction(b, m, traces, r, g, pair_rows)
        gradient_step = direction is None
        if gradient_step:
            direction = -g
            slope_term = -gnorm_sq
            trial = step
        else:
            trial = 1.0

        accepted = False
        while trial >= _MIN_STEP:
            candidate = b + trial * direction
            try:
                m_t, traces_t = _derive(candidate)
            except _DegenerateFactor:
                trial *= cfg.shrink
                continue
            r_t = _residual(m_t, target)
            f_t = _objective_value(r_t)
            if f_t <= f + cfg.slope * trial * slope_term:
                delta_b = candidate - b
                b, m, traces, r, f = candidate, m_t, traces_t, r_t, f_t
                g_next = _gradient_array(b, m, traces, r)
                if gradient_step:
                    # Barzilai-Borwein curvature estimate seeds the next
                    # trial step; unusable estimates fall back to growth.
                    delta_g = g_next - g
                    denom = float(np.vdot(delta_b, delta_g).real)
                    if denom > 0.0 and np.isfinite(denom):
                        ratio = float(np.vdot(delta_b, delta_b).real) / denom
                        step = min(max(ratio, 1e-12), 1e8)
                    else:
                        step = trial * _STEP_GROWTH
                g = g_next
                trajectory.append(f)
                accepted = True
                break
            trial *= cfg.shrink
        if not accepted:
            break
    return b, f, iterations, trajectory


def run_search(cfg: SearchConfig) -> SearchResult:
    """Multi-restart search for ``cfg.num_bases`` unbiased bases in dimension ``cfg.dim``.

    Each restart draws independent standard complex Gaussian factors from a
    counter-based generator keyed by ``cfg.seed`` plus the restart index,
    then descends.  The best restart wins (ties go to the lowest index);
    later restarts are skipped once one converges.  Non-convergence is
    reported through ``converged`` and the residual floor in
    ``best_objective``, never as an exception.
    """
    n, d = cfg.num_bases, cfg.dim
    target = unbiased_gram_target(n, d)
    best_b = None
    best_f = np.inf
    finals = []
    iteration_counts = []
    total_iterations = 0
    for restart in range(cfg.restarts):
        rng = np.random.Generator(np.random.Philox(key=cfg.seed + restart))
        x = rng.standard_normal((n * d, d, d))
        y = rng.standard_normal((n * d, d, d))
        b0 = (x + 1j * y) / np.sqrt(2.0)
        b, f, iterations, _ = _minimize(b0, target, cfg)
        finals.append(f)
        iteration_counts.append(iterations)
        total_iterations += iterations
        if f < best_f:
            best_f = f
            best_b = b
        if best_f <= cfg.target_residual:
            break
    m, _ = _derive(best_b)
    return SearchResult(
        best_family=MubFamily(m.reshape(n, d, d, d)),
        best_objective=best_f,
        iterations_used=total_iterations,
        restarts_used=len(finals),
        converged=bool(best_f <= cfg.target_residual),
        history=tuple(finals),
        restart_iterations=tuple(iteration_counts),
    )


def polish(family: MubFamily, cfg: SearchConfig) -> SearchResult:
    """Refine an existing family by descending from its own factors.

    Initialization takes each projector's Hermitian square root, so an
    already unbiased family converges immediately.  Runs a single descent;
    ``cfg.restarts`` is ignored.  Rejects projectors with eigenvalues below
    -1e-8 (no real square root exists).
    """
    if family.dim != cfg.dim or family.num_bases != cfg.num_bases:
        raise ValueError(
            f"family shape ({family.num_bases} bases, dim {family.dim}) does not match "
            f"config ({cfg.num_bases} bases, dim {cfg.dim})"
        )
    state = SearchState.from_family(family)
    n, d = cfg.num_bases, cfg.dim
    target = unbiased_gram_target(n, d)
    b0 = state.factors.reshape(n * d, d, d)
    b, f, iterations, _ = _minimize(b0, target, cfg)
    m, _ = _derive(b)
    return SearchResult(
        best_family=MubFamily(m.reshape(n, d, d, d)),
        best_objective=f,
        iterations_used=iterations,
        restarts_used=1,
        converged=bool(f <= cfg.target_residual),
        history=(f,),
        restart_iterations=(iterations,),
    )
