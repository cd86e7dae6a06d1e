"""Box-constrained dual ascent for the regularized triplet-margin problem.

Primal (over symmetric p x p matrices M):

    P(M) = lam/2 ||M||_F^2 + (1/N) sum_t loss(<M, A_t>)

Dual (reported in the N-scaled form, variables boxed to [-1, 0]):

    D(alpha) = -sum_t conj(alpha_t) - (1/(2 lam N)) alpha^T G alpha

linked by M(alpha) = -S / (lam N) with S = sum_t alpha_t A_t.  The solver
keeps S (p x p) instead of G: one coordinate step costs O(p^2), and
alpha^T G alpha = ||S||_F^2.

The schedule is one stochastic-subgradient epoch (step 1/(lam t), dual
seeds recorded at visit time) followed by exact coordinate-ascent passes
in fresh random order each epoch.  With a full permutation first epoch,
the final subgradient iterate equals -S/(lam N) for the recorded seeds,
so the handoff to coordinate ascent is exact.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .gram import accumulator, gram_vector_product, gram_view

FEASIBILITY_TOL = 1e-12
DRIFT_TOL = 1e-6

_LOSS_KINDS = ("hinge", "smoothed_hinge")


@dataclass(frozen=True)
class LossModel:
    """Unit-margin loss: plain hinge or its quadratically smoothed variant.

    ``gamma`` is the smoothing width (the loss derivative is 1/gamma-
    Lipschitz); it is ignored for the plain hinge.  Derivatives live in
    [-1, 0], which is why the dual box is [-1, 0].
    """

    kind: str = "hinge"
    gamma: float = 1.0

    def __post_init__(self):
        if self.kind not in _LOSS_KINDS:
            raise ValueError(f"loss kind must be one of {_LOSS_KINDS}, got {self.kind!r}")
        if self.kind == "smoothed_hinge" and self.gamma <= 0:
            raise ValueError("gamma must be positive for the smoothed hinge")

    def value(self, z):
        z = np.asarray(z, dtype=np.float64)
        if self.kind == "hinge":
            return np.maximum(0.0, 1.0 - z)
        g = self.gamma
        return np.where(
            z >= 1.0,
            0.0,
            np.where(z >= 1.0 - g, (1.0 - z) ** 2 / (2.0 * g), 1.0 - z - g / 2.0),
        )

    def derivative(self, z):
        z = np.asarray(z, dtype=np.float64)
        if self.kind == "hinge":
            return np.where(z < 1.0, -1.0, 0.0)
        g = self.gamma
        return np.where(z >= 1.0, 0.0, np.where(z >= 1.0 - g, -(1.0 - z) / g, -1.0))

    def conjugate(self, alpha):
        """Fenchel conjugate on the box [-1, 0] (infinite elsewhere)."""
        alpha = np.asarray(alpha, dtype=np.float64)
        if self.kind == "hinge":
            return alpha
        return alpha + 0.5 * self.gamma * alpha**2


@dataclass
class SolverState:
    """Mutable dual iterate: alpha, its accumulator S, and the epoch count."""

    alpha: np.ndarray
    S: np.ndarray
    lam: float
    epoch: int
    rng: np.random.Generator


@dataclass
class DualSolution:
    """Final iterate plus the per-epoch trace (epoch, objective, gap, seconds)."""

    alpha: np.ndarray
    objective: float
    gap: float
    trace: list = field(default_factory=list)
    s_matrix: np.ndarray | None = None


def init_state(cache, lam, seed):
    if lam <= 0:
        raise ValueError("lam must be positive")
    p = cache.space_dim
    return SolverState(
        alpha=np.zeros(cache.n),
        S=np.zeros((p, p)),
        lam=lam,
        epoch=0,
        rng=np.random.default_rng(seed),
    )


def _check_feasible(alpha):
    if alpha.size and (alpha.min() < -1.0 - FEASIBILITY_TOL or alpha.max() > FEASIBILITY_TOL):
        raise ValueError("alpha leaves the box [-1, 0]")


def dual_objective(state, view, loss):
    """D(alpha) using the identity alpha^T G alpha = ||S||_F^2."""
    _check_feasible(state.alpha)
    n = view.n
    if n == 0:
        return 0.0
    quad = float(np.sum(state.S * state.S))
    return float(-np.sum(loss.conjugate(state.alpha)) - quad / (2.0 * state.lam * n))


def dual_objective_from_alpha(view, alpha, loss, lam):
    """Same objective evaluated matrix-free from alpha alone."""
    _check_feasible(alpha)
    n = view.n
    if n == 0:
        return 0.0
    quad = float(alpha @ gram_vector_product(view, alpha))
    return float(-np.sum(loss.conjugate(alpha)) - quad / (2.0 * lam * n))


def _margins(cache, M):
    MU = M @ cache.U
    MV = M @ cache.V
    return np.einsum("pt,pt->t", cache.U, MU) - np.einsum("pt,pt->t", cache.V, MV)


def primal_objective(cache, M, loss, lam):
    """P(M) = lam/2 ||M||_F^2 + mean hinge-type loss over the cache."""
    reg = 0.5 * lam * float(np.sum(M * M))
    if cache.n == 0:
        return reg
    return reg + float(np.mean(loss.value(_margins(cache, M))))


def duality_gap(state, view, loss):
    """P(M(alpha)) - D(alpha)/N, the mean-loss-scale optimality certificate."""
    n = view.n
    if n == 0:
        return 0.0
    M = -state.S / (state.lam * n)
    return primal_objective(view.cache, M, loss, state.lam) - dual_objective(state, view, loss) / n


def sdca_update(state, view, loss, t):
    """Exact coordinate maximization of the dual at coordinate t, O(p^2).

    With c_t = <A_t, S> - alpha_t G[t, t], the stationary point is
    -(lam N + c_t) / (G[t, t])           for the hinge, and
    -(lam N + c_t) / (gamma lam N + G[t, t])  for the smoothed hinge,
    clipped to [-1, 0].  A zero diagonal makes the hinge subproblem
    linear: the coordinate goes to -1 when the slope is negative, else 0.
    """
    cache = view.cache
    u = cache.U[:, t]
    v = cache.V[:, t]
    S = state.S
    g_tt = view.diag[t]
    lam_n = state.lam * view.n
    old = state.alpha[t]
    c_t = float(u @ (S @ u) - v @ (S @ v)) - old * g_tt
    if loss.kind == "hinge":
        if g_tt > 0.0:
            new = min(0.0, max(-1.0, -(lam_n + c_t) / g_tt))
        else:
            new = -1.0 if -(1.0 + c_t / lam_n) < 0.0 else 0.0
    else:
        denom = loss.gamma * lam_n + max(g_tt, 0.0)
        new = min(0.0, max(-1.0, -(lam_n + c_t) / denom))
    delta = new - old
    if delta != 0.0:
        state.S += delta * np.outer(u, u)
        state.S -= delta * np.outer(v, v)
        state.alpha[t] = new
    return state


def sgd_epoch(state, view, loss, order):
    """One strongly-convex-schedule subgradient pass seeding the dual.

    Visits ``order`` (a permutation of the triplets) with step 1/(lam t),
    records alpha_t = loss'(<M, A_t>) at visit time, and rebuilds S from
    the recorded values on completion.
    """
    cache = view.cache
    n = view.n
    if sorted(order) != list(range(n)):
        raise ValueError("order must be a permutation of all triplet indices")
    lam = state.lam
    p = cache.space_dim
    M = np.zeros((p, p))
    for step, t in enumerate(order, start=1):
        u = cache.U[:, t]
        v = cache.V[:, t]
        z = float(u @ (M @ u) - v @ (M @ v))
        g = float(loss.derivative(z))
        state.alpha[t] = g
        eta = 1.0 / (lam * step)
        M *= 1.0 - eta * lam
        if g != 0.0:
            M -= (eta * g) * np.outer(u, u)
            M += (eta * g) * np.outer(v, v)
    state.S = accumulator(cache, state.alpha)
    state.epoch = 1
    return state


def _refresh_accumulator(state, cache):
    rebuilt = accumulator(cache, state.alpha)
    scale = max(float(np.abs(rebuilt).max()), 1e-30)
    drift = float(np.abs(state.S - rebuilt).max()) / scale
    if drift > DRIFT_TOL:
        raise ValueError(f"accumulator drift {drift:.3e} exceeds {DRIFT_TOL:.1e}")
    state.S = rebuilt
    return state


def csdca_solve(cache, loss, lam, epochs, seed, gap_tol=None, max_epochs=None):
    """Run the combined schedule: one subgradient epoch, then coordinate ascent.

    Parameters
    ----------
    epochs : int
        Total passes (the first is the subgradient seed pass).
    gap_tol : float, optional
        When set, keep adding coordinate-ascent epochs past ``epochs``
        until ``duality_gap <= gap_tol`` or ``max_epochs`` is hit.
    """
    if epochs < 1:
        raise ValueError("epochs must be at least 1")
    view = gram_view(cache)
    state = init_state(cache, lam, seed)
    n = cache.n
    if n == 0:
        return DualSolution(alpha=state.alpha, objective=0.0, gap=0.0, trace=[],
                            s_matrix=state.S)
    trace = []
    start = time.perf_counter()

    def record():
        obj = dual_objective(state, view, loss)
        gap = duality_gap(state, view, loss)
        trace.append((state.epoch, obj, gap, time.perf_counter() - start))
        return gap

    order = state.rng.permutation(n)
    sgd_epoch(state, view, loss, list(order))
    gap = record()
    limit = epochs if max_epochs is None else max(epochs, max_epochs)
    epoch = 1
    while epoch < limit:
        epoch += 1
        for t in state.rng.permutation(n):
            sdca_update(state, view, loss, int(t))
        state.epoch = epoch
        _refresh_accumulator(state, cache)
        gap = record()
        if epoch >= epochs and gap_tol is not None and gap <= gap_tol:
            break
    if gap_tol is not None and gap > gap_tol:
        raise ValueError(f"solver stopped at gap {gap:.3e} > tolerance {gap_tol:.1e}")
    return DualSolution(
        alpha=state.alpha,
        objective=dual_objective(state, view, loss),
        gap=gap,
        trace=trace,
        s_matrix=state.S,
    )


def trace_csv(solution):
    """Render the per-epoch trace as ``epoch,dual_objective,duality_gap,seconds``."""
    lines = ["epoch,dual_objective,duality_gap,seconds"]
    lines.extend(
        "%d,%.17g,%.17g,%.6f" % (epoch, obj, gap, sec) for epoch, obj, gap, sec in solution.trace
    )
    return "\n".join(lines) + "\n"
