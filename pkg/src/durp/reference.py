"""Dense projected-gradient reference solver for small dual instances.

An independent optimization path used to certify the coordinate-ascent
solver and to compute near-exact optima inside the verification
harnesses.  Materializes G (guarded to small N), steps with 1/L where L
comes from power iteration, and optionally adds Nesterov momentum with
objective restarts (same fixed point, faster tail).
"""

from __future__ import annotations

import numpy as np

from .gram import accumulator, dense_gram, gram_view
from .solver import DualSolution, dual_objective_from_alpha, primal_objective


def power_iteration_norm(A, iters=200, seed=0):
    """Spectral norm of a square matrix via plain power iteration."""
    n = A.shape[0]
    if n == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    x = rng.normal(size=n)
    x /= np.linalg.norm(x)
    B = A.T @ A
    for _ in range(iters):
        y = B @ x
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        x = y / norm
    return float(np.sqrt(x @ (B @ x)))


def _clip_box(alpha):
    return np.clip(alpha, -1.0, 0.0)


def pga_solve(cache, loss, lam, gap_tol=1e-8, max_iters=200000, accelerated=True,
              check_every=50):
    """Maximize the boxed dual on a dense Gram matrix.

    Stops when the mean-loss-scale duality gap drops below ``gap_tol``.
    Raises if the budget runs out first.
    """
    view = gram_view(cache)
    n = cache.n
    if n == 0:
        return DualSolution(alpha=np.zeros(0), objective=0.0, gap=0.0, trace=[],
                            s_matrix=np.zeros((cache.space_dim, cache.space_dim)))
    G = dense_gram(view)
    lam_n = lam * n
    lipschitz = power_iteration_norm(G) / lam_n
    if loss.kind == "smoothed_hinge":
        lipschitz += loss.gamma
    step = 1.0 / max(lipschitz, 1e-30)

    def grad(a):
        g = -1.0 - (G @ a) / lam_n
        if loss.kind == "smoothed_hinge":
            g = g - loss.gamma * a
        return g

    def objective(a):
        return float(-np.sum(loss.conjugate(a)) - (a @ (G @ a)) / (2.0 * lam_n))

    def normalized_gap(a):
        M = -accumulator(cache, a) / lam_n
        return primal_objective(cache, M, loss, lam) - objective(a) / n

    alpha = np.zeros(n)
    momentum = alpha.copy()
    t_accel = 1.0
    best_obj = -np.inf
    gap = normalized_gap(alpha)
    if gap <= gap_tol:
        iters_done = 0
    else:
        iters_done = max_iters
        for it in range(1, max_iters + 1):
            base = momentum if accelerated else alpha
            new = _clip_box(base + step * grad(base))
            if accelerated:
                t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_accel * t_accel))
                momentum = new + ((t_accel - 1.0) / t_next) * (new - alpha)
                momentum = _clip_box(momentum)
                t_accel = t_next
            alpha = new
            if it % check_every == 0:
                obj = objective(alpha)
                if accelerated and obj < best_obj:
                    # objective went backwards under momentum: restart it
                    momentum = alpha.copy()
                    t_accel = 1.0
                best_obj = max(best_obj, obj)
                gap = normalized_gap(alpha)
                if gap <= gap_tol:
                    iters_done = it
                    break
        else:
            gap = normalized_gap(alpha)
    if gap > gap_tol:
        raise ValueError(f"reference solve stalled at gap {gap:.3e} > {gap_tol:.1e}")
    S = accumulator(cache, alpha)
    return DualSolution(
        alpha=alpha,
        objective=dual_objective_from_alpha(view, alpha, loss, lam),
        gap=float(gap),
        trace=[(iters_done, objective(alpha), float(gap), 0.0)],
        s_matrix=S,
    )
