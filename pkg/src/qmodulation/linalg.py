"""Hermitian eigensolver.

Cyclic Jacobi with round-robin (parallel) pair ordering: each round
annihilates a set of disjoint off-diagonal pairs at once, so a sweep is
``n - 1`` vectorised rounds instead of ``n (n - 1) / 2`` scalar rotations.
"""

import numpy as np

OFF_TOL = 1e-13
MAX_SWEEPS = 100
# LAPACK takes over above this size; see ``eigh``.
JACOBI_MAX_DIM = 256


def _round_robin(n):
    """Yield (P, Q) index arrays covering every pair once per sweep."""
    m = n + (n % 2)
    players = list(range(m))
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p < n and q < n:
                ps.append(p)
                qs.append(q)
        if ps:
            yield np.array(ps), np.array(qs)
        players = [players[0]] + [players[-1]] + players[1:-1]


def off_norm(a):
    """Frobenius norm of the off-diagonal part (computed directly, no cancellation)."""
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def jacobi_eigh(a, tol=OFF_TOL, max_sweeps=MAX_SWEEPS):
    """Eigen-decompose a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(w, v)`` with ascending eigenvalues ``w`` and unitary ``v``
    whose columns are the eigenvectors, matching ``numpy.linalg.eigh``.
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    if n <= 1:
        return a.diagonal().real.copy(), v

    scale = max(1.0, float(np.linalg.norm(a)))
    rounds = list(_round_robin(n))
    for _ in range(max_sweeps):
        if off_norm(a) <= tol * scale:
            break
        for P, Q in rounds:
            apq = a[P, Q]
            r = np.abs(apq)
            active = r > 1e-300
            if not np.any(active):
                continue
            app = a[P, P].real
            aqq = a[Q, Q].real
            safe_r = np.where(active, r, 1.0)
            phase = np.where(active, apq / safe_r, 1.0)
            tau = (aqq - app) / (2.0 * safe_r)
            sign = np.where(tau >= 0.0, 1.0, -1.0)
            t = sign / (np.abs(tau) + np.sqrt(tau * tau + 1.0))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            pc = phase.conj()
            u_pp, u_pq, u_qp, u_qq = c, s, -s * pc, c * pc

            cp, cq = a[:, P].copy(), a[:, Q].copy()
            a[:, P] = cp * u_pp + cq * u_qp
            a[:, Q] = cp * u_pq + cq * u_qq
            rp, rq = a[P, :].copy(), a[Q, :].copy()
            a[P, :] = np.conj(u_pp)[:, None] * rp + np.conj(u_qp)[:, None] * rq
            a[Q, :] = np.conj(u_pq)[:, None] * rp + np.conj(u_qq)[:, None] * rq
            a[P, Q] = 0.0
            a[Q, P] = 0.0

            vp, vq = v[:, P].copy(), v[:, Q].copy()
            v[:, P] = vp * u_pp + vq * u_qp
            v[:, Q] = vp * u_pq + vq * u_qq
    else:
        if off_norm(a) > tol * scale:
            raise np.linalg.LinAlgError(
                f"Jacobi did not converge in {max_sweeps} sweeps (off-norm {off_norm(a):.3e})"
            )

    w = a.diagonal().real
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def eigh(a):
    """Hermitian eigendecomposition; Jacobi up to ``JACOBI_MAX_DIM``, LAPACK above."""
    a = np.asarray(a)
    if a.shape[0] <= JACOBI_MAX_DIM:
        return jacobi_eigh(a)
    w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
    return w, v
