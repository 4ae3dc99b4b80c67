"""Training objectives of the neural estimators.

The deep-feature objective is the trace loss

    L(Psi) = Tr(G (I - Psi S^-1 Psi^T)),   S = Psi^T Psi + ridge * I,

whose gradient is  dL/dPsi = -2 (I - Psi S^-1 Psi^T) G Psi S^-1.
The neural-kernel objective is the mean over rows of
f_i^T K_M f_i - 2 f_i^T b_i, with gradient 2 (K_M f_i - b_i) per row.
"""
import numpy as np

from ccme.kernels import factorize


def trace_loss(G, Psi, ridge):
    factor = factorize(Psi.T @ Psi, ridge)
    G_Psi = G @ Psi
    S_inv_PsiT = factor.solve(Psi.T)

    loss = np.trace(G) - np.sum(S_inv_PsiT.T * G_Psi)
    residual = G_Psi - Psi @ (S_inv_PsiT @ G_Psi)
    grad = -2.0 * factor.solve(residual.T).T
    return float(loss), grad


def trace_objective(G, lam):
    """Row-averaged trace loss on the principal submatrix of ``G``."""
    def objective(outputs, rows):
        n_rows = len(rows)
        loss, grad = trace_loss(G[np.ix_(rows, rows)], outputs, n_rows * lam)
        return loss / n_rows, grad / n_rows
    return objective


def nk_loss(F, B, K_M):
    """Mean of ``F_i K_M F_i - 2 F_i . B_i`` over rows, and its gradient."""
    FK = F @ K_M
    loss = np.mean(np.sum(FK * F, axis=1) - 2.0 * np.sum(F * B, axis=1))
    grad = 2.0 * (FK - B) / len(F)
    return float(loss), grad


def nk_objective(B, K_M):
    def objective(outputs, rows):
        return nk_loss(outputs, B[rows], K_M)
    return objective
