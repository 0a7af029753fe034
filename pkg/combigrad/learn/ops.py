"""
Vocabulario fijo de ops diferenciables.

Cada op tiene un kernel numpy (forward/backward) y una envoltura sobre
Tensor. `blackbox_solve` es la capa del solver: su backward es el de
combigrad.core.
"""
from typing import Tuple

import numpy as np

from combigrad.core import Solution, SolverHandle, backward as blackbox_backward, forward as blackbox_forward
from combigrad.errors import InstanceError, NumericError
from combigrad.learn.tensor import Tensor
from combigrad.solvers import MatchingInstance

OPS = (
    "affine",
    "relu",
    "sphere_project",
    "pairwise_dist",
    "vertex_to_edge_cost",
    "blackbox_solve",
    "hamming_loss",
    "repellent_reg",
    "scale_shift",
)

# Norma mínima de una fila antes de proyectar a la esfera
SPHERE_MIN_NORM = 1e-12


# === affine ===


def affine_forward(x: np.ndarray, W: np.ndarray, b: np.ndarray) -> np.ndarray:
    return x @ W.T + b


def affine_backward(g: np.ndarray, x: np.ndarray, W: np.ndarray):
    dx = g @ W
    if x.ndim == 1:
        dW = np.outer(g, x)
        db = g
    else:
        dW = g.T @ x
        db = g.sum(axis=0)
    return dx, dW, db


def affine(x: Tensor, W: Tensor, b: Tensor) -> Tensor:
    """y = W x + b por fila de x (x: (d,) o (m, d); W: (out, d); b: (out,))."""
    if W.data.ndim != 2 or x.shape[-1] != W.shape[1] or b.shape != (W.shape[0],):
        raise InstanceError(
            "affine shape mismatch",
            x=list(x.shape),
            W=list(W.shape),
            b=list(b.shape),
        )
    xd, Wd = x.data, W.data
    return Tensor(
        affine_forward(xd, Wd, b.data),
        parents=(x, W, b),
        backward_fn=lambda g: affine_backward(g, xd, Wd),
        op="affine",
    )


# === elementales ===


def relu(x: Tensor) -> Tensor:
    mask = x.data > 0
    return Tensor(np.where(mask, x.data, 0.0), parents=(x,), backward_fn=lambda g: (g * mask,), op="relu")


def scale_shift(x: Tensor, scale: float, shift: float) -> Tensor:
    return Tensor(scale * x.data + shift, parents=(x,), backward_fn=lambda g: (g * scale,), op="scale_shift")


# === esfera y distancias ===


def sphere_project_forward(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    norms = np.linalg.norm(x, axis=1)
    small = np.flatnonzero(norms < SPHERE_MIN_NORM)
    if small.size:
        raise NumericError("cannot project a near-zero row onto the sphere", row=int(small[0]))
    return x / norms[:, None], norms


def sphere_project_backward(g: np.ndarray, u: np.ndarray, norms: np.ndarray) -> np.ndarray:
    """(I - u u^T) / |x| aplicado por fila."""
    radial = np.sum(g * u, axis=1, keepdims=True)
    return (g - radial * u) / norms[:, None]


def sphere_project(x: Tensor) -> Tensor:
    u, norms = sphere_project_forward(x.data)
    return Tensor(u, parents=(x,), backward_fn=lambda g: (sphere_project_backward(g, u, norms),), op="sphere_project")


def _pair_index(k: int):
    return np.triu_indices(k, 1)


def pairwise_dist_forward(x: np.ndarray) -> np.ndarray:
    iu, ju = _pair_index(x.shape[0])
    return np.linalg.norm(x[iu] - x[ju], axis=1)


def pairwise_dist_backward(g: np.ndarray, x: np.ndarray, d: np.ndarray) -> np.ndarray:
    iu, ju = _pair_index(x.shape[0])
    # subgradiente 0 en puntos coincidentes
    safe = np.where(d > 0, d, 1.0)
    coef = np.where(d > 0, g / safe, 0.0)
    contrib = coef[:, None] * (x[iu] - x[ju])
    dx = np.zeros_like(x)
    np.add.at(dx, iu, contrib)
    np.add.at(dx, ju, -contrib)
    return dx


def pairwise_dist(x: Tensor) -> Tensor:
    """Distancias en el layout de aristas de TSP (triángulo superior por filas)."""
    if x.data.ndim != 2 or x.shape[0] < 2:
        raise InstanceError("pairwise_dist expects a (k, dim) matrix with k >= 2", shape=list(x.shape))
    xd = x.data
    d = pairwise_dist_forward(xd)
    return Tensor(d, parents=(x,), backward_fn=lambda g: (pairwise_dist_backward(g, xd, d),), op="pairwise_dist")


# === lectura de dígitos ===


def vertex_to_edge_cost(v: Tensor, instance: MatchingInstance) -> Tensor:
    """Costo de arista = 10 * dígito izquierdo/superior + dígito derecho/inferior."""
    if v.data.size != instance.k * instance.k:
        raise InstanceError("digit tensor must have k*k entries", expected=instance.k * instance.k, received=v.data.size)
    M = instance.digit_reading_matrix()
    shape = v.shape
    return Tensor(
        M @ v.data.reshape(-1),
        parents=(v,),
        backward_fn=lambda g: ((M.T @ g).reshape(shape),),
        op="vertex_to_edge_cost",
    )


# === capa del solver ===


def blackbox_solve(w: Tensor, solver: SolverHandle, lam: float) -> Tuple[Tensor, Solution]:
    """
    Forward: y_hat = solve(project(w)). Backward: el gradiente de f_lambda
    (una llamada al solver). La proyección se trata como identidad.
    """
    shape = w.shape
    w_hat = solver.project(w.data.reshape(-1))
    y_hat, state = blackbox_forward(solver, w_hat, lam)
    out = Tensor(
        y_hat.indicator.astype(np.float64),
        parents=(w,),
        backward_fn=lambda g: (blackbox_backward(solver, state, g).reshape(shape),),
        op="blackbox_solve",
    )
    return out, y_hat


# === pérdidas ===


def hamming(y_pred: np.ndarray, y_true: np.ndarray) -> Tuple[float, np.ndarray]:
    """Pérdida sum |y - y*| y su gradiente en puntos binarios: +1 donde y*=0, -1 donde y*=1."""
    y_pred = np.asarray(y_pred, dtype=np.float64).reshape(-1)
    y_true = np.asarray(y_true, dtype=np.float64).reshape(-1)
    if y_pred.shape != y_true.shape:
        raise InstanceError("hamming loss needs equal lengths", pred=y_pred.shape[0], true=y_true.shape[0])
    loss = float(np.abs(y_pred - y_true).sum())
    grad = np.where(y_true == 0, 1.0, -1.0)
    return loss, grad


def hamming_loss(y_pred: Tensor, y_true) -> Tensor:
    loss, grad = hamming(y_pred.data, y_true)
    shape = y_pred.shape
    return Tensor(loss, parents=(y_pred,), backward_fn=lambda g: ((g * grad).reshape(shape),), op="hamming_loss")


def repellent(x: np.ndarray, c_k: float) -> Tuple[float, np.ndarray]:
    """L = C_k * media_{i != j} exp(-|x_i - x_j|) y su gradiente respecto de x."""
    k = x.shape[0]
    if k < 2:
        raise InstanceError("repellent term needs at least two points", k=k)
    d = pairwise_dist_forward(x)
    e = np.exp(-d)
    scale = 2.0 * c_k / (k * (k - 1))
    loss = scale * float(e.sum())
    grad = pairwise_dist_backward(-scale * e, x, d)
    return loss, grad


def repellent_reg(x: Tensor, c_k: float) -> Tensor:
    loss, grad = repellent(x.data, c_k)
    return Tensor(loss, parents=(x,), backward_fn=lambda g: (g * grad,), op="repellent_reg")
