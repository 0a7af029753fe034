"""
Tensor con cinta reversa mínima.

Cada op crea un Tensor nuevo con sus padres y una función que, dado el
gradiente de la salida, devuelve el gradiente de cada padre (o None).
Sólo las hojas con requires_grad guardan `.grad`.
"""
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from combigrad.errors import InputError, NumericError

BackwardFn = Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]


class Tensor:
    def __init__(
        self,
        data,
        requires_grad: bool = False,
        parents: Sequence["Tensor"] = (),
        backward_fn: Optional[BackwardFn] = None,
        op: str = "leaf",
    ):
        arr = np.array(data, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise NumericError(f"non-finite values produced by {op}", op=op)
        self.data = arr
        self.op = op
        self._parents = tuple(parents)
        self._backward_fn = backward_fn
        self.requires_grad = bool(requires_grad) or any(p.requires_grad for p in self._parents)
        self.grad = np.zeros_like(arr) if (requires_grad and not self._parents) else None

    def __repr__(self) -> str:
        return f"Tensor(op={self.op}, shape={self.shape}, requires_grad={self.requires_grad})"

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def is_leaf(self) -> bool:
        return not self._parents

    def item(self) -> float:
        return float(self.data)

    def zero_grad(self) -> None:
        if self.grad is not None:
            self.grad.fill(0.0)

    def _topo_order(self):
        order, seen = [], set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen or not node.requires_grad:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                stack.append((p, False))
        return order

    def backward(self, grad=None) -> None:
        """
        Propaga hacia atrás y acumula en `.grad` de las hojas. Sin `grad`
        sólo vale para escalares (semilla 1). Acumula: llamar a backward
        sobre varias pérdidas suma sus gradientes.
        """
        if not self.requires_grad:
            return
        if grad is None:
            if self.data.size != 1:
                raise InputError("backward needs an explicit gradient for non-scalar tensors", shape=list(self.shape))
            seed = np.ones_like(self.data)
        else:
            seed = np.broadcast_to(np.asarray(grad, dtype=np.float64), self.shape).copy()

        grads = {id(self): seed}
        for node in reversed(self._topo_order()):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if node.is_leaf:
                if node.grad is not None:
                    node.grad += g
                continue
            for parent, pg in zip(node._parents, node._backward_fn(g)):
                if pg is None or not parent.requires_grad:
                    continue
                key = id(parent)
                grads[key] = grads[key] + pg if key in grads else pg


def parameter(data) -> Tensor:
    return Tensor(data, requires_grad=True)


def constant(data) -> Tensor:
    return Tensor(data, requires_grad=False, op="const")
