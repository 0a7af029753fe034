"""Adam con caídas programadas de learning rate."""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from combigrad.errors import InstanceError


def lr_for_epoch(base_lr: float, epoch: int, schedule: Sequence[int], divisor: float = 10.0) -> float:
    """Divide por `divisor` una vez por cada época del schedule ya alcanzada (épocas desde 0)."""
    drops = sum(1 for e in schedule if epoch >= e)
    return base_lr / divisor ** drops


@dataclass
class AdamState:
    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    schedule: List[int] = field(default_factory=list)
    divisor: float = 10.0
    step: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)

    def lr_at(self, epoch: int) -> float:
        return lr_for_epoch(self.lr, epoch, self.schedule, self.divisor)


def adam_step(
    params: Dict[str, np.ndarray],
    grads: Dict[str, np.ndarray],
    state: AdamState,
    lr: Optional[float] = None,
) -> None:
    """Actualiza `params` en el lugar. `lr` pisa el de `state` (para el schedule)."""
    lr = state.lr if lr is None else lr
    state.step += 1
    bc1 = 1.0 - state.beta1 ** state.step
    bc2 = 1.0 - state.beta2 ** state.step

    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape:
            raise InstanceError("gradient shape does not match parameter", param=name)
        if name not in state.m:
            state.m[name] = np.zeros_like(p)
            state.v[name] = np.zeros_like(p)
        m, v = state.m[name], state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        p -= lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
