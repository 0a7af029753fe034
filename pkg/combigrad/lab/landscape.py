"""
Paisajes 2D de f_lambda sobre un corte afín del espacio de pesos,
exportables a CSV o JSON para graficar afuera.
"""
import csv
import io
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from combigrad import settings
from combigrad.core import SolverHandle, check_lambda
from combigrad.errors import CapacityError, InputError, InstanceError
from combigrad.lab.interpolation import EQ_TOL, evaluate_many
from combigrad.lab.problems import Linearization

logger = logging.getLogger(__name__)

CSV_HEADER = ["u_index", "v_index", "f_lambda", "f_piecewise"]


@dataclass
class LandscapeGrid:
    origin: np.ndarray
    axis_u: np.ndarray
    axis_v: np.ndarray
    extent: Tuple[float, float, float, float]
    lam: float
    values: np.ndarray
    piecewise: np.ndarray

    @property
    def resolution(self) -> Tuple[int, int]:
        return tuple(self.values.shape)

    def diff_fraction(self, tol: float = EQ_TOL) -> float:
        """Fracción del corte donde f_lambda se separa de f(y(w))."""
        return float(np.mean(np.abs(self.values - self.piecewise) > tol))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(CSV_HEADER)
        nu, nv = self.values.shape
        for i in range(nu):
            for j in range(nv):
                writer.writerow([i, j, repr(float(self.values[i, j])), repr(float(self.piecewise[i, j]))])
        return buf.getvalue()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "origin": self.origin.tolist(),
            "axis_u": self.axis_u.tolist(),
            "axis_v": self.axis_v.tolist(),
            "extent": list(self.extent),
            "lambda": self.lam,
            "resolution": list(self.resolution),
            "diff_fraction": self.diff_fraction(),
            "f_lambda": self.values.tolist(),
            "f_piecewise": self.piecewise.tolist(),
        }


def render_landscape(
    solver: SolverHandle,
    lin: Linearization,
    slice_axes: Tuple[Any, Any, Any],
    lam: float,
    resolution: Any,
    extent: Tuple[float, float, float, float] = (-1.0, 1.0, -1.0, 1.0),
    max_res: Optional[int] = None,
) -> LandscapeGrid:
    """
    Evalúa f_lambda y f(y(w)) en w = origin + a*u + b*v, con (a, b) en una
    grilla uniforme sobre `extent`. `resolution` es un entero o (nu, nv).
    """
    lam = check_lambda(lam)
    max_res = settings.LANDSCAPE_MAX_RES if max_res is None else max_res
    nu, nv = (resolution, resolution) if np.isscalar(resolution) else tuple(resolution)
    nu, nv = int(nu), int(nv)
    if nu < 2 or nv < 2:
        raise InputError("landscape resolution must be at least 2 per axis", resolution=[nu, nv])
    if nu > max_res or nv > max_res:
        raise CapacityError("landscape resolution exceeds the budget", resolution=[nu, nv], max_res=max_res)

    origin, u, v = (np.asarray(a, dtype=np.float64).reshape(-1) for a in slice_axes)
    if not (origin.shape == u.shape == v.shape == (solver.size,)):
        raise InstanceError("slice vectors must match the instance size", expected=solver.size)

    a = np.linspace(extent[0], extent[1], nu)
    b = np.linspace(extent[2], extent[3], nv)
    A, B = np.meshgrid(a, b, indexing="ij")
    W = origin[None, :] + A.reshape(-1, 1) * u[None, :] + B.reshape(-1, 1) * v[None, :]

    values, Y, _ = evaluate_many(solver, lin, W, lam)
    piecewise = lin.many(Y)
    logger.info("rendered %dx%d landscape at lambda=%g", nu, nv, lam)
    return LandscapeGrid(
        origin=origin,
        axis_u=u,
        axis_v=v,
        extent=tuple(float(x) for x in extent),
        lam=lam,
        values=values.reshape(nu, nv),
        piecewise=piecewise.reshape(nu, nv),
    )
