from fastapi import APIRouter

from combigrad import settings
from combigrad.db import engine
from combigrad.learn.ops import OPS
from combigrad.solvers import FAMILIES, grid, matching, tsp

router = APIRouter(tags=["meta"])


@router.get("/info")
def get_meta_info():
    """
    Metadatos de la API, del entorno y de los límites de los solvers.
    Pensado para debugging / monitoreo.
    """
    return {
        "api_version": settings.API_VERSION,
        "environment": settings.APP_ENV,
        "git_commit": settings.GIT_COMMIT,
        "families": list(FAMILIES),
        "ops": list(OPS),
        "guards": {
            "sp_enumerate_max_k": grid.ENUMERATE_MAX_K,
            "tsp_exact_max_k": tsp.EXACT_MAX_K,
            "tsp_enumerate_max_k": tsp.ENUMERATE_MAX_K,
            "pm_exact_max_k": matching.EXACT_MAX_K,
            "pm_enumerate_max_k": matching.ENUMERATE_MAX_K,
            "oracle_budget": settings.ORACLE_BUDGET,
            "landscape_max_res": settings.LANDSCAPE_MAX_RES,
        },
        "database": {
            "driver": engine.url.get_backend_name(),
        },
    }
