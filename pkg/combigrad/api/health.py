from fastapi import APIRouter, Depends
from sqlalchemy import text
from sqlalchemy.orm import Session

from combigrad.db import get_db
from combigrad.solvers import InstanceSpec, build_solver

router = APIRouter(tags=["health"])

# Instancias mínimas con respuesta conocida, una por familia
SELF_CHECKS = {
    "sp": ({"family": "sp", "k": 2, "connectivity": 4}, [1.0, 100.0, 1.0, 1.0], [1, 0, 1, 1]),
    "tsp": ({"family": "tsp", "k": 4}, [1.0, 2**0.5, 1.0, 1.0, 2**0.5, 1.0], [1, 0, 1, 1, 0, 1]),
    "pm": ({"family": "pm", "k": 2}, [1.0, 1.0, 5.0, 5.0], [1, 1, 0, 0]),
}


@router.get("/health")
def health_check():
    """
    Liveness básico: solo indica que la app está levantada.
    """
    return {"status": "ok"}


@router.get("/health/full")
def health_full(db: Session = Depends(get_db)):
    """
    Readiness / health extendido:
    - Chequea conexión a la base de datos y la tabla de corridas.
    - Resuelve una instancia conocida por familia.
    """
    checks = {}

    # 1) Conexión a DB
    try:
        db.execute(text("SELECT 1"))
        checks["database"] = {"status": "ok"}
    except Exception as e:
        checks["database"] = {"status": "error", "detail": str(e)}

    try:
        db.execute(text("SELECT 1 FROM run_records LIMIT 1"))
        checks["run_records"] = {"status": "ok"}
    except Exception as e:
        checks["run_records"] = {"status": "error", "detail": str(e)}

    # 2) Solvers
    solver_results = []
    for family, (spec, weights, expected) in SELF_CHECKS.items():
        try:
            got = build_solver(InstanceSpec(**spec)).solve(weights).indicator.tolist()
            if got == expected:
                solver_results.append({"family": family, "status": "ok"})
            else:
                solver_results.append({"family": family, "status": "error", "detail": f"got {got}"})
        except Exception as e:
            solver_results.append({"family": family, "status": "error", "detail": str(e)})

    checks["solvers"] = solver_results

    # 3) Estado global
    if checks["database"]["status"] != "ok":
        status = "error"
    elif checks["run_records"]["status"] != "ok" or any(s["status"] != "ok" for s in solver_results):
        status = "degraded"
    else:
        status = "ok"

    return {
        "status": status,
        "checks": checks,
    }
