from typing import Any, Dict, Optional

from fastapi import APIRouter, Body, Depends, Query, status
from sqlalchemy.orm import Session

from combigrad.api.common import as_http, build_csv_response
from combigrad.db import get_db
from combigrad.errors import CombigradError
from combigrad.harness import datasets
from combigrad.harness.audit import audit_labels
from combigrad.harness.experiments import run_experiment
from combigrad.harness.registry import list_runs, save_run
from combigrad.learn.config import load_config

router = APIRouter(prefix="/experiments", tags=["experiments"])


@router.post("/run", status_code=status.HTTP_201_CREATED)
def run(
    config: Dict[str, Any] = Body(..., description="Documento de configuración (acepta \"preset\": true)"),
    record: bool = Query(True, description="Guardar la corrida en run_records"),
    db: Session = Depends(get_db),
):
    """
    Corre un experimento completo de forma síncrona y devuelve su RunRecord.
    Pensado para configs chicas; las corridas largas van por la CLI.
    """
    try:
        cfg = load_config(config)
        result = run_experiment(cfg)
    except CombigradError as e:
        raise as_http(e)

    out = result.to_dict()
    if record:
        out["id"] = save_run(db, result)
    return out


@router.get("/runs")
def runs(
    family: Optional[str] = Query(None, pattern="^(sp|tsp|pm)$"),
    config_hash: Optional[str] = Query(None),
    limit: int = Query(100, ge=1, le=1000),
    include_history: bool = Query(False),
    format: str = Query(
        "json", pattern="^(json|csv)$", description="Formato de salida: json o csv"
    ),
    db: Session = Depends(get_db),
):
    """
    Corridas guardadas, más recientes primero.
    """
    rows = list_runs(db, family=family, config_hash=config_hash, limit=limit, include_history=include_history)

    if format == "csv":
        flat = []
        for r in rows:
            final = r["final"]
            flat.append(
                {
                    "id": r["id"],
                    "config_hash": r["config_hash"],
                    "family": r["family"],
                    "k": r["k"],
                    "seed": r["seed"],
                    "train_acc": final.get("train_acc"),
                    "test_acc": final.get("test_acc"),
                    "wall_time": r["wall_time"],
                    "created_at": r["created_at"],
                }
            )
        return build_csv_response(flat, "runs_export.csv")

    return {"count": len(rows), "items": rows}


@router.get("/audit")
def audit(
    family: str = Query(..., pattern="^(sp|tsp|pm)$"),
    k: int = Query(..., ge=2),
    size: int = Query(20, ge=1, le=1000),
    seed: int = Query(0),
    connectivity: int = Query(8),
    limit_issues: int = Query(50, ge=1, le=500),
):
    """
    Genera un dataset y revisa sus etiquetas.

    Invariantes revisadas:

    1) Cada etiqueta es factible.
    2) Su costo bajo los pesos ocultos iguala al del solver exacto.
    3) Su costo iguala al de la fuerza bruta, cuando Y es enumerable.
    """
    try:
        if family == "sp":
            ds = datasets.gen_sp(k, size, seed=seed, connectivity=connectivity)
        elif family == "tsp":
            ds = datasets.gen_tsp(k, size, seed=seed)
        else:
            ds = datasets.gen_pm(k, size, seed=seed)
        return audit_labels(ds, limit_issues=limit_issues)
    except CombigradError as e:
        raise as_http(e)
