"""Registro de corridas en la base (SQL plano con text())."""
import json
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

from sqlalchemy import text
from sqlalchemy.orm import Session

from combigrad.harness.experiments import RunRecord


def save_run(db: Session, record: RunRecord) -> int:
    result = db.execute(
        text(
            """
            INSERT INTO run_records
              (config_hash, family, k, seed, final_json, history_json, wall_time, created_at)
            VALUES
              (:config_hash, :family, :k, :seed, :final_json, :history_json, :wall_time, :created_at)
            """
        ),
        {
            "config_hash": record.config_hash,
            "family": record.family,
            "k": record.k,
            "seed": record.seed,
            "final_json": json.dumps(record.final),
            "history_json": json.dumps(record.history),
            "wall_time": record.wall_time,
            "created_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        },
    )
    db.commit()
    return int(result.lastrowid)


def list_runs(
    db: Session,
    family: Optional[str] = None,
    config_hash: Optional[str] = None,
    limit: int = 100,
    include_history: bool = False,
) -> List[Dict[str, Any]]:
    base = """
        SELECT id, config_hash, family, k, seed, final_json, history_json, wall_time, created_at
        FROM run_records
        WHERE 1 = 1
    """
    params: Dict[str, Any] = {"limit": limit}
    if family is not None:
        base += " AND family = :family"
        params["family"] = family
    if config_hash is not None:
        base += " AND config_hash = :config_hash"
        params["config_hash"] = config_hash
    base += " ORDER BY id DESC LIMIT :limit"

    out = []
    for row in db.execute(text(base), params).mappings().all():
        r = dict(row)
        r["final"] = json.loads(r.pop("final_json"))
        history = json.loads(r.pop("history_json"))
        if include_history:
            r["history"] = history
        out.append(r)
    return out
