import csv
import io
from typing import Any, Dict, List

from fastapi import HTTPException
from fastapi.responses import Response

from combigrad.errors import CombigradError


def as_http(exc: CombigradError) -> HTTPException:
    """Error de dominio -> HTTPException con el cuerpo {"code", "message", ...}."""
    return HTTPException(status_code=exc.http_status, detail=exc.to_detail())


def csv_attachment(content: str, filename: str) -> Response:
    return Response(
        content=content,
        media_type="text/csv",
        headers={"Content-Disposition": f'attachment; filename="{filename}"'},
    )


def build_csv_response(rows: List[Dict[str, Any]], filename: str) -> Response:
    """
    Convierte una lista de dicts en CSV (texto) y devuelve un Response.
    """
    buf = io.StringIO()

    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)

    content = buf.getvalue()
    buf.close()
    return csv_attachment(content, filename)
