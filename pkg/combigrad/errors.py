from typing import Any, Dict


class CombigradError(Exception):
    """
    Error base del dominio.

    `to_detail()` devuelve el mismo formato que usan los routers en el
    campo `detail` de HTTPException: {"code", "message", ...contexto}.
    """

    code = "COMBIGRAD_ERROR"
    http_status = 400

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context = context

    def to_detail(self) -> Dict[str, Any]:
        return {"code": self.code, "message": self.message, **self.context}


class InstanceError(CombigradError):
    code = "INSTANCE_ERROR"


class InputError(CombigradError):
    code = "INPUT_ERROR"
    http_status = 422


class CapacityError(CombigradError):
    code = "CAPACITY_EXCEEDED"
    http_status = 413


class NumericError(CombigradError):
    code = "NUMERIC_ERROR"


class ConfigError(CombigradError):
    code = "INVALID_CONFIG"
    http_status = 422


class DivergenceError(CombigradError):
    code = "DIVERGENCE"


class NoInformativeLambda(CombigradError):
    code = "NO_INFORMATIVE_LAMBDA"


class AuditError(CombigradError):
    code = "AUDIT_FAILED"
