from typing import Any

from pydantic import BaseModel


class ErrorResponse(BaseModel):
    code: int
    message: str
    details: Any | None = None
