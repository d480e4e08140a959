from datetime import datetime
from typing import Generic, Optional, TypeVar
from uuid import UUID, uuid4

from pydantic import BaseModel, Field

T = TypeVar("T")


class ResponseParams(BaseModel):
    status: str
    msgid: UUID = Field(default_factory=uuid4)
    resmsgid: UUID = Field(default_factory=uuid4)
    errmsg: Optional[str] = None


class BaseResponse(BaseModel, Generic[T]):
    id: str
    ver: str = "v1"
    ts: datetime = Field(default_factory=datetime.now)
    params: ResponseParams
    responseCode: str
    result: Optional[T] = None
