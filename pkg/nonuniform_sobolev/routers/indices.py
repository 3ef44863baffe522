"""
Роуты точного исчисления показателей.

Операции дешевые и детерминированные, выполняются прямо в обработчике.
"""
import logging
from typing import Optional

from fastapi import APIRouter

from ..schemas.indices import INDEX_OPERATIONS, IndexRequest, IndexResult
from ..services.index_commands import run_index_operation

logger = logging.getLogger(__name__)

router = APIRouter()


@router.get("")
async def list_operations():
    """Список доступных операций"""
    return {"operations": list(INDEX_OPERATIONS)}


@router.post("/{operation}", response_model=IndexResult)
async def index_operation(operation: str, request: Optional[IndexRequest] = None):
    """
    Выполнить операцию над рациональными показателями.

    Нарушенное предусловие возвращает 400 с нарушенным неравенством в details.
    """
    result = run_index_operation(operation, request or IndexRequest())
    logger.info(f"indices/{operation}: {result.text}")
    return result
