"""
Кастомные исключения для приложения.
"""
from typing import Optional, Dict, Any


class SobolevError(Exception):
    """Базовое исключение для ошибок вычислений"""
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        self.message = message
        self.details = details or {}
        super().__init__(self.message)


class PreconditionError(SobolevError):
    """Нарушено предусловие операции"""
    def __init__(self, message: str, inequality: str = "", details: Optional[Dict[str, Any]] = None):
        self.inequality = inequality
        details = dict(details or {})
        if inequality:
            details.setdefault("inequality", inequality)
        super().__init__(message, details)


class UnsupportedDerivativeError(SobolevError):
    """Производная такого порядка не поддерживается семейством"""
    pass


class DomainError(SobolevError):
    """Точка или параметр вне допустимой области"""
    pass


class ConfigError(SobolevError):
    """Ошибка конфигурации запуска"""
    def __init__(self, message: str, field: str = "", details: Optional[Dict[str, Any]] = None):
        self.field = field
        details = dict(details or {})
        if field:
            details.setdefault("field", field)
        super().__init__(message, details)


class SerializationError(SobolevError):
    """Ошибка чтения/записи сериализованного поля"""
    pass
