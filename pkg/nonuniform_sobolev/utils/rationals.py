"""
Разбор и форматирование точных рациональных чисел.

Принимаются строки вида "a/b", десятичные "0.3", "1e-3" и "inf".
Десятичная запись переводится в дробь точно (знаменатель - степень десяти).
"""
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import List, Optional, Union

from ..exceptions import ConfigError

RationalLike = Union[str, int, Fraction]

INFINITY_TOKENS = {"inf", "infinity", "∞", "+inf"}


def parse_rational(text: RationalLike, field: str = "value") -> Fraction:
    """
    Преобразует строку в Fraction без потери точности.

    Args:
        text: "a/b", целое или десятичная запись
        field: Имя поля для сообщения об ошибке

    Raises:
        ConfigError: Если строка не является рациональным числом
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    raw = str(text).strip()
    try:
        if "/" in raw:
            num, den = raw.split("/", 1)
            return Fraction(int(num.strip()), int(den.strip()))
        # Decimal хранит десятичную запись точно, в отличие от float
        return Fraction(Decimal(raw))
    except (ValueError, ZeroDivisionError, InvalidOperation):
        raise ConfigError(f"Invalid rational for {field}: {raw!r}", field=field)


def parse_exponent(text: RationalLike, field: str = "p") -> Optional[Fraction]:
    """Разбирает показатель Лебега; None означает ∞"""
    if isinstance(text, str) and text.strip().lower() in INFINITY_TOKENS:
        return None
    return parse_rational(text, field)


def parse_rational_list(text: str, field: str = "p") -> List[Optional[Fraction]]:
    """Разбирает список показателей через запятую: "4,2,2" или "4, 3/2" """
    items = [item for item in str(text).split(",") if item.strip()]
    if not items:
        raise ConfigError(f"Empty exponent list for {field}", field=field)
    return [parse_exponent(item, field) for item in items]


def format_rational(value: Optional[Fraction]) -> str:
    """Рендер "num/den" (или целого); None - бесконечность"""
    if value is None:
        return "inf"
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_with_decimal(value: Optional[Fraction]) -> str:
    """Рендер "num/den (≈decimal)" для вывода в консоль"""
    if value is None or value.denominator == 1:
        return format_rational(value)
    return f"{format_rational(value)} (≈{float(value):.6g})"
