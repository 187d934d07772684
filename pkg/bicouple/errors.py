"""Иерархия исключений bicouple.

Коды выхода CLI привязаны к классам:
    ConfigError           → 2
    FluxSingularity,
    BlowUpError           → 3
"""

from __future__ import annotations


class BicoupleError(Exception):
    """Базовое исключение пакета."""


class ConfigError(BicoupleError, ValueError):
    """Некорректная или противоречивая конфигурация."""


class CFLViolation(ConfigError):
    """ν > 1/2 без явного разрешения."""


class LayoutMismatch(ConfigError):
    """Состояние и операция относятся к разным раскладкам сетки."""


class FluxSingularity(BicoupleError, ArithmeticError):
    """Поток на интерфейсе не определён (вырожденный знаменатель)."""


class BlowUpError(BicoupleError, ArithmeticError):
    """В решении появились NaN/Inf."""

    def __init__(self, step: int, message: str | None = None):
        self.step = step
        super().__init__(message or f"решение разрушилось на шаге {step}")
