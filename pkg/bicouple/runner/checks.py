"""Вердикты по допускам пресета.

Каждая проверка сравнивает наблюдаемую величину (дрейф массы, C̄ в начале
или в конце, приращение массы поддомена, разрыв значений на интерфейсе,
отношение дрейфов) с expected ± tolerance и/или с границами [lower, upper].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .run_config import CheckSpec


@dataclass
class CheckResult:
    spec: CheckSpec
    observed: float
    passed: bool
    message: str


@dataclass
class CheckReport:
    results: list[CheckResult] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failed(self) -> list[CheckResult]:
        return [r for r in self.results if not r.passed]

    def lines(self) -> list[str]:
        out = []
        for r in self.results:
            mark = "OK  " if r.passed else "FAIL"
            out.append(f"{mark} {r.message}")
        return out


def _observe(spec: CheckSpec, results: dict) -> float:
    a = results[spec.coupling]
    if spec.kind == "abs_drift":
        return a.drift.abs_drift
    if spec.kind == "initial_cbar":
        return a.ledger.entries[0].cbar
    if spec.kind == "final_cbar":
        return a.ledger.entries[-1].cbar
    if spec.kind == "left_delta":
        return a.side_delta[0]
    if spec.kind == "right_delta":
        return a.side_delta[1]
    b = results[spec.other]
    if spec.kind == "interface_gap":
        return abs(float(a.final.u[-1]) - float(b.final.u[-1]))
    # drift_ratio
    denominator = b.drift.abs_drift
    if denominator == 0.0:
        return math.inf if a.drift.abs_drift > 0.0 else math.nan
    return a.drift.abs_drift / denominator


def evaluate_check(spec: CheckSpec, results: dict) -> CheckResult:
    """Проверить одну величину; results: словарь имя связи → CouplingResult."""
    label = spec.kind + f"[{spec.coupling}" + (f" / {spec.other}]" if spec.other else "]")
    missing = [n for n in (spec.coupling, spec.other) if n is not None and n not in results]
    if missing:
        return CheckResult(spec, math.nan, False, f"{label}: нет результата для {', '.join(missing)}")

    observed = _observe(spec, results)
    passed = not math.isnan(observed)
    parts = [f"{label} = {observed:.16g}"]
    if spec.expected is not None:
        ok = abs(observed - spec.expected) <= spec.tolerance
        passed = passed and ok
        parts.append(f"ожидалось {spec.expected:.16g} ± {spec.tolerance:.3g}")
    if spec.lower is not None:
        passed = passed and observed >= spec.lower
        parts.append(f"≥ {spec.lower:.3g}")
    if spec.upper is not None:
        passed = passed and observed <= spec.upper
        parts.append(f"≤ {spec.upper:.3g}")
    if spec.note:
        parts.append(f"({spec.note})")
    return CheckResult(spec=spec, observed=observed, passed=passed, message=", ".join(parts))


def compute_checks(specs: list[CheckSpec], results: dict) -> CheckReport:
    report = CheckReport()
    for spec in specs:
        report.results.append(evaluate_check(spec, results))
    if not specs:
        report.warnings.append("у запуска нет проверок: вердикт всегда положительный")
    return report
