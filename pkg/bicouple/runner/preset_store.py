"""Каталог пресетов.

Читает bicouple/presets/*.json. Предоставляет resolve_name() для поиска
пресета по имени или псевдониму без учёта регистра.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from pydantic import ValidationError

from ..config import PRESETS_DIR
from ..errors import ConfigError
from .run_config import Preset, format_validation_error, read_json_file


@dataclass
class PresetSummary:
    name: str
    description: str
    tier: str
    scheme: str
    couplings: list[str]
    n_steps: int
    aliases: list[str]


class PresetStore:
    """Чтение пресетов из файловой системы."""

    def __init__(self, presets_dir: str | Path = PRESETS_DIR):
        self.presets_dir = Path(presets_dir)

    def list_presets(self) -> list[PresetSummary]:
        result = []
        for path in sorted(self.presets_dir.glob("*.json")):
            preset = self._load(path)
            result.append(PresetSummary(
                name=preset.name,
                description=preset.description,
                tier=preset.tier,
                scheme=preset.config.scheme.value,
                couplings=[c.name for c in preset.config.couplings],
                n_steps=preset.config.n_steps,
                aliases=preset.aliases,
            ))
        return result

    def get_preset(self, name: str) -> Preset:
        resolved = self.resolve_name(name)
        if resolved is None:
            known = ", ".join(p.stem for p in sorted(self.presets_dir.glob("*.json")))
            raise ConfigError(f"пресет '{name}' не найден. Доступные: {known}")
        return self._load(self.presets_dir / f"{resolved}.json")

    def resolve_name(self, query: str) -> str | None:
        """Найти имя пресета по имени файла или псевдониму.

        Порядок поиска:
            1. Точное совпадение имени файла (case-insensitive)
            2. Точное совпадение псевдонима из поля aliases
            3. Все токены запроса содержатся в имени, и кандидат единственный
        """
        names = [p.stem for p in sorted(self.presets_dir.glob("*.json"))]
        query_lower = query.strip().lower()

        # 1. Точное имя
        for name in names:
            if name.lower() == query_lower:
                return name

        # 2. Псевдоним
        for name, aliases in self.aliases_map().items():
            if any(alias.lower() == query_lower for alias in aliases):
                return name

        # 3. Токены имени
        query_tokens = set(_tokenize(query_lower))
        candidates = [
            name for name in names
            if query_tokens and query_tokens.issubset(set(_tokenize(name.lower())))
        ]
        if len(candidates) == 1:
            return candidates[0]
        return None

    def aliases_map(self) -> dict[str, list[str]]:
        """Имя пресета → список псевдонимов (без полной проверки файла)."""
        result = {}
        for path in sorted(self.presets_dir.glob("*.json")):
            aliases = self._read_json(path).get("aliases", [])
            if aliases:
                result[path.stem] = [str(a) for a in aliases]
        return result

    def _load(self, path: Path) -> Preset:
        data = self._read_json(path)
        try:
            preset = Preset.model_validate(data)
        except ValidationError as exc:
            raise ConfigError(format_validation_error(exc, path.name)) from exc
        if preset.name != path.stem:
            raise ConfigError(f"{path.name}: имя пресета '{preset.name}' не совпадает с именем файла")
        return preset

    @staticmethod
    def _read_json(path: Path) -> dict:
        return read_json_file(path)


def dump_preset(preset: Preset) -> str:
    """Сериализовать пресет в JSON (для сравнения и повторного разбора)."""
    return json.dumps(preset.model_dump(mode="json"), ensure_ascii=False, indent=2)


def _tokenize(text: str) -> list[str]:
    """Разбить строку на значимые токены (слова длиннее 1 символа)."""
    return [t for t in re.split(r"[\s\-_,.()/]+", text) if len(t) > 1]
