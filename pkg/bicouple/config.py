"""Конфигурация bicouple, решателя двухдоменной диффузии."""

import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

# Корень пакета
BASE_DIR = Path(__file__).parent

# Каталог пресетов (версионируются вместе с кодом)
PRESETS_DIR = BASE_DIR / "presets"

# Куда писать профили, журналы массы и сводки, если --out не задан
OUTPUT_DIR = Path(os.getenv("BICOUPLE_OUT", "runs"))

# Устойчивость явной схемы: ν = D·Δt/Δx² ≤ 1/2
CFL_LIMIT = 0.5
# Запас до границы устойчивости: Δt = 0.4·Δx²/max(D)
CFL_SAFETY_FRACTION = float(os.getenv("BICOUPLE_CFL_FRACTION", "0.4"))

# Защита знаменателя канального потока β + γu + δv
CHANNEL_EPS_DEN = 1e-30

# Аудит массы: по умолчанию каждые N шагов (плюс первый и последний)
DEFAULT_AUDIT_EVERY = int(os.getenv("BICOUPLE_AUDIT_EVERY", "1000"))

# Параллельный запуск связей пресета (1 = последовательно)
DEFAULT_JOBS = int(os.getenv("BICOUPLE_JOBS", "1"))

# CSV: 17 значащих цифр достаточно для побитового восстановления binary64
CSV_SIGNIFICANT_DIGITS = 17

# Версии формата артефактов
PIPELINE_VERSION = "0.1"
MANIFEST_VERSION = "1.0"
