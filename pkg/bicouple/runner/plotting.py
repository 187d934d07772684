"""Статический график конечных профилей (SVG)."""

from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")  # headless, до любого импорта pyplot
import matplotlib.pyplot as plt

# Одинаковые идентификаторы элементов SVG от запуска к запуску
matplotlib.rcParams["svg.hashsalt"] = "bicouple"


def plot_profiles(results: list, title: str) -> plt.Figure:
    """Наложить профили u и v всех связей на одну ось.

    results: список CouplingResult; узловой интерфейс даёт разрыв в x = 1/2.
    """
    fig, ax = plt.subplots(figsize=(10, 6))
    for res in results:
        x_left, x_right = res.final.grid.coordinates()
        line, = ax.plot(x_left, res.final.u, linewidth=1.2, label=res.name)
        ax.plot(x_right, res.final.v, linewidth=1.2, color=line.get_color())
    ax.axvline(0.5, color="gray", linewidth=0.6, linestyle="--")
    ax.set_title(title, fontsize=13, fontweight="bold")
    ax.set_xlabel("x")
    ax.set_ylabel("концентрация")
    ax.grid(True, linewidth=0.3)
    ax.legend(loc="upper right", fontsize=8)
    plt.tight_layout()
    return fig


def save_figure(fig: plt.Figure, path: str | Path, fmt: str = "svg") -> Path:
    """Сохранить фигуру и закрыть её. Вернуть путь."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format=fmt, bbox_inches="tight", facecolor="white", metadata={"Date": None})
    plt.close(fig)
    return path
