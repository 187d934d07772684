"""bicouple — решатель двухдоменной одномерной диффузии с условиями связи на интерфейсе."""

from .config import PIPELINE_VERSION as __version__
