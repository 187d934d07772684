"""Запуск пресетов и конфигураций, проверки допусков, артефакты."""
