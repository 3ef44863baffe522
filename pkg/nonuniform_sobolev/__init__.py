"""
Набор инструментов для неоднородных пространств Соболева.

Точные решающие процедуры на рациональных показателях и численная
проверка норм, неравенств и эволюционных экспериментов.
"""

__version__ = "1.0.0"
