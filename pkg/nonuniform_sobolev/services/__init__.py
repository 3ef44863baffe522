"""Вычислительные сервисы"""
