"""Pydantic схемы запросов, ответов и отчетов"""
