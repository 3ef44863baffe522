"""Роуты API"""
