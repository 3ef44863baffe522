"""
Структурированное логирование численных экспериментов и проверок.

Единый формат для всех прогонов:
- маркеры начала/конца прогона
- прогресс по строкам отчета
- результат каждой проверки
"""
import logging
from typing import Optional, Dict, Any
from datetime import datetime


class ExperimentLogger:
    """Логгер одного прогона эксперимента или набора проверок"""

    def __init__(self, run_name: str, subject: str):
        """
        Args:
            run_name: Имя прогона (например, "heat_energy")
            subject: Объект эксперимента (например, "gaussian N=1")
        """
        self.run_name = run_name
        self.subject = subject
        self.logger = logging.getLogger(f"nonuniform_sobolev.run.{run_name}")
        self.start_time: Optional[datetime] = None
        self.rows = 0
        self.passed = 0
        self.failed = 0
        self.skipped = 0

    def start(self, config: Optional[Dict[str, Any]] = None):
        """Логирует начало прогона"""
        self.start_time = datetime.now()
        self.logger.info("=" * 80)
        self.logger.info(f"[{self.run_name}] 🚀 Starting run")
        self.logger.info(f"[{self.run_name}] Subject: {self.subject}")
        self.logger.info("=" * 80)
        if config:
            self.logger.info(f"[{self.run_name}] Configuration:")
            for key, value in config.items():
                self.logger.info(f"[{self.run_name}]   {key}: {value}")

    def row_progress(self, index: int, total: int, **metrics: Any):
        """Логирует вычисленную строку отчета"""
        self.rows += 1
        rendered = ", ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in metrics.items())
        self.logger.debug(f"[{self.run_name}] 📦 Row {index + 1}/{total}: {rendered}")

    def check_result(self, name: str, status: str, notes: str = ""):
        """Логирует итог одной проверки"""
        if status == "pass":
            self.passed += 1
            self.logger.info(f"[{self.run_name}] ✓ {name}")
        elif status == "skip":
            self.skipped += 1
            self.logger.info(f"[{self.run_name}] ⚠️  {name} skipped: {notes}")
        else:
            self.failed += 1
            self.logger.warning(f"[{self.run_name}] ✗ {name} failed: {notes}")

    def warning(self, message: str):
        """Логирует предупреждение, не прерывающее прогон"""
        self.logger.warning(f"[{self.run_name}] ⚠️  {message}")

    def finish(self, success: bool = True, error: Optional[Exception] = None):
        """Логирует завершение прогона"""
        duration = (datetime.now() - self.start_time).total_seconds() if self.start_time else 0
        summary = (
            f"rows={self.rows}, passed={self.passed}, failed={self.failed}, "
            f"skipped={self.skipped}, duration={duration:.1f}s"
        )
        self.logger.info("=" * 80)
        if success:
            self.logger.info(f"[{self.run_name}] ✅ Completed successfully ({summary})")
        else:
            self.logger.error(f"[{self.run_name}] ❌ Failed ({summary})")
            if error:
                self.logger.error(f"[{self.run_name}] Error: {error}", exc_info=True)
        self.logger.info("=" * 80)
