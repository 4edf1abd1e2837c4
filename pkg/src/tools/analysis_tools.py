"""
Tools that read finished runs.
"""

from typing import Any, Dict, Sequence

from src.harness.reports import compare_runs, report_importance
from src.tools.base import BaseTool


class ReportImportanceTool(BaseTool):
    def get_name(self) -> str:
        return "report-importance"

    def execute(self, run_dir: str) -> Dict[str, Any]:
        return self._run(lambda: report_importance(run_dir))


class CompareTool(BaseTool):
    def get_name(self) -> str:
        return "compare"

    def execute(self, run_dirs: Sequence[str]) -> Dict[str, Any]:
        return self._run(lambda: compare_runs(list(run_dirs)))
