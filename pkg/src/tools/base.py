"""
Base tool interface for the command tools.
"""

import logging
from abc import ABC, abstractmethod
from typing import Any, Callable, Dict

from src.utils.errors import NonFiniteError, TrainingDivergedError

logger = logging.getLogger(__name__)


class BaseTool(ABC):
    """Base class for all command tools."""

    @abstractmethod
    def execute(self, **kwargs) -> Dict[str, Any]:
        """
        Execute the tool.

        Returns:
            Dictionary with 'success' (bool) and 'data' or 'error' keys
        """
        pass

    @abstractmethod
    def get_name(self) -> str:
        """Get the name of the tool."""
        pass

    def _run(self, action: Callable[[], Any]) -> Dict[str, Any]:
        """Call action and turn its result or exception into a tool result."""
        try:
            return {"success": True, "data": action()}
        except TrainingDivergedError as e:
            logger.error("%s: training diverged: %s", self.get_name(), e)
            return {"success": False, "error": str(e), "error_type": "diverged", "diagnostics": e.diagnostics}
        except NonFiniteError as e:
            return {"success": False, "error": str(e), "error_type": "non_finite"}
        except FileNotFoundError as e:
            return {"success": False, "error": f"File not found: {e.filename}", "error_type": "not_found"}
        except ValueError as e:
            return {"success": False, "error": str(e), "error_type": "invalid_input"}
        except Exception as e:
            logger.exception("%s failed", self.get_name())
            return {"success": False, "error": f"Unexpected error: {str(e)}", "error_type": type(e).__name__}
