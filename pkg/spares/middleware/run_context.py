# spares/middleware/run_context.py

import uuid
import logging
from contextvars import ContextVar
from typing import Callable, Optional

logger = logging.getLogger(__name__)

_run_id: ContextVar[Optional[str]] = ContextVar("run_id", default=None)

def current_run_id() -> Optional[str]:
    """
    Returns the run ID of the command being executed, if any.
    """
    return _run_id.get()

class RunIDLogFilter(logging.Filter):
    """
    Attaches the current run ID to every log record so the formatter can print it.
    """
    def filter(self, record: logging.LogRecord) -> bool:
        record.run_id = _run_id.get() or "-"
        return True

class RunIDMiddleware:
    """
    Wraps a CLI command handler: generates a unique run ID per invocation,
    makes it available to logs and reports, and logs entry and exit.
    """
    def __init__(self, handler: Callable[..., int], name: str,
                 error_handler: Optional[Callable[[Exception], int]] = None):
        self.handler = handler
        self.name = name
        self.error_handler = error_handler
        logger.debug(f"RunIDMiddleware initialized for '{name}'.")

    def __call__(self, *args, **kwargs) -> int:
        run_id = str(uuid.uuid4())
        token = _run_id.set(run_id)
        logger.info(f"Incoming command: {self.name} - Run ID: {run_id}")
        try:
            try:
                exit_code = self.handler(*args, **kwargs)
            except Exception as exc:
                if self.error_handler is None:
                    raise
                # Handlers run while the run ID is still bound
                exit_code = self.error_handler(exc)
            logger.info(f"Outgoing result: exit {exit_code} - Run ID: {run_id}")
            return exit_code
        finally:
            _run_id.reset(token)
