# core/observability.py
import logging
import sys
import traceback
from typing import Optional

from langfuse import Langfuse

from config.settings import settings

LOGGER_NAMES = ("collective_top", "core", "utils")


class ObservabilityManager:
    """Logging for the library and the CLI, with optional Langfuse tracing of experiment runs"""

    def __init__(self):
        self.langfuse: Optional[Langfuse] = None
        self.logger = self._setup_logging()
        self._initialize_langfuse()
        self._log_startup()

    def _setup_logging(self) -> logging.Logger:
        """Attach one pipe-separated stderr handler to the package loggers"""
        formatter = logging.Formatter(
            '%(asctime)s | %(levelname)-8s | %(name)-24s | %(funcName)-20s | %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )
        level = getattr(logging, settings.LOG_LEVEL, logging.INFO)

        # stdout carries CLI output only; diagnostics go to stderr
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(formatter)
        handler.setLevel(level)

        for name in LOGGER_NAMES:
            package_logger = logging.getLogger(name)
            package_logger.setLevel(level)
            package_logger.handlers.clear()
            package_logger.addHandler(handler)
            package_logger.propagate = False

        return logging.getLogger("collective_top")

    def _log_startup(self):
        self.logger.debug("=" * 80)
        self.logger.debug("🚀 COLLECTIVE HEAVY TOP STARTING")
        self.logger.debug(f"Environment: {settings.APP_ENV}")
        self.logger.debug(f"Log Level: {settings.LOG_LEVEL}")
        self.logger.debug(f"Debug Mode: {settings.DEBUG}")
        self.logger.debug(f"Newton: tol={settings.NEWTON_TOL:g} max_iter={settings.NEWTON_MAX_ITER}")
        self.logger.debug(f"Langfuse: {'configured' if self.langfuse else 'not configured'}")
        self.logger.debug("=" * 80)

    def _initialize_langfuse(self):
        if settings.LANGFUSE_PUBLIC_KEY and settings.LANGFUSE_SECRET_KEY:
            try:
                self.langfuse = Langfuse(
                    public_key=settings.LANGFUSE_PUBLIC_KEY,
                    secret_key=settings.LANGFUSE_SECRET_KEY,
                    host=settings.LANGFUSE_HOST
                )
                self.logger.info("✅ Langfuse initialized successfully")
            except Exception as e:
                self.logger.error(f"❌ Failed to initialize Langfuse: {str(e)}")
        else:
            self.logger.debug("ℹ️ Langfuse not configured - tracing disabled")

    def update_current_observation(self, **kwargs):
        """Attach metadata to the span opened by @observe"""
        if self.langfuse:
            try:
                self.langfuse.update_current_span(**kwargs)
            except Exception as e:
                self.logger.error(f"Failed to update current observation: {str(e)}")

    def flush_traces(self):
        if self.langfuse:
            try:
                self.langfuse.flush()
                self.logger.debug("✅ Flushed traces to Langfuse")
            except Exception as e:
                self.logger.error(f"❌ Failed to flush traces: {str(e)}")

    @staticmethod
    def _with_context(message: str, kwargs: dict) -> str:
        if not kwargs:
            return message
        context = " | ".join(f"{k}={v}" for k, v in kwargs.items())
        return f"{message} | {context}"

    def log_info(self, message: str, **kwargs):
        self.logger.info(self._with_context(message, kwargs))

    def log_error(self, message: str, **kwargs):
        self.logger.error(self._with_context(message, kwargs))

    def log_warning(self, message: str, **kwargs):
        self.logger.warning(self._with_context(message, kwargs))

    def log_debug(self, message: str, **kwargs):
        self.logger.debug(self._with_context(message, kwargs))

    def log_performance(self, operation: str, duration: float, **kwargs):
        self.logger.info(self._with_context(f"⏱️ PERFORMANCE | {operation} | duration={duration:.3f}s", kwargs))

    def log_exception(self, exception: Exception, context: Optional[str] = None):
        """Log an exception; the traceback follows at debug level when DEBUG is set"""
        prefix = f"💥 EXCEPTION | {context} | " if context else "💥 EXCEPTION | "
        self.logger.error(f"{prefix}{type(exception).__name__}: {str(exception)}")
        if settings.DEBUG:
            self.logger.debug(f"Full traceback:\n{traceback.format_exc()}")

    def log_workflow_step(self, workflow: str, step: str, status: str, **kwargs):
        status_emoji = {"start": "🔄", "success": "✅", "error": "❌", "warning": "⚠️"}.get(status, "ℹ️")
        message = f"{status_emoji} WORKFLOW | {workflow} | {step} | {status}"
        if status == "error":
            self.logger.error(self._with_context(message, kwargs))
        else:
            self.logger.info(self._with_context(message, kwargs))


# Global observability manager
observability = ObservabilityManager()
