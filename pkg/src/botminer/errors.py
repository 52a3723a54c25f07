"""Exception types shared across the package."""


class BotminerError(Exception):
    """Base class for all package-specific errors."""


class MalformedRecordError(BotminerError):
    """A corpus line is not a usable tweet record."""


class EmptyCorpusError(BotminerError):
    """Ingestion finished with zero usable records."""


class ConfigError(BotminerError):
    """A configuration file or value is invalid."""


class PipelineStageError(BotminerError):
    """A pipeline stage failed; carries the stage name for diagnostics."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
