class RidgelineError(Exception):
    exit_code = 3


class ConfigError(RidgelineError):
    """Bad command line or configuration file."""

    exit_code = 1


class DataError(RidgelineError):
    """Input data missing, unreadable or malformed."""

    exit_code = 2
