class ToolchainError(Exception):
    """Base class for user-facing errors (bad input, unsupported features).

    The CLI maps these to exit status 1; anything else is an internal error.
    """


class UnsupportedFeature(ToolchainError):
    def __init__(self, key, feature):
        where = f"{key}: " if key else ""
        super().__init__(f"{where}unsupported feature: {feature}")
        self.key = key
        self.feature = feature
