"""Exception hierarchy.

Every error carries a short ``code`` that the CLI prints verbatim so that
shell callers can match on it.
"""


class SerialCorrError(Exception):
    code = "ERROR"


class DimensionError(SerialCorrError, ValueError):
    code = "DIMENSION_ERROR"


class SingularDesign(SerialCorrError):
    code = "SINGULAR_DESIGN"


class LagOutOfRange(SerialCorrError, ValueError):
    code = "LAG_OUT_OF_RANGE"


class DegenerateResiduals(SerialCorrError):
    code = "DEGENERATE_RESIDUALS"


class NonpositiveVariance(SerialCorrError):
    code = "NONPOSITIVE_VARIANCE"


class ZeroLeverageComplement(SerialCorrError):
    code = "ZERO_LEVERAGE_COMPLEMENT"


class NonstationaryParameters(SerialCorrError, ValueError):
    code = "NONSTATIONARY_PARAMETERS"


class ParseError(SerialCorrError):
    code = "PARSE_ERROR"


class ConfigError(SerialCorrError):
    def __init__(self, message, index=None):
        super().__init__(message if index is None else f"entry {index}: {message}")
        self.index = index

    code = "CONFIG_ERROR"
