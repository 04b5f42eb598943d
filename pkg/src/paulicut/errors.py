"""Error taxonomy shared across the package.

The CLI maps these onto exit codes: contract violations (including
resource caps) exit 2, data problems exit 3.
"""


class ContractError(ValueError):
    """A caller violated an operation's precondition."""


class ResourceError(ContractError):
    """A size or budget cap would be exceeded."""


class DataError(ValueError):
    """Input data is malformed, insufficient, or degenerate."""
