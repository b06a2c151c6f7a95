"""Exception types raised by the library."""


class ValidationError(ValueError):
    """Invalid input data. ``field`` names the offending input."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class GridSizeError(ValueError):
    def __init__(self, size, limit):
        super().__init__(f"product grid has nm={size} types, limit is {limit}")
        self.size = size
        self.limit = limit


class DegeneratePivotError(ArithmeticError):
    def __init__(self, row, col, value):
        super().__init__(f"pivot element {value:.3e} at row {row}, column {col} is numerically zero")
        self.row = row
        self.col = col
        self.value = value


class DegenerateInstanceError(ValueError):
    """Raised when a bound needs r2 > 0 but the weaker item has zero revenue."""


class DomainError(ValueError):
    pass
