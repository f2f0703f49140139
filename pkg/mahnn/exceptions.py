from django.core.exceptions import ImproperlyConfigured


class MahnnError(Exception):
    """Base class for every error raised by the engine"""


class DimensionError(MahnnError, ValueError):

    def __init__(self, operation, *shapes):
        self.operation = operation
        self.shapes = shapes
        described = ' vs '.join(str(tuple(shape)) for shape in shapes)
        super().__init__(f'{operation}: incompatible shapes {described}')


class NumericError(MahnnError, ArithmeticError):
    pass


class ContractError(MahnnError):
    pass


class ConfigError(MahnnError, ImproperlyConfigured):
    """Invalid configuration, carries every violation found"""

    def __init__(self, messages):
        if isinstance(messages, str):
            messages = [messages]
        self.messages = list(messages)
        super().__init__('; '.join(self.messages))


class ParseError(MahnnError, ValueError):

    def __init__(self, message, line_number=None):
        self.line_number = line_number
        if line_number is not None:
            message = f'line {line_number}: {message}'
        super().__init__(message)


class SchemaError(MahnnError, KeyError):

    def __str__(self):
        return str(self.args[0]) if self.args else ''
