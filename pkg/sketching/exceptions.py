class StreamKpcaError(Exception):
    """Base class for every error raised by the sketching and evaluation code."""

    # short machine-readable tag, used by the CLI as `<kind>: <detail>`
    kind = 'error'


class ContractViolation(StreamKpcaError, ValueError):
    kind = 'contract_violation'


class ConfigurationError(StreamKpcaError, ValueError):
    kind = 'configuration_error'

    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = errors or {}

    @classmethod
    def from_serializer(cls, serializer):
        # flatten DRF's {field: [messages]} into one line
        parts = []
        for field, messages in serializer.errors.items():
            if not isinstance(messages, (list, tuple)):
                messages = [messages]
            parts.append(f"{field}: {' '.join(str(m) for m in messages)}")
        return cls('; '.join(parts), errors=serializer.errors)


class NumericalFailure(StreamKpcaError, ArithmeticError):
    kind = 'numerical_failure'


class MalformedInput(StreamKpcaError, ValueError):
    kind = 'malformed_input'

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ModelFileError(StreamKpcaError):
    kind = 'model_file_error'
