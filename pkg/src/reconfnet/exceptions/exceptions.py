"""Error types raised by the library and their catalog-backed messages."""

import dataclasses
from importlib import resources
from typing import Any

from . import msgparser


def catalog() -> dict[str, msgparser.ErrorMessage]:
    with resources.as_file(
        resources.files("reconfnet.exceptions") / "messages.txt"
    ) as messages_path:
        return msgparser.parse(str(messages_path))


class ReconfnetError(Exception):
    """Base error; `code` selects the catalog entry used for the message."""

    code: int = 0
    exit_code: int = 1

    def __init__(self, code: int | None = None, help: str | None = None, **kwargs: Any):
        if code is not None:
            self.code = code
        try:
            message = dataclasses.replace(catalog()[f"E{self.code:03d}"])  # copy
        except KeyError:
            raise ValueError(f"Unknown error code: {self.code}")

        message.message = message.message.format(**kwargs)
        if message.help:
            message.help = message.help.format(**kwargs)
        if help:
            message.help = help

        self.message = message
        self.details = kwargs
        self._help = help
        super().__init__(f"[{message.code}] {message.message}")

    def __reduce__(self):
        # keyword-only state does not survive the default Exception pickling
        return (_rebuild, (self.__class__, self.code, self._help, self.details))

    @property
    def category(self) -> str:
        return self.message.type


class ConfigError(ReconfnetError, ValueError):
    code = 101
    exit_code = 2


class ValidationError(ReconfnetError, ValueError):
    code = 201
    exit_code = 2


class InfeasibleError(ReconfnetError):
    code = 301
    exit_code = 3


class UnroutableError(ReconfnetError):
    code = 302
    exit_code = 4


class SeedInfeasibleError(ReconfnetError):
    code = 303
    exit_code = 5


class InstanceTooLargeError(ReconfnetError):
    code = 304
    exit_code = 6


class FormatError(ReconfnetError, ValueError):
    code = 401
    exit_code = 2


def _rebuild(cls: type[ReconfnetError], code: int, help: str | None, details: dict):
    return cls(code, help=help, **details)
