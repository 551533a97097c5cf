"""arnlab - recurrent neurons written as functional programs."""

__version__ = "0.1.0"

FORMAT_VERSION = 1
