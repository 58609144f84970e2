#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
.. currentmodule:: cliquesieve.errors
.. moduleauthor:: cliquesieve developers

Sometimes things go wrong.  The exceptions here are the ones every other
module builds on.
"""


class CliqueSieveException(Exception):
    """
    This is the base exception for other exceptions defined in this library.
    """
    def __init__(self, message: str, inner: Exception = None):
        """

        :param message: the exception message
        :param inner: the exception that caused this exception
        """
        super().__init__(message)
        self._message = message
        self._inner = inner

    @property
    def message(self) -> str:
        """
        Get the exception message.
        """
        return self._message

    @property
    def inner(self) -> Exception or None:
        """
        Get the exception that caused this exception.
        """
        return self._inner


class DimensionMismatchException(CliqueSieveException):
    """
    Raised when two objects that must share a vertex set (or a point
    dimension) don't.
    """


class ConfigException(CliqueSieveException):
    """
    Raised when a configuration can't be parsed or doesn't validate.
    """
    def __init__(
            self,
            message: str,
            field: str = None,
            line: int = None,
            inner: Exception = None
    ):
        """

        :param message: the exception message
        :param field: the offending configuration field (if known)
        :param line: the offending line in the source file (if known)
        :param inner: the exception that caused this exception
        """
        super().__init__(message=message, inner=inner)
        self._field = field
        self._line = line

    @property
    def field(self) -> str or None:
        """
        Get the name of the offending field.
        """
        return self._field

    @property
    def line(self) -> int or None:
        """
        Get the line number at which parsing failed.
        """
        return self._line
