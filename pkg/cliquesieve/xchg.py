#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
.. currentmodule:: cliquesieve.xchg
.. moduleauthor:: cliquesieve developers

Document exchange... data exchange... it all starts here!
"""
from abc import ABC, abstractmethod
import json
from pathlib import Path
from typing import Any, Mapping, Type, TypeVar, Union
from .errors import ConfigException

#: a type variable for things that can be exported and loaded
E = TypeVar('E', bound='Exportable')


class Exportable(ABC):
    """
    Objects that can be exported as and loaded from simple data types
    should extend `Exportable` to make their intentions clear and their
    methods consistent.
    """
    @abstractmethod
    def export(self) -> Mapping[str, Any]:
        """
        Export the instance as a mapping of simple types.

        :return: the mapping
        """

    @classmethod
    @abstractmethod
    def load(cls, data: Mapping[str, Any]) -> Any:
        """
        Create an instance from a mapping.

        :param data: the data
        :return: the instance
        """


def dump_json(obj: Exportable, path: Union[str, Path]) -> Path:
    """
    Write an exportable object to a JSON file.

    :param obj: the object
    :param path: the destination path
    :return: the path that was written
    """
    _path = Path(path)
    _path.parent.mkdir(parents=True, exist_ok=True)
    _path.write_text(
        json.dumps(obj.export(), indent=2, sort_keys=True) + '\n',
        encoding='utf-8'
    )
    return _path


def load_json(cls: Type[E], path: Union[str, Path]) -> E:
    """
    Load an exportable object from a JSON file.

    :param cls: the exportable class
    :param path: the source path
    :return: the loaded instance
    :raises ConfigException: if the file isn't valid JSON
    """
    text = Path(path).read_text(encoding='utf-8')
    try:
        data = json.loads(text)
    except json.JSONDecodeError as jde:
        raise ConfigException(
            message=f"{path}: {jde.msg} (column {jde.colno})",
            line=jde.lineno,
            inner=jde
        )
    return cls.load(data)
