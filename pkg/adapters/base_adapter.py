# -*- coding: utf-8 -*-
"""
Base Signal Adapter Interface

Every file format the CLI reads or writes (CSV signals, PGM images) is handled
by an adapter implementing this interface. The estimators never touch files:
they receive a SignalData vector and hand one back.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from core.graph_model import LatticeSpec


PathLike = Union[str, Path]


@dataclass
class SignalData:
    """A signal as read from disk, in vertex (column-major) order"""
    values: np.ndarray
    lattice: Optional[LatticeSpec] = None
    meta: Dict[str, Any] = field(default_factory=dict)


class BaseSignalAdapter(ABC):
    """
    Base class for all signal adapters.

    Each format implements read and write; write must accept whatever read
    produced so that an unfiltered signal survives a round trip unchanged.
    """

    extensions: tuple = ()

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        """
        Initialize adapter with configuration

        Args:
            config: Format-specific options (e.g. {'binary': False} for PGM)
        """
        self.config = config or {}
        self._validate_config()

    @abstractmethod
    def _validate_config(self) -> None:
        """Validate adapter-specific configuration"""
        pass

    @abstractmethod
    def read(self, path: PathLike) -> SignalData:
        """
        Read a signal

        Raises:
            ParseError: If the file is malformed
        """
        pass

    @abstractmethod
    def write(self, path: PathLike, data: SignalData) -> None:
        """Write a signal in this adapter's format"""
        pass

    def get_adapter_info(self) -> Dict[str, Any]:
        return {
            'adapter_name': self.__class__.__name__,
            'extensions': list(self.extensions),
            'config_keys': sorted(self.config),
        }


def adapter_for_path(path: PathLike, config: Optional[Dict[str, Any]] = None) -> BaseSignalAdapter:
    """Pick the adapter by file extension"""
    from adapters.csv_adapter import CsvSignalAdapter
    from adapters.pgm_adapter import PgmAdapter

    suffix = Path(path).suffix.lower()
    for adapter_class in (CsvSignalAdapter, PgmAdapter):
        if suffix in adapter_class.extensions:
            return adapter_class(config)
    raise UnsupportedFormatError(f"no adapter for '{suffix or path}' files")


class AdapterError(Exception):
    """Base exception for adapter errors"""
    pass


class ParseError(AdapterError):
    """Raised when a file cannot be parsed"""
    pass


class UnsupportedFormatError(AdapterError):
    """Raised when no adapter handles a file type"""
    pass
