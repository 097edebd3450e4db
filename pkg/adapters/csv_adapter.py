# -*- coding: utf-8 -*-
"""
CSV Signal Adapter

One value per line, column-major for lattice signals. Values are written with
17 significant digits through a fixed format, independent of the locale.
"""

import logging
from pathlib import Path

import numpy as np

from adapters.base_adapter import BaseSignalAdapter, ParseError, PathLike, SignalData


logger = logging.getLogger(__name__)


class CsvSignalAdapter(BaseSignalAdapter):
    """Plain one-column CSV signals"""

    extensions = (".csv", ".txt")

    def _validate_config(self) -> None:
        pass

    def read(self, path: PathLike) -> SignalData:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ParseError(f"cannot read {path}: {e}") from e

        values = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            # a single column; tolerate a trailing comma
            field = line.split(",")[0].strip()
            try:
                value = float(field)
            except ValueError as e:
                raise ParseError(f"{path}:{lineno}: '{field}' is not a number") from e
            if not np.isfinite(value):
                raise ParseError(f"{path}:{lineno}: non-finite value")
            values.append(value)

        if not values:
            raise ParseError(f"{path} contains no values")
        logger.debug(f"read {len(values)} values from {path}")
        return SignalData(values=np.asarray(values, dtype=np.float64), meta={'format': 'csv'})

    def write(self, path: PathLike, data: SignalData) -> None:
        np.savetxt(path, np.asarray(data.values, dtype=np.float64), fmt="%.17g")
        logger.debug(f"wrote {len(data.values)} values to {path}")
