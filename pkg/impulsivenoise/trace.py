# Uniformly sampled real-valued noise sequence, with CSV ingestion and emission.
#
import os
import csv
import math
import logging

import numpy as np

from impulsivenoise.constant import TRACE_HEADER, FLOAT_FORMAT
from impulsivenoise.error import InvalidArgument, IngestionError

logger = logging.getLogger(__name__)
# logger.setLevel(logging.DEBUG)


class Trace:
    """A real-valued noise sequence.

    Args:
        samples: the values, copied into a float64 array
        sample_rate: samples per second, for display only
        seed: the generating seed, None for ingested traces
        meta: free-form values produced alongside the samples (background variance, impulse energies...)
    """

    def __init__(self, samples, sample_rate: float = 1.0, seed: int | None = None, meta: dict | None = None):
        self.samples = np.array(samples, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(self.samples)):
            raise InvalidArgument("trace samples must all be finite")
        if not (sample_rate > 0 and math.isfinite(sample_rate)):
            raise InvalidArgument(f"sample rate must be positive, got {sample_rate}")
        self.sample_rate = float(sample_rate)
        self.seed = seed
        self.meta = meta if meta is not None else {}

    def __len__(self) -> int:
        return len(self.samples)

    def __str__(self) -> str:
        seed = "ingested" if self.seed is None else f"seed {self.seed}"
        return f"trace of {len(self)} samples at {self.sample_rate} Hz ({seed})"

    def is_empty(self) -> bool:
        return len(self.samples) == 0

    def mean_power(self) -> float:
        return float(np.mean(self.samples**2)) if not self.is_empty() else 0.0

    def with_samples(self, samples, **meta) -> "Trace":
        """New trace sharing rate and seed, with meta updated."""
        m = dict(self.meta)
        m.update(meta)
        return Trace(samples, sample_rate=self.sample_rate, seed=self.seed, meta=m)

    # ##################################
    # CSV
    #
    def to_csv(self, filename: str):
        with open(filename, "w", newline="") as fp:
            fp.write(",".join(TRACE_HEADER) + "\n")
            for i, v in enumerate(self.samples):
                fp.write(f"{i},{format(float(v), FLOAT_FORMAT)}\n")
        logger.info(f"wrote {len(self)} samples to {filename}")

    @staticmethod
    def from_csv(filename: str, sample_rate: float = 1.0, seed: int | None = None) -> "Trace":
        """Reads a two-column index,value file.

        Raises:
            IngestionError: on a missing header, an empty row or a non finite value, naming the row (1-based, header is row 1)
            OSError: if the file cannot be read
        """
        values = []
        with open(filename, "r", newline="") as fp:
            reader = csv.reader(fp)
            header = next(reader, None)
            if header is None or [h.strip().lower() for h in header] != TRACE_HEADER:
                raise IngestionError(f"expected header {','.join(TRACE_HEADER)}, got {header}", filename=filename, row=1)
            for row_number, row in enumerate(reader, start=2):
                if len(row) == 0 or all(c.strip() == "" for c in row):
                    raise IngestionError("empty row", filename=filename, row=row_number)
                if len(row) != 2:
                    raise IngestionError(f"expected 2 columns, got {len(row)}", filename=filename, row=row_number)
                try:
                    v = float(row[1])
                except ValueError:
                    raise IngestionError(f"invalid value {row[1]!r}", filename=filename, row=row_number)
                if not math.isfinite(v):
                    raise IngestionError(f"non finite value {row[1]!r}", filename=filename, row=row_number)
                values.append(v)
        if len(values) == 0:
            raise IngestionError("no samples", filename=filename)
        logger.info(f"read {len(values)} samples from {os.path.basename(filename)}")
        return Trace(values, sample_rate=sample_rate, seed=seed)
