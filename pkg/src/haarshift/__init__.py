"""Phase shifting of signals and images directly in the Haar wavelet domain."""

from .core import (
    DTable,
    HaarError,
    HaarTransform,
    d_table,
    d_table_extended,
    forward,
    forward2d,
    inverse,
    inverse2d,
    read_haarc,
    write_haarc,
)
from .engine import (
    DyadicShift,
    shift_2d,
    shift_rows,
    shift_transform,
    shift_transform_fractional,
    shifted_blur,
    shifted_detail,
    shifted_detail_fractional,
    two_adic_valuation,
)

__version__ = "0.1.0"
