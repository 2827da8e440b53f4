################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
from ._grid import SpatialGrid, SpectralField, check_same_grid
from ._norms import lp_norm_values, norm_Lp, norm_Zq
from ._products import dealias_product, dealiased_product
from ._split import FrequencySplitSpec, frequency_split, split_values
from ._transforms import (
    Direction,
    derivative,
    derivative_symbol,
    divergence,
    gradient,
    laplacian,
    transform,
)
