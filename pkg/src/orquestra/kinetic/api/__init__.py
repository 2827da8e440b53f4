################################################################################
# © Copyright 2023 Zapata Computing Inc.
################################################################################
from .fields import FluidState
from .parameters import PhysicalParams
