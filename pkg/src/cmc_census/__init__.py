""".. include:: docs/main.md"""  # noqa: D400, D415

import importlib.metadata

from cmc_census import census, flatlab, frobenius, lift, moduli, symcore
from cmc_census.moduli import SurfaceSpec

__all__ = ["census", "flatlab", "frobenius", "lift", "moduli", "symcore", "SurfaceSpec"]
__version__ = importlib.metadata.version("cmc-census")
