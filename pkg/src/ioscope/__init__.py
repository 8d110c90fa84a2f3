"""ioscope: detection of coordinated-campaign signatures in publication
time series and source-influence networks.

Submodules: series, correlation, spectral, wavelet, templates, fractal,
agentsim, netimpact, rankfuse, cli.
"""

__version__ = "0.1.0"

from .errors import IoscopeError
from .series import ScaleField, TimeSeries

__all__ = ["__version__", "IoscopeError", "TimeSeries", "ScaleField"]
