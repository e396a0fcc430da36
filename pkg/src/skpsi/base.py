from sklearn.base import BaseEstimator

from .config import calculus_config as cc
from .core.grid import CircleGrid
from .core.strip import ParameterStrip
from .exceptions import ConfigInvalid
from .symbols.base import SymbolExpr


class BaseCertifier(BaseEstimator):
    """Base class for all certifying pipelines in skpsi.

    A certifier is configured through its constructor parameters, fitted
    on a symbol together with a parameter strip, and exposes its results
    as attributes with a trailing underscore.

    For instance, all certifiers need a strip of (tau, theta) samples and
    a truncation cutoff K.
    """

    def _validate_inputs(self, a: SymbolExpr, strip: ParameterStrip):
        """
        Validate the parameters of the certifier and its inputs.

        Parameters
        ----------
        a : SymbolExpr
            The symbol the certifier is fitted on.
        strip : ParameterStrip
            The parameter samples.

        Returns
        -------
        CircleGrid
            The truncation grid at the configured cutoff.

        Raises
        ------
        ConfigInvalid
            If ``a`` is not a symbol or ``strip`` is not a parameter strip.
        """
        self._validate_params()
        if not isinstance(a, SymbolExpr):
            raise ConfigInvalid(f"Expected a symbol, got {type(a).__name__}.")
        if not isinstance(strip, ParameterStrip):
            raise ConfigInvalid(
                f"Expected a ParameterStrip, got {type(strip).__name__}."
            )
        return CircleGrid(cc.K_test if self.K is None else self.K)
