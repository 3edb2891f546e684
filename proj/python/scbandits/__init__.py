"""Selectively contextual bandits.

Hybrid contextual/noncontextual online learning: Beta-Bernoulli and Bayesian
logistic (Laplace) bandit agents, the delta-thresholded hybrid layer, a
classification-to-bandit benchmark harness, and unbiased off-policy replay
evaluation. The heavy lifting lives in the compiled `_scbandits` extension.
"""

try:
    from ._scbandits import *  # noqa: F401,F403  (installed wheel layout)
    from ._scbandits import __version__  # noqa: F401
except ImportError:  # in-tree builds put the extension on PYTHONPATH directly
    from _scbandits import *  # noqa: F401,F403
    from _scbandits import __version__  # noqa: F401
