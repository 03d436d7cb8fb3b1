"""twistorlab: numerical verification of twistor-space identities.

Builds the twistor space of a Riemannian 4-manifold on a chart, evaluates
the metric form and its derivatives both in closed form and by independent
finite differences, and checks the identities suite by suite.
"""

__version__ = "0.1.0"
