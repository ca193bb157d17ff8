"""Circle representations of 4-regular plane multigraphs.

Builders for the order-12 multigraph and the 68-vertex simple graphs that
have no circle representation, a representation verifier, and numerical and
analytic certificates for the axis-tangent circle configurations behind them.
"""

__version__ = "0.1.0"
