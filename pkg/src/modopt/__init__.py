"""Simulation-optimization toolkit for multimodal mobility-on-demand systems.

Subpackages: netgraph (road/transit graphs and routing), choice
(multinomial logit demand), fleetsim (request-vehicle assignment
simulator), solver (LP/ILP engines), equilibrium (day-to-day inner loop),
economics (profit and policy levers), bayesopt (outer-loop optimizer),
cli (configuration and commands).
"""

__version__ = "0.1.0"
