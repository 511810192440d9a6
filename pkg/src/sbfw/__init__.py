"""Simultaneous breadth-first walk (sBFW) toolkit.

A walk with unit negative drift and one positive jump per vertex encodes the
connected component sizes of the Erdos--Renyi graph process: the excursion
lengths of the walk above its past infima are, jointly in the time parameter,
equal in law to the component masses of the multiplicative coalescent.

The package provides

* ``analytic``      closed-form curves, fixed points and limit covariances,
* ``walks``         walk construction and excursion decomposition,
* ``graph_oracle``  direct graph simulation and exact small-n enumeration,
* ``gauss_limits``  grid samplers for the limiting Gaussian processes,
* ``experiments``   seeded, replicated Monte Carlo verification runs,
* ``cli``           a command-line front end (``python -m sbfw.cli`` / ``sbfw``).
"""

__version__ = "0.1.0"

from . import analytic, experiments, gauss_limits, graph_oracle, walks  # noqa: F401
