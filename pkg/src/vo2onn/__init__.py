"""Thermally coupled VO2 relaxation-oscillator network.

Simulator for an 11-oscillator network (reference + 3x3 processing grid +
one multilevel output neuron), high-order synchronization metrics over
pulse leading-edge trains, dihedral symmetry classes of 3x3 binary
patterns, and a three-step annealing search over the network parameters.
"""

__version__ = "0.1.0"
