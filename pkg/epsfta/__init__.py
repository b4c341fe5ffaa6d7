"""
EPSFTA

Reliability workbench for a satellite electrical power subsystem: fault
trees and their quantification, fault-scenario enumeration, battery and
solar-array sizing, healthy/faulty simulation and risk classification.
"""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version('epsfta')
except PackageNotFoundError:
    __version__ = '0.0.0'

__all__ = ['__version__']
