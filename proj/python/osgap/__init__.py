"""Python bindings for the osgap core library."""

from ._osgap import *  # noqa: F401,F403
from ._osgap import DomainError, CertificationError, LabeledTensor, WeylFamily

__all__ = [name for name in dir() if not name.startswith("_")]
