"""Jacobi elliptic functions and the complete elliptic integral."""
from .elliptic import agm, complete_K, inverse_sn, jacobi_scd

__all__ = ["agm", "complete_K", "jacobi_scd", "inverse_sn"]
