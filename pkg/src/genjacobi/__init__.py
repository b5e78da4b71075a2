"""Exact verification of generalized Jacobi identities and their
applications to connections and vector-bundle transports."""

__version__ = "0.1.0"
