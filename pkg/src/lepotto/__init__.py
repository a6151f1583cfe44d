"""Single-qubit quantum Otto engine driven across a Liouvillian exceptional point."""

__version__ = "0.1.0"
