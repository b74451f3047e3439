"""Locally trained neural constituent parsers with CKY decoding."""

__version__ = "0.1.0"
