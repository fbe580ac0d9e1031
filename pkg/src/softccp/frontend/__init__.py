"""Concrete syntax and the command-line interface."""
