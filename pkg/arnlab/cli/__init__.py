"""Command line interface for arnlab."""
