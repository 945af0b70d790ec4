"""
Test suite for Inertial Dynamics Lab.

This package contains unit tests, integration tests, and fixtures
for the numerical modules, the scenario catalog and the CLI.
"""

__version__ = "0.1.0"
