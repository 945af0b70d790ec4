"""
Unit tests for Inertial Dynamics Lab.

Each module tests one source module in isolation, mostly against closed-form
solutions and identities.
"""
