"""
Integration tests for Inertial Dynamics Lab.

These run whole scenarios and the command-line runner end to end. They are
marked with @pytest.mark.integration; long-horizon runs are also marked
@pytest.mark.slow.
"""
