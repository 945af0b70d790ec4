"""Base model shared by every operator-catalog spec."""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, ConfigDict


class SpecModel(BaseModel):
    """Immutable, tagged description of a mathematical object.

    Fields hold plain lists so specs round-trip through JSON and TOML; numpy
    views are built once in ``model_post_init`` and kept in private attributes.
    Compare specs through ``model_dump()``, never ``==``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    def describe(self) -> dict[str, Any]:
        """JSON-compatible description used in run metadata."""
        return self.model_dump(mode="json")
