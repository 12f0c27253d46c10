from __future__ import annotations

import pytest

from support import eval_instance


@pytest.fixture(scope="session")
def odd1_tree():
    """The evaluated standard instance (region Sweden, speed 15, lane 2.8)."""
    result = eval_instance()
    assert result.ok, result.violations
    return result.value
