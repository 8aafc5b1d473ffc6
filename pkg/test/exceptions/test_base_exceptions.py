from __future__ import annotations

from mdetpy.elements import Component
from mdetpy.exceptions import BaseMatchDetException

from ..test_base import TestBase


class TestBaseException(TestBase):
    def test_base_exception(self) -> None:
        e = BaseMatchDetException()
        assert e
        assert e.component is None
        assert e.message is None

    def test_base_exception_with_args(self) -> None:
        e = BaseMatchDetException(Component.Geometry, "a message")
        assert e.component == Component.Geometry
        assert e.message == "a message"
        assert str(e) == "a message"
        assert isinstance(e, RuntimeError)
