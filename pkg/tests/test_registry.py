"""
Tests for the point kind registry.
"""

from mahler_lab import PointFamily, PointKindRegistry, get_point_registry


class TestPointKindRegistry:
    """Test PointKindRegistry."""

    def test_register_and_get(self):
        registry = PointKindRegistry()
        registry.register("const", lambda args, d: (args, d), PointFamily.EXACT, aliases=["c"])
        assert registry.has("const")
        assert registry.get("c")("1", 2) == ("1", 2)
        assert registry.get("missing") is None
        assert registry.list_all() == ["const"]

    def test_list_by_family(self):
        registry = PointKindRegistry()
        registry.register("a", lambda args, d: None, PointFamily.EXACT)
        registry.register("b", lambda args, d: None, PointFamily.SAMPLE)
        assert registry.list_by_family(PointFamily.SAMPLE) == ["b"]


class TestGlobalRegistry:
    """Test the built-in point kinds."""

    def test_builtin_kinds(self):
        registry = get_point_registry()
        for name in ["rational", "algebraic", "liouville", "zero", "lebesgue", "cantor"]:
            assert registry.has(name)
        assert registry.has("zero_set")

    def test_documentation(self):
        docs = get_point_registry().to_documentation()
        assert set(docs) == {"exact", "series", "zero_set", "sample"}
        names = [entry["name"] for entry in docs["sample"]]
        assert names == ["lebesgue", "cantor"]
        assert all(entry["examples"] for family in docs.values() for entry in family)
