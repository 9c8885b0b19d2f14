"""Exception and warning types shared across the package."""


class RbteError(Exception):
    """Base class for all rbte errors."""


class UnsupportedImageError(RbteError):
    """Image file exists but has an unsupported mode or bit depth."""


class MissingEdgeMapError(RbteError):
    """The sibling edge-map file for an external source is absent."""

    def __init__(self, image_path, tag, edge_path):
        super().__init__(
            f"missing edge map for {image_path!s} (source tag {tag!r}, "
            f"expected {edge_path!s})"
        )
        self.image_path = str(image_path)
        self.tag = tag
        self.edge_path = str(edge_path)


class EmptyHistogramError(RbteError):
    """All pixels were dropped while building a histogram."""


class BlankSketchError(RbteError):
    """Sketch preprocessing found no edge pixels to work with."""


class UnmappedClassError(RbteError):
    """A class name has no entry in the class map (strict mode)."""


class DuplicatePathError(RbteError):
    """The same path appears twice within one split of a manifest."""


class ManifestFormatError(RbteError):
    """A manifest or class-map file does not match the expected schema."""


class NoConvergenceWarning(UserWarning):
    """Isodata threshold iteration hit its iteration cap."""
