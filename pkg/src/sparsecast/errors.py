"""Exception types shared across the codec pipeline."""


class SparseCastError(Exception):
    """Base class for all errors raised by this package."""


class PgmHeaderError(SparseCastError):
    """PGM file is not a parseable binary (P5) image."""


class PgmMaxvalError(SparseCastError):
    """PGM file declares a maxval other than 255."""


class DimensionError(SparseCastError):
    """Image or block dimensions are inconsistent with the requested operation."""


class MetadataError(SparseCastError):
    """Serialized metadata is truncated, corrupt, or has an unknown version."""


class LayoutError(SparseCastError):
    """Symbol stream layout does not match the data it is applied to."""
