"""Gym template catalog: dual-taxonomy browsing, publishing, search."""

from .core import (
    DO_TYPE,
    INDUSTRY,
    BrowseResult,
    Catalog,
    CategoryNode,
    NotFound,
    TemplateEntry,
    UnknownCategory,
    ValidationFailed,
)
from .seeds import seed_spec, taxonomy_rows, template_rows

__all__ = [
    "BrowseResult",
    "Catalog",
    "CategoryNode",
    "DO_TYPE",
    "INDUSTRY",
    "NotFound",
    "TemplateEntry",
    "UnknownCategory",
    "ValidationFailed",
    "seed_spec",
    "taxonomy_rows",
    "template_rows",
]
