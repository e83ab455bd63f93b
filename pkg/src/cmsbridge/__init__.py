"""Reverse-engineer headless CMS sites into a platform-neutral model and
generate client middleware for them."""

from .errors import CmsBridgeError
from .metamodel import (
    AttributeType,
    CmsAttribute,
    CmsClass,
    CmsModel,
    CmsRelationship,
    CoreKind,
    Multiplicity,
    Platform,
    core_model,
)

__version__ = "0.1.0"

__all__ = [
    "AttributeType", "CmsAttribute", "CmsBridgeError", "CmsClass", "CmsModel",
    "CmsRelationship", "CoreKind", "Multiplicity", "Platform", "core_model", "__version__",
]
