"""Multi-label assignments over the taxonomy.

A :class:`LabelVector` holds 4 general booleans plus 21 specific booleans in
canonical taxonomy order.  Vectors are immutable values and safe to share.

Hierarchical consistency (a true specific implies a true parent general) is
enforced at construction by the ``strict`` factories and merely checkable on
raw vectors; :func:`enforce_hierarchy` repairs a raw vector by masking.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping

from . import taxonomy
from .errors import HierarchyError, ValidationError


@dataclass(frozen=True)
class LabelVector:
    general: tuple[bool, ...]
    specific: tuple[bool, ...]

    def __post_init__(self):
        object.__setattr__(self, "general", tuple(bool(b) for b in self.general))
        object.__setattr__(self, "specific", tuple(bool(b) for b in self.specific))
        if len(self.general) != taxonomy.N_GENERAL:
            raise ValidationError(
                f"expected {taxonomy.N_GENERAL} general labels, got {len(self.general)}"
            )
        if len(self.specific) != taxonomy.N_SPECIFIC:
            raise ValidationError(
                f"expected {taxonomy.N_SPECIFIC} specific labels, got {len(self.specific)}"
            )

    @classmethod
    def empty(cls) -> "LabelVector":
        return cls((False,) * taxonomy.N_GENERAL, (False,) * taxonomy.N_SPECIFIC)

    @classmethod
    def from_slugs(cls, slugs: Iterable[str], strict: bool = True) -> "LabelVector":
        """Build a vector from the set of true label slugs.

        ``strict`` rejects hierarchy-inconsistent assignments; pass
        ``strict=False`` to hold a raw vector for later checking/repair.
        """
        general = [False] * taxonomy.N_GENERAL
        specific = [False] * taxonomy.N_SPECIFIC
        for slug in slugs:
            if taxonomy.is_general(slug):
                general[taxonomy.general_index(slug)] = True
            elif taxonomy.is_specific(slug):
                specific[taxonomy.specific_index(slug)] = True
            else:
                raise ValidationError(f"unknown label slug: {slug!r}")
        vector = cls(tuple(general), tuple(specific))
        if strict and not vector.is_consistent:
            bad = ", ".join(vector.inconsistent_specifics())
            raise HierarchyError(f"specific label(s) without parent general: {bad}")
        return vector

    @classmethod
    def from_map(cls, mapping: Mapping[str, bool], strict: bool = True) -> "LabelVector":
        """Build from a slug-keyed boolean map; missing slugs default false."""
        for slug, value in mapping.items():
            if not taxonomy.is_label(slug):
                raise ValidationError(f"unknown label slug: {slug!r}")
            if not isinstance(value, bool):
                raise ValidationError(f"non-boolean value for {slug!r}: {value!r}")
        return cls.from_slugs(
            (slug for slug, value in mapping.items() if value), strict=strict
        )

    @property
    def is_consistent(self) -> bool:
        return all(
            self.general[taxonomy.parent_of(i)]
            for i, on in enumerate(self.specific)
            if on
        )

    def inconsistent_specifics(self) -> tuple[str, ...]:
        """Specific slugs that are true while their parent general is false."""
        return tuple(
            taxonomy.SPECIFIC_SLUGS[i]
            for i, on in enumerate(self.specific)
            if on and not self.general[taxonomy.parent_of(i)]
        )

    def enforce_hierarchy(self) -> "LabelVector":
        """Mask out every specific whose parent general is false.

        Generals are left untouched; idempotent; never turns a bit on.
        """
        if self.is_consistent:
            return self
        specific = tuple(
            on and self.general[taxonomy.parent_of(i)]
            for i, on in enumerate(self.specific)
        )
        return LabelVector(self.general, specific)

    def get(self, slug: str) -> bool:
        if taxonomy.is_general(slug):
            return self.general[taxonomy.general_index(slug)]
        return self.specific[taxonomy.specific_index(slug)]

    def true_slugs(self) -> tuple[str, ...]:
        return tuple(slug for slug in taxonomy.ALL_SLUGS if self.get(slug))

    def as_map(self) -> dict[str, bool]:
        """Full 25-key slug-to-boolean map in canonical order."""
        return {slug: self.get(slug) for slug in taxonomy.ALL_SLUGS}

    def bits(self) -> tuple[bool, ...]:
        return self.general + self.specific


def enforce_hierarchy(vector: LabelVector) -> LabelVector:
    return vector.enforce_hierarchy()


def canonical_label_json(vector: LabelVector) -> str:
    """Canonical wire serialization: full map, canonical order, no spaces."""
    return json.dumps(vector.as_map(), separators=(",", ":"))


def vector_from_json(payload: str, strict: bool = True) -> LabelVector:
    data = json.loads(payload)
    if not isinstance(data, dict):
        raise ValidationError("label payload must be a JSON object")
    return LabelVector.from_map(data, strict=strict)
