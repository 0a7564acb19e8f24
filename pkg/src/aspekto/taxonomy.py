"""The fixed two-level aspect taxonomy for Taglish e-commerce reviews.

Four general categories (PRODUCT, DELIVERY, PRICE, SERVICE) branch into 21
specific aspects.  Label order is frozen and shared by every vector, file
and wire format in the package, so labels can always be addressed by index
or by slug interchangeably.

Specific labels are stored qualified with their parent category
(``DELIVERY.Correctness``) because bare names repeat across categories
(two ``Correctness``, two ``Condition``).  Slugs replace ``/`` and spaces
with ``_`` (``PRODUCT.Size_Measurement``); display names keep the original
spelling (``Size/Measurement``).
"""

from __future__ import annotations

TAXONOMY_VERSION = "1.0"

GENERALS: tuple[str, ...] = ("PRODUCT", "DELIVERY", "PRICE", "SERVICE")

# (parent general, display name) per specific aspect, in canonical order.
_SPECIFICS: tuple[tuple[str, str], ...] = (
    ("PRODUCT", "Color"),
    ("PRODUCT", "Condition"),
    ("PRODUCT", "Correctness"),
    ("PRODUCT", "Durability"),
    ("PRODUCT", "Effectiveness"),
    ("PRODUCT", "Functionality"),
    ("PRODUCT", "Material"),
    ("PRODUCT", "Sensory"),
    ("PRODUCT", "Size/Measurement"),
    ("PRODUCT", "General"),
    ("DELIVERY", "Condition"),
    ("DELIVERY", "Correctness"),
    ("DELIVERY", "Timeliness"),
    ("DELIVERY", "General"),
    ("PRICE", "Affordability"),
    ("PRICE", "Value for Money"),
    ("PRICE", "General"),
    ("SERVICE", "Handling"),
    ("SERVICE", "Responsiveness"),
    ("SERVICE", "Trustworthiness"),
    ("SERVICE", "General"),
)


def _slugify(name: str) -> str:
    return name.replace("/", "_").replace(" ", "_")


SPECIFIC_SLUGS: tuple[str, ...] = tuple(
    f"{general}.{_slugify(name)}" for general, name in _SPECIFICS
)
ALL_SLUGS: tuple[str, ...] = GENERALS + SPECIFIC_SLUGS

N_GENERAL = len(GENERALS)
N_SPECIFIC = len(SPECIFIC_SLUGS)
N_LABELS = N_GENERAL + N_SPECIFIC

DISPLAY_NAMES: dict[str, str] = {
    **{g: g for g in GENERALS},
    **{slug: _SPECIFICS[i][1] for i, slug in enumerate(SPECIFIC_SLUGS)},
}

_GENERAL_INDEX = {g: i for i, g in enumerate(GENERALS)}
_SPECIFIC_INDEX = {s: i for i, s in enumerate(SPECIFIC_SLUGS)}
_PARENT_INDEX: tuple[int, ...] = tuple(
    _GENERAL_INDEX[general] for general, _ in _SPECIFICS
)

# sanity: 10/4/3/4 children, no case-insensitive collisions
assert N_GENERAL == 4 and N_SPECIFIC == 21
assert tuple(_PARENT_INDEX.count(i) for i in range(4)) == (10, 4, 3, 4)
assert len({s.lower() for s in ALL_SLUGS}) == N_LABELS


def parent_of(specific_index: int) -> int:
    """Index of the parent general for the given specific index (0..20)."""
    if not 0 <= specific_index < N_SPECIFIC:
        raise IndexError(f"specific index out of range: {specific_index}")
    return _PARENT_INDEX[specific_index]


def parent_slug(specific: str) -> str:
    """Parent general slug of a specific slug."""
    return GENERALS[parent_of(specific_index(specific))]


def specific_index(slug: str) -> int:
    try:
        return _SPECIFIC_INDEX[slug]
    except KeyError:
        raise KeyError(f"unknown specific label: {slug!r}") from None


def general_index(slug: str) -> int:
    try:
        return _GENERAL_INDEX[slug]
    except KeyError:
        raise KeyError(f"unknown general label: {slug!r}") from None


def is_general(slug: str) -> bool:
    return slug in _GENERAL_INDEX


def is_specific(slug: str) -> bool:
    return slug in _SPECIFIC_INDEX


def is_label(slug: str) -> bool:
    return is_general(slug) or is_specific(slug)


def specifics_of(general: str) -> tuple[str, ...]:
    """Child specific slugs of a general, in canonical order."""
    gi = general_index(general)
    return tuple(
        SPECIFIC_SLUGS[i] for i in range(N_SPECIFIC) if _PARENT_INDEX[i] == gi
    )


def specific_indices_of(general: str) -> tuple[int, ...]:
    gi = general_index(general)
    return tuple(i for i in range(N_SPECIFIC) if _PARENT_INDEX[i] == gi)


def taxonomy_document() -> dict:
    """The taxonomy as a versioned, serializable document.

    Consumers (UI, config files) reference labels by slug, never by index.
    """
    return {
        "version": TAXONOMY_VERSION,
        "generals": [
            {"slug": g, "display": DISPLAY_NAMES[g]} for g in GENERALS
        ],
        "specifics": [
            {
                "slug": slug,
                "general": GENERALS[_PARENT_INDEX[i]],
                "display": DISPLAY_NAMES[slug],
            }
            for i, slug in enumerate(SPECIFIC_SLUGS)
        ],
    }
