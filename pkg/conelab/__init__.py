"""
conelab: cross-positive maps on symmetric cones.

Jordan algebras of hermitian matrices over R, C, H and O, the exotic
cross-positive generator B, sampled and exact positivity checks, and an exact
certificate that B does not split into a positive map plus a Lie element.
"""

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "cli",
    "decompose",
    "exotic",
    "hurwitz",
    "jordan",
    "linmap",
    "models",
]
