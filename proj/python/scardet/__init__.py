"""Scar-family detection with quantum variational autoencoders.

Thin Python surface over the C++ core: constrained bases, the three model
Hamiltonians, exact state-vector circuit simulation, SPSA, and the drop/family
analysis. See ``scardet._scardet`` for the full signatures.
"""

from ._scardet import (
    Basis,
    CircuitEngine,
    CircuitSpec,
    SymmetryBasis,
    build_ladder,
    build_pxp,
    build_pxp3,
    build_pxp_sector,
    cz_gate,
    detect_drops,
    diagonalize,
    e_gate,
    embed_in_computational_basis,
    entanglement_entropy,
    extract_families,
    fock_pattern_label,
    local_magnetization,
    lucas_number,
    ry_gate,
    rtilde_gate,
    spsa_minimize,
    string_to_word,
    structure_factor,
    trash_in_light_cone,
    word_to_string,
)

__all__ = [
    "Basis",
    "CircuitEngine",
    "CircuitSpec",
    "SymmetryBasis",
    "build_ladder",
    "build_pxp",
    "build_pxp3",
    "build_pxp_sector",
    "cz_gate",
    "detect_drops",
    "diagonalize",
    "e_gate",
    "embed_in_computational_basis",
    "entanglement_entropy",
    "extract_families",
    "fock_pattern_label",
    "local_magnetization",
    "lucas_number",
    "ry_gate",
    "rtilde_gate",
    "spsa_minimize",
    "string_to_word",
    "structure_factor",
    "trash_in_light_cone",
    "word_to_string",
]
