"""Numerical workbench for 3D Pachner moves on triangulated 3-manifolds.

Subpackages and modules:

simplicial
    Vertex-labeled triangulations, incidence, isomorphism.
moves
    The four 3D Pachner moves (2-3, 3-2, 1-4, 4-1) as validated rewrites.
geometry
    Euclidean decorations: lengths, signed volumes, dihedral and deficit angles.
regge
    Finite-difference angle derivatives, the deficit-angle Jacobian, and the
    bipyramid volume identity checker.
complexkit
    Based chain complexes, torsion of acyclic complexes, and the experimental
    deformation complex built from the Jacobian.
cli
    The ``pachnerlab`` command-line front end.
"""

__version__ = "0.1.0"
