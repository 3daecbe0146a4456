"""R-motivic stable stems workbench.

Computes Ext over the R-/C-motivic and classical dual Steenrod algebras
by brute-force cobar complexes, runs the rho-Bockstein and Adams
spectral sequences from seeded and user-supplied facts, assembles
homotopy groups with hidden extensions, and derives Mahowald invariants.
"""

__version__ = "0.1.0"
