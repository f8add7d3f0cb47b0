"""Classification engine for point-group-equivariant fermionic invertible phases.

The pipeline runs symmetry-case logic to pick a virtual bundle, builds the
twisted Steenrod-module of its Thom spectrum, resolves it minimally over A(1)
or E(1), pushes the Ext chart through an Adams-style deduction engine, and
assembles bordism and phase groups from the surviving page.
"""

__version__ = "0.1.0"
