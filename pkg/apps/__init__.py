"""SYZ real Lagrangian toolkit: mod-2 Betti numbers over integral affine 3-spheres."""

__version__ = "0.3.0"
