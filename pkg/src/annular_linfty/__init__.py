"""Annular Khovanov homology over F2 with L-infinity module structures."""
