"""Core numeric modules: NC lattice, quadrature, distribution family, FID checks."""

from .nc_lattice import cumulants_to_moments, enumerate_nc, mobius_to_top, moments_to_cumulants
from .dist_core import gpfp_pdf, make_power, normalize
from .quad_engine import moment
from .fid_check import eta_threshold, fid_necessary, hankel_witness

__all__ = [
    "cumulants_to_moments",
    "enumerate_nc",
    "mobius_to_top",
    "moments_to_cumulants",
    "gpfp_pdf",
    "make_power",
    "normalize",
    "moment",
    "eta_threshold",
    "fid_necessary",
    "hankel_witness",
]
