from .base import Kernel2x2, KernelFamily, FunctionKernel, BorderVectors, conjugate
from .finite import FiniteKernel, TildeKernel, finite_border, kernel_int, kernel_bar, kernel_tilde
from .asymptotic import AsympKernel, AsympTilde, asymp_border, kernel_abar, abar22_vertical
from .baik_rains import BrPathKernel, kernel_br_path
from .geometric import GeoKernel, geo_E, kernel_geo, scaled_kernel

__all__ = [
    'Kernel2x2', 'KernelFamily', 'FunctionKernel', 'BorderVectors', 'conjugate',
    'FiniteKernel', 'TildeKernel', 'finite_border', 'kernel_int', 'kernel_bar', 'kernel_tilde',
    'AsympKernel', 'AsympTilde', 'asymp_border', 'kernel_abar', 'abar22_vertical',
    'BrPathKernel', 'kernel_br_path',
    'GeoKernel', 'geo_E', 'kernel_geo', 'scaled_kernel',
]
