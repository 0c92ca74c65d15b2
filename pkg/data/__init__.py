from .reference_configs import REFERENCE_CONFIGS

__all__ = ['REFERENCE_CONFIGS']
