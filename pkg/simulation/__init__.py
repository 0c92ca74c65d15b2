from .lpp_sim import (
    gen_weights, lpp_time, lpp_time_brute, sample_values, sample_cdf, pilot_grid,
    increment_tests, staircase_path, path_increment_test, TARGETS,
)

__all__ = [
    'gen_weights', 'lpp_time', 'lpp_time_brute', 'sample_values', 'sample_cdf', 'pilot_grid',
    'increment_tests', 'staircase_path', 'path_increment_test', 'TARGETS',
]
