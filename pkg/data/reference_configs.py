"""
Named run configurations with reference values

Each entry holds a RunConfig payload and the values a correct build reproduces;
`lpp-lab list-configs` prints them and `--run NAME` executes one.
"""

REFERENCE_CONFIGS = {
    "gue_at_zero": {
        "description": "GUE Tracy-Widom distribution at s = 0",
        "config": {"command": "f-gue", "s_values": [0.0]},
        "expected": {"F": 0.9694},
        "tolerance": 5e-4,
    },
    "stationary_mean": {
        "description": "Monte Carlo mean of the stationary LPP time, N = 10, n = 2, alpha = 0.1",
        "config": {
            "command": "sim",
            "params": {"mode": "stationary", "N": 10, "n": 2, "alpha": 0.1},
            "samples": 1000000,
            "seed": 7,
        },
        "expected": {"mean": 9 / 0.4 + 7 / 0.6},
        "tolerance": 0.1,
    },
    "formula_vs_mc": {
        "description": "Stationary finite-N CDF against simulation, N = 4, n = 1, alpha = 0.1",
        "config": {
            "command": "verify",
            "suite": "formula-vs-mc",
            "params": {"N": 4, "n": 1, "alpha": 0.1},
            "samples": 1000000,
        },
        "expected": {"passed": True},
        "tolerance": 0.005,
    },
    "limit_centre": {
        "description": "Limit law F^(0, 0.5) on [-5, 5]",
        "config": {
            "command": "cdf-asymp",
            "params": {"delta": 0.0, "u": 0.5, "s_min": -5.0, "s_max": 5.0, "points": 33},
        },
        "expected": {"monotone": True},
        "tolerance": 0.0,
    },
    "br_limit": {
        "description": "F^(tau-u, u) against Baik-Rains at u = 3, tau = 0",
        "config": {"command": "verify", "suite": "br-limit", "params": {"u": 3.0, "tau": 0.0}},
        "expected": {"passed": True},
        "tolerance": 0.01,
    },
    "geometric_corner": {
        "description": "Geometric model with N = 1, where L = W_11 ~ Geom(ab)",
        "config": {
            "command": "cdf-geo",
            "params": {"a": 0.5, "b": 0.6, "q": 0.3, "N": 1, "n": 0},
            "s_values": [0, 1, 2, 3],
        },
        "expected": {"F": [1.0 - 0.3 ** (s + 1) for s in range(4)]},
        "tolerance": 1e-8,
    },
    "two_param_small": {
        "description": "Two-parameter CDF, N = 3, n = 1, alpha = 0.1, beta = 0.3",
        "config": {
            "command": "cdf-two-param",
            "params": {"N": 3, "n": 1, "alpha": 0.1, "beta": 0.3, "s_min": 0.5, "s_max": 20.0, "points": 17},
        },
        "expected": {"monotone": True},
        "tolerance": 0.0,
    },
}
