"""Built-in scenarios, in the same JSON shape the ``run`` command reads."""

import copy

_PLANE = {"n": 2, "sigma": "r"}
_SPACE3 = {"n": 3, "sigma": "r"}

_SCENARIOS = [
    {
        "name": "euclidean-plane",
        "description": "Flat plane: parabolic, so every density floor is eventually violated.",
        "manifold": _PLANE,
        "entropy": {"density": 1.0, "distribution": "saturating"},
        "bound_range": [0.01, 10.0],
        "simulation": {"r0": 2.0, "inner": 1.0, "outer": 4.0, "dt": 1e-4, "paths": 20000},
        "analyses": ["geometry", "entropy", "thm31", "thm33", "cor35", "simulate"],
    },
    {
        "name": "euclidean-3space",
        "description": "Flat 3-space with a small density floor, so the bound holds out to 1024.",
        "manifold": _SPACE3,
        "entropy": {"density": 1e-4, "distribution": "saturating"},
        "bound_range": [1.0, 1024.0],
        "thm32": {"C1": 1.0, "C2": 100.0},
        "simulation": {"r0": 2.0, "inner": 1.0, "outer": 3.0, "dt": 1e-4, "paths": 20000},
        "analyses": ["geometry", "entropy", "thm31", "thm32", "thm33", "simulate"],
    },
    {
        "name": "euclidean-5space",
        "description": "Flat 5-space; the bound with density 1e-3 first fails at R = 1250.",
        "manifold": {"n": 5, "sigma": "r"},
        "entropy": {"density": 1e-3, "distribution": "saturating"},
        "bound_range": [1.0, 1024.0],
        "analyses": ["geometry", "entropy", "thm31", "thm33"],
    },
    {
        "name": "hyperbolic-plane",
        "description": "Curvature -1 surface: transient despite being two-dimensional.",
        "manifold": {"n": 2, "sigma": "sinh(r)"},
        "entropy": {"distribution": "saturating"},
        "simulation": {"r0": 2.0, "inner": 1.0, "outer": 16.0, "dt": 2.5e-4, "paths": 20000,
                       "scale_steps": True},
        "recurrence": {"b_sequence": [4.0, 8.0, 16.0]},
        "analyses": ["geometry", "entropy", "thm33", "simulate", "recurrence-trend"],
    },
    {
        "name": "hyperbolic-3space",
        "description": "Curvature -1 space: Ricci decay fails, the capacity test says transient.",
        "manifold": {"n": 3, "sigma": "sinh(r)"},
        "entropy": {"distribution": "saturating"},
        "thm32": {"C1": 4.0, "C2": 100.0},
        "simulation": {"r0": 2.0, "inner": 1.0, "outer": 3.0, "dt": 1e-4, "paths": 20000},
        "analyses": ["geometry", "thm32", "thm33", "simulate"],
    },
    {
        "name": "de-sitter-slice",
        "description": "Flat slice t = 0 of exp(t) over a flat surface fiber; the slice is a plane.",
        "spacetime": {"f": "exp(t)", "n": 2, "fiber_sec_floor": 0.0},
        "slices": [0.0],
        "manifold": _PLANE,
        "entropy": {"density": 1.0},
        "analyses": ["prop44", "cor35"],
    },
    {
        "name": "einstein-de-sitter",
        "description": "Scale factor t^(2/3) over a flat 3-fiber, maximal hypersurface samples.",
        "spacetime": {"f": {"expr": "t^(2/3)", "domain": "(0, inf)"}, "n": 3, "fiber_sec_floor": 0.0},
        "samples": [
            {"tau": 0.5, "H": 0.0, "grad_tau_sq": 0.3},
            {"tau": 1.0, "H": 0.0, "grad_tau_sq": 0.0},
            {"tau": 2.0, "H": 0.0, "grad_tau_sq": 1.2},
        ],
        "manifold": _SPACE3,
        "entropy": {"density": 1e-4},
        "bound_range": [1.0, 1024.0],
        "analyses": ["thm43"],
    },
    {
        "name": "fischler-susskind",
        "description": "Unit density in flat 3-space: the bound fails beyond R = 3/4.",
        "manifold": _SPACE3,
        "entropy": {"density": 1.0},
        "bound_range": [0.1, 2.0],
        "analyses": ["entropy", "thm31"],
    },
    {
        "name": "cor35-plane-violation",
        "description": "Unit density on the plane: the violating radius is 1/2.",
        "manifold": _PLANE,
        "entropy": {"density": 1.0},
        "bound_range": [0.1, 2.0],
        "analyses": ["entropy", "cor35"],
    },
    {
        "name": "euclidean-plane-recurrence",
        "description": "Planar Brownian motion from r = 2: P(reach b before 1) = ln 2 / ln b -> 0.",
        "manifold": _PLANE,
        "simulation": {"r0": 2.0, "inner": 1.0, "outer": 256.0, "dt": 1e-3, "paths": 20000,
                       "scale_steps": True},
        "recurrence": {"b_sequence": [4.0, 16.0, 256.0]},
        "analyses": ["geometry", "recurrence-trend"],
    },
    {
        "name": "exponential-volume",
        "description": "Profile sinh(2r)/2: the exponential volume floor for density 0.9 sets in near R = 4.07.",
        "manifold": {"n": 3, "sigma": "sinh(2*r)/2"},
        "entropy": {"density": 0.9},
        "bound_range": [0.05, 20.0],
        "analyses": ["geometry", "entropy", "thm31"],
    },
]


def names():
    return [s["name"] for s in _SCENARIOS]


def get(name):
    for s in _SCENARIOS:
        if s["name"] == name:
            return copy.deepcopy(s)
    raise KeyError(name)


def catalog():
    """All built-in scenarios (deep copies)."""
    return [copy.deepcopy(s) for s in _SCENARIOS]
