"""Canned sweeps behind ``dicke-star reproduce``.

Each preset is a list of ``(name, config dict)`` runs plus fit specs that
read one of those runs.  Reference fit values are the published ones; the
tables there label rows by the parity of ``n = n0 + np``, which for a single
central spin is the opposite parity of ``np``.
"""
from __future__ import annotations

NP_WINDOW = [20, None]
DYN_WINDOW = [24, None]
DYN_QUENCH = {"h": 1.0, "t_max": 200.0, "dt": 0.5, "avg_window": 0.5}
GAMMAS = [0.0, 0.05, 0.1]


def _fit(tag, source, model, x, y, where, ref, window=None, parity=None):
    d = {"tag": tag, "source": source, "model": model, "x": x, "y": y, "where": where,
         "reference": ref, "window": window or [None, None]}
    if parity:
        d["parity"] = parity
    return d


def fig2() -> tuple[list, list]:
    runs = [
        ("gap", {"experiment": "gap-scan", "gamma": GAMMAS, "delta": [0.5], "np": "3:199:2"}),
        ("edd", {"experiment": "edd-gap", "gamma": GAMMAS, "delta": [0.5], "np": "5:61:2",
                 "force_pair": True}),
    ]
    fits = [
        _fit("fig2a g=0", "gap", "POWER", "np", "gap", {"gamma": 0.0}, [0.0008, 0.391, 0.922], NP_WINDOW),
        _fit("fig2a g=0.05", "gap", "EXPDECAY", "np", "gap", {"gamma": 0.05}, [0.0, 0.605, 0.888], NP_WINDOW),
        _fit("fig2a g=0.1", "gap", "EXPDECAY", "np", "gap", {"gamma": 0.1}, [0.0, 0.644, 0.983], NP_WINDOW),
    ]
    for col, tag, refs in (("dE", "fig2b", [[0.001, 0.929, 0.559], [0.0, 0.080, 1.280], [0.0, 0.131, 1.285]]),
                           ("dLE", "fig2c", [[0.0014, 0.705, 0.644], [0.0, 0.086, 1.265], [0.0, 0.133, 1.288]])):
        for g, ref in zip(GAMMAS, refs):
            fits.append(_fit(f"{tag} g={g}", "edd", "EXPDECAY", "np", col, {"gamma": g}, ref, NP_WINDOW))
    return runs, fits


def fig5() -> tuple[list, list]:
    runs = [
        ("static_np", {"experiment": "static-entanglement", "gamma": GAMMAS, "delta": [0.0],
                       "np": "4:100:1", "n_prime": "half"}),
        ("static_nprime", {"experiment": "static-entanglement", "gamma": GAMMAS, "delta": [0.0],
                           "np": [50], "n_prime": "all"}),
        ("dynamic_np", {"experiment": "dynamics", "gamma": GAMMAS, "delta": [0.0], "np": "20:60:2",
                        "n_prime": "half", "quench": DYN_QUENCH, "quantities": ["E", "<E>"]}),
        ("dynamic_nprime", {"experiment": "dynamics", "gamma": GAMMAS, "delta": [0.0], "np": [50],
                            "n_prime": "all", "quench": DYN_QUENCH, "quantities": ["E", "<E>"]}),
    ]
    fits = []
    # (np parity, gamma) -> reference for E and <E>; "even np" rows are the "odd n" rows
    static = {
        "E": {("even", 0.0): [-0.609, 0.490], ("odd", 0.0): [-0.253, 0.489]},
        "<E>": {("even", 0.0): [-0.253, 0.489], ("odd", 0.0): [0.362, 0.495]},
    }
    for kind, tag, q in (("partial-trace", "fig5a", "E"), ("measured-average", "fig5b", "<E>")):
        for (par, g), ref in static[q].items():
            fits.append(_fit(f"{tag} g={g} np {par}", "static_np", "LOG2", "np", "value_log_negativity",
                             {"gamma": g, "kind": kind}, ref, NP_WINDOW, par))
    nprime = {
        "fig5c": ("partial-trace", [[2.218, 0.287, 0.798], [0.688, 0.247, 0.714], [0.449, 0.245, 0.706]]),
        "fig5d": ("measured-average", [[2.565, 0.327, 0.773], [0.725, 0.261, 0.690], [0.471, 0.258, 0.682]]),
    }
    for tag, (kind, refs) in nprime.items():
        for g, ref in zip(GAMMAS, refs):
            fits.append(_fit(f"{tag} g={g}", "static_nprime", "SATURATE", "n_prime", "value_log_negativity",
                             {"gamma": g, "kind": kind}, ref))
    dyn = {
        "E": {"even": [[-0.609, 0.490], [-0.564, 0.437], [-0.531, 0.436]],
              "odd": [[-0.253, 0.489], [-0.547, 0.434], [-0.505, 0.432]]},
        "<E>": {"even": [[-0.253, 0.489], [-0.249, 0.480], [-0.283, 0.494]],
                "odd": [[0.362, 0.495], [-0.276, 0.485], [-0.283, 0.494]]},
    }
    for q, tag in (("E", "fig5e"), ("<E>", "fig5f")):
        for par, refs in dyn[q].items():
            for g, ref in zip(GAMMAS, refs):
                fits.append(_fit(f"{tag} g={g} np {par}", "dynamic_np", "LOG2", "np", "value",
                                 {"gamma": g, "quantity": q, "record": "average"}, ref, DYN_WINDOW, par))
    dyn_nprime = {"E": ("fig5g", [[2.218, 0.287, 0.798], [1.943, 0.382, 0.722], [1.966, 0.394, 0.727]]),
                  "<E>": ("fig5h", [[2.565, 0.327, 0.773], [2.488, 0.471, 0.689], [2.517, 0.473, 0.704]])}
    for q, (tag, refs) in dyn_nprime.items():
        for g, ref in zip(GAMMAS, refs):
            fits.append(_fit(f"{tag} g={g}", "dynamic_nprime", "SATURATE", "n_prime", "value",
                             {"gamma": g, "quantity": q, "record": "average"}, ref))
    return runs, fits


def fig6() -> tuple[list, list]:
    runs = [
        ("large_center", {"experiment": "static-entanglement", "gamma": [0.0], "delta": [0.0],
                          "n0": "11:60", "np": [10], "n_prime": "half", "measured": False}),
        ("competing_gap", {"experiment": "gap-scan", "gamma": GAMMAS, "delta": [0.0, 0.2, 0.5, 0.8],
                           "n0": "np", "np": "2:50:2"}),
        ("competing_E", {"experiment": "static-entanglement", "gamma": GAMMAS, "delta": [0.0],
                         "n0": "np", "np": "2:50:2", "n_prime": "half", "measured": False}),
    ]
    # np = 10, so the parity of n is that of n0
    fits = [
        _fit("fig6a n odd", "large_center", "POWER", "n0", "value_log_negativity", {}, [-0.004, 7.624, 1.591],
             parity="odd"),
        _fit("fig6a n even", "large_center", "POWER", "n0", "value_log_negativity", {}, [-0.002, 1.123, 1.719],
             parity="even"),
    ]
    for g, ref in zip(GAMMAS, [[0.255, 1.274, 0.542], [-0.001, 0.562, 0.790], [-0.0006, 0.588, 0.934]]):
        fits.append(_fit(f"fig6b g={g}", "competing_gap", "EXPDECAY", "np", "gap",
                         {"gamma": g, "delta": 0.0}, ref))
    fits.append(_fit("fig6c g=0", "competing_E", "SATURATE", "np", "value_log_negativity",
                     {"gamma": 0.0}, [0.245, 0.650, 0.469], NP_WINDOW))
    return runs, fits


PRESETS = {"fig2": fig2, "fig5": fig5, "fig6": fig6}
