"""Bundled parameter presets.

`case_a`/`case_b`/`case_c` are three demand scenarios of increasing mean
workload (roughly 2, 16 and 45 concurrent viewers); (b) and (c) produce
clearly visible buzz spikes. `spectrum_buzz` / `spectrum_buzz_free` are small
capped configurations sized so the exact spectrum of the full generator is
cheap to compute; the buzz-free variant is the same chain with the buzz rate
collapsed onto the nominal one.
"""

from __future__ import annotations

from .params import ModelParams

PRESETS: dict[str, ModelParams] = {
    "case_a": ModelParams(
        beta1=4.762e-4, beta2=0.0032, gamma=0.0111, mu=5e-4,
        l=1e-4, a1=1e-7, a2=0.0667, i_max=1024, r_max=8192,
    ),
    "case_b": ModelParams(
        beta1=3.225e-5, beta2=0.0032, gamma=0.0020, mu=3.289e-5,
        l=1e-4, a1=1e-7, a2=0.0667, i_max=1024, r_max=8192,
    ),
    "case_c": ModelParams(
        beta1=2.439e-5, beta2=0.0032, gamma=0.0011, mu=2.5e-5,
        l=1e-4, a1=1e-7, a2=0.0667, i_max=1024, r_max=8192,
    ),
    "spectrum_buzz": ModelParams(
        beta1=0.1, beta2=0.8, gamma=0.7, mu=0.3,
        l=1.0, a1=0.006, a2=0.6, i_max=30, r_max=60,
    ),
    "spectrum_buzz_free": ModelParams(
        beta1=0.1, beta2=0.1, gamma=0.7, mu=0.3,
        l=1.0, a1=0.006, a2=0.6, i_max=30, r_max=60,
    ),
}


def get_preset(name: str) -> ModelParams:
    try:
        return PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise KeyError(f"unknown preset {name!r}; known presets: {known}") from None
