"""Procedural soil texture so mosaics can be generated without external assets."""

import numpy as np

from .seeding import seeded_rng

# dark loam to dry clay, RGB
_SOIL_DARK = np.array([62, 42, 26], dtype=np.float64)
_SOIL_LIGHT = np.array([150, 110, 72], dtype=np.float64)


def _fade(t: np.ndarray) -> np.ndarray:
    """Smoothstep 6t^5 - 15t^4 + 10t^3."""
    return t * t * t * (t * (t * 6 - 15) + 10)


def value_noise_2d(height: int, width: int, scale: float,
                   rng: np.random.Generator) -> np.ndarray:
    """Smoothly interpolated lattice noise in [0, 1] of shape ``(height, width)``."""
    scale = max(scale, 1.0)
    gh = int(np.ceil(height / scale)) + 2
    gw = int(np.ceil(width / scale)) + 2
    grid = rng.random((gh, gw))

    y = np.linspace(0, (height - 1) / scale, height)
    x = np.linspace(0, (width - 1) / scale, width)
    yi = np.floor(y).astype(int)
    xi = np.floor(x).astype(int)
    yf = _fade(y - yi)[:, None]
    xf = _fade(x - xi)[None, :]

    v00 = grid[yi[:, None], xi[None, :]]
    v01 = grid[yi[:, None], xi[None, :] + 1]
    v10 = grid[yi[:, None] + 1, xi[None, :]]
    v11 = grid[yi[:, None] + 1, xi[None, :] + 1]
    top = v00 + xf * (v01 - v00)
    bottom = v10 + xf * (v11 - v10)
    return top + yf * (bottom - top)


def fbm_2d(height: int, width: int, rng: np.random.Generator, octaves: int = 5,
           base_scale: float = 48.0, persistence: float = 0.5,
           lacunarity: float = 2.0) -> np.ndarray:
    """Layered value noise normalised back to [0, 1]."""
    result = np.zeros((height, width), dtype=np.float64)
    amplitude, total, scale = 1.0, 0.0, base_scale
    for _ in range(octaves):
        result += amplitude * value_noise_2d(height, width, scale, rng)
        total += amplitude
        amplitude *= persistence
        scale /= lacunarity
    return result / total


def procedural_soil(height: int, width: int, seed: int = 0) -> np.ndarray:
    """Brown-hued seeded soil texture as ``uint8`` RGB."""
    rng = seeded_rng(seed, 0x5011)
    shade = fbm_2d(height, width, rng)
    grain = rng.random((height, width)) * 0.15
    t = np.clip(shade * 0.85 + grain, 0.0, 1.0)[:, :, None]
    rgb = _SOIL_DARK + t * (_SOIL_LIGHT - _SOIL_DARK)
    return np.clip(np.rint(rgb), 0, 255).astype(np.uint8)
