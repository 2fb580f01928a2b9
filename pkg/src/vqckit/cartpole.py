"""In-repo cart-pole balancing environment (Euler dynamics).

Standard published constants, fixed here so experiments are hermetic:
gravity 9.8, cart mass 1.0, pole mass 0.1, pole half-length 0.5, push force
10.0, timestep 0.02, termination at |angle| > 12 degrees or |position| > 2.4,
episode cap 500 steps, reward +1 per surviving step.
"""

from __future__ import annotations

import numpy as np

GRAVITY = 9.8
CART_MASS = 1.0
POLE_MASS = 0.1
TOTAL_MASS = CART_MASS + POLE_MASS
POLE_HALF_LENGTH = 0.5
POLE_MASS_LENGTH = POLE_MASS * POLE_HALF_LENGTH
FORCE_MAG = 10.0
TIMESTEP = 0.02
ANGLE_LIMIT = 12.0 * np.pi / 180.0
POSITION_LIMIT = 2.4
MAX_STEPS = 500


class CartPoleEnv:
    """State: (cart position, cart velocity, pole angle, pole angular
    velocity). Actions: 0 = push left, 1 = push right."""

    def __init__(self, seed: int | None = None):
        self._rng = np.random.default_rng(seed)
        self.state = np.zeros(4)
        self.steps = 0
        self.terminated = True  # must reset before stepping

    def reset(self, seed: int | None = None) -> np.ndarray:
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        self.state = self._rng.uniform(-0.05, 0.05, 4)
        self.steps = 0
        self.terminated = False
        return self.state.copy()

    def step(self, action: int) -> tuple[np.ndarray, float, bool]:
        if self.terminated:
            raise RuntimeError("step() called on a terminated episode; "
                               "call reset() first")
        if action not in (0, 1):
            raise ValueError(f"action must be 0 or 1, got {action}")
        x, x_dot, theta, theta_dot = self.state
        force = FORCE_MAG if action == 1 else -FORCE_MAG
        cos_t = np.cos(theta)
        sin_t = np.sin(theta)
        temp = (force + POLE_MASS_LENGTH * theta_dot ** 2 * sin_t) / TOTAL_MASS
        theta_acc = (GRAVITY * sin_t - cos_t * temp) / (
            POLE_HALF_LENGTH * (4.0 / 3.0 - POLE_MASS * cos_t ** 2 / TOTAL_MASS))
        x_acc = temp - POLE_MASS_LENGTH * theta_acc * cos_t / TOTAL_MASS

        x += TIMESTEP * x_dot
        x_dot += TIMESTEP * x_acc
        theta += TIMESTEP * theta_dot
        theta_dot += TIMESTEP * theta_acc
        self.state = np.array([x, x_dot, theta, theta_dot])
        self.steps += 1

        self.terminated = (abs(x) > POSITION_LIMIT or abs(theta) > ANGLE_LIMIT
                           or self.steps >= MAX_STEPS)
        return self.state.copy(), 1.0, self.terminated
