"""Desk-scale insertion skill pipeline.

One-shot goal identification from a single demonstration, collision-free
motion planning on an occupancy grid, a learned skill-transition offset
regressor, and a demonstration-seeded sparse-reward RL insertion skill,
plus baselines and evaluation statistics.
"""

__version__ = "0.1.0"
