"""Frozen contraction calibration constants.

Generated by ``python -m matprod.calibration``; do not edit by hand.
"""

GROUP_SIZE = 4
LAMBDA_BOUND = 0.7142857142857143
LAMBDA_CAP = 12.0
SWEEP_WORDS = 60
SWEEP_SAMPLES = 500
SWEEP_SEED = 20240801
