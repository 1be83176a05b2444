"""Visco-acoustic frequency-domain waveform inversion over complex-valued models."""

__version__ = '0.3.0'
