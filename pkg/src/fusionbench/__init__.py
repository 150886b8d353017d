"""fusionbench: multimodal ICU-admission prediction benchmark at desk scale."""

__version__ = "0.1.0"
