"""fishersep: effective dimension of point clouds from Fisher separability."""

__version__ = "0.1.0"
