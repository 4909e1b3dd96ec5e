"""fnkit: function/integration models, adapter generation and a deterministic
service-oriented middleware simulator."""

__version__ = "0.1.0"
