"""Core configuration, environment loading and the error hierarchy."""
