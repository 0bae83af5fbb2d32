"""Election-tweet analytics and automated-propaganda detection."""
__version__ = "0.1.0"
