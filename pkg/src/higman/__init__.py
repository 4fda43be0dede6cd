"""Word problem, square complex and flat explorer for Higman-like groups."""
from .words import HigmanGroup, HigmanParams, format_word, parse_word

__all__ = ["HigmanGroup", "HigmanParams", "format_word", "parse_word"]
__version__ = "0.1.0"
