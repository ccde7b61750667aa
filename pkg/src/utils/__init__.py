"""
Utility functions and helpers
"""

from .logging_setup import setup_logging
from .paths import get_log_level, get_output_base, get_train_defaults, load_config

__all__ = ['setup_logging', 'get_log_level', 'get_output_base', 'get_train_defaults', 'load_config']
