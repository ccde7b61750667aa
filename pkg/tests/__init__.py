"""
Test suite for the Fibonacci FDE solver
"""
