"""
Fibonacci FDE Solver - Source Package
"""
