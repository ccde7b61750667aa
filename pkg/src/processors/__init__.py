"""
Basis, network, loss, training and reporting modules
"""
