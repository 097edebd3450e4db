"""
Signal, graph and trace file adapters
"""
