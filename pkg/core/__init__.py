"""
Fused l1 trend filtering on directed graphs
"""
