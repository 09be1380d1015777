"""
Ansense CLI Package

Command-line interface for the active next-best-view sensing simulator.
"""
