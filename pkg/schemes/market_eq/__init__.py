"""General-equilibrium market"""
