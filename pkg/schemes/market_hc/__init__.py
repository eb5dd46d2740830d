"""Double-auction market and its ablations"""
