"""Integral controllers (local and global data)"""
