"""Test modules for the climate allocation simulator"""
