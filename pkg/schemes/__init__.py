"""Allocation schemes: integral controllers, HC double auction, equilibrium market"""
from .base import AllocationScheme, FeedbackLaw, SchemeDecision, StateSnapshot

__all__ = ['AllocationScheme', 'FeedbackLaw', 'SchemeDecision', 'StateSnapshot']
