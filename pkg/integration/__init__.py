"""Scenario orchestration"""
# run_scenario / run_comparison live in simulation_engine
