"""
Output writers for scenario runs: CSV files and the stdout summary.
"""
