"""
Command tools - one per CLI subcommand, each returning a success/error dict
"""
