"""
Shared utilities: logging, seeding, file I/O
"""
