"""
CLI commands for FieldForge
"""
