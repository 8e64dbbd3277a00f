"""
CLI module for FieldForge
"""
