"""Utility package for welfareshare"""
