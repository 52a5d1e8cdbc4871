"""Parser, setup files, assumption checks, reports and the command line."""
