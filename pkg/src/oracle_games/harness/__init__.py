"""Instance generators, adversaries, file formats and the command line."""
