# Test package for oreforge