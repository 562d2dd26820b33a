# Superficie HTTP del toolkit hecke
