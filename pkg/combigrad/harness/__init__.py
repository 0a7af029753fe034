"""Datasets sintéticos, métricas, auditoría y corridas de experimentos."""
