# Detectors module - BOCPD y baselines
