"""Group discrimination auditing for binary tabular data and classifier predictions."""

from .audit import AuditConfig, AuditReport, SweepResult, audit_dataset, audit_predictions, sweep_explanatory
from .data import CountsTable, Dataset, EGroup, PredictionCountsTable, Schema, counts, prediction_counts, stratify
from .scoring import (ModelQuality, OddsRatio, Score, dataset_score, global_score, group_score, model_group_score,
                      model_quality, odds_ratio)

__version__ = "0.1.0"

__all__ = [
    "AuditConfig", "AuditReport", "SweepResult", "audit_dataset", "audit_predictions", "sweep_explanatory",
    "CountsTable", "Dataset", "EGroup", "PredictionCountsTable", "Schema", "counts", "prediction_counts", "stratify",
    "ModelQuality", "OddsRatio", "Score", "dataset_score", "global_score", "group_score", "model_group_score",
    "model_quality", "odds_ratio",
]
