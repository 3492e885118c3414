"""Querying endpoints, grading answers and building reports."""

from clearbench.evaluation.aggregate import AccuracyTables, aggregate, random_baseline
from clearbench.evaluation.endpoints import ModelEndpoint, ask, call_model, resolve_endpoint
from clearbench.evaluation.extract import UNGRADABLE, extract_answer
from clearbench.evaluation.grading import GradeRecord, Verdict, grade, grade_response
from clearbench.evaluation.report import EvalReport, chain_verdict, criteria_report
