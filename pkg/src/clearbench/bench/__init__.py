"""Benchmark generation: sampling, question templates and ground truth."""

from clearbench.bench.generate import generate_benchmark, load_questions, write_benchmark
from clearbench.bench.instance import QuestionInstance
from clearbench.bench.prompts import Style, render_prompt
from clearbench.bench.questions import make_question
from clearbench.bench.sampling import GraphSpec, sample_graph
from clearbench.bench.tasks import DEFAULT_COUNTS, TASKS, QType
