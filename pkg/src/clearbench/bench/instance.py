"""The serialised benchmark item."""

from __future__ import annotations

from dataclasses import dataclass, field

from clearbench.bench.tasks import TASKS, QType
from clearbench.graph import MixedGraph

CHOICE_LABELS = ("A", "B", "C", "D")


@dataclass
class QuestionInstance:
    id: str
    task: str
    qtype: QType
    graph: MixedGraph
    prompt_core: str
    ground_truth: object
    seed: int = 0
    choices: list | None = None  # [{"label": "A", "text": ...}, ...]
    polarity: str | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.qtype = QType(self.qtype)

    @property
    def level(self) -> str:
        return TASKS[self.task].level.value

    @property
    def variant(self):
        return self.params.get("variant")

    def to_dict(self) -> dict:
        out = {
            "id": self.id,
            "task": self.task,
            "level": self.level,
            "qtype": self.qtype.value,
            "polarity": self.polarity,
            "graph": self.graph.to_dict(),
            "prompt_core": self.prompt_core,
        }
        if self.choices is not None:
            out["choices"] = self.choices
        out.update(
            ground_truth=self.ground_truth,
            seed=self.seed,
            n_v=len(self.graph.nodes),
            n_e=self.graph.n_edges,
            params=self.params,
        )
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "QuestionInstance":
        return cls(
            id=data["id"],
            task=data["task"],
            qtype=QType(data["qtype"]),
            graph=MixedGraph.from_dict(data["graph"]),
            prompt_core=data["prompt_core"],
            ground_truth=data["ground_truth"],
            seed=data.get("seed", 0),
            choices=data.get("choices"),
            polarity=data.get("polarity"),
            params=data.get("params", {}),
        )
