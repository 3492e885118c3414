"""Task catalogue: levels, dependencies, question templates and default counts."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class Level(str, enum.Enum):
    BASIC = "Basic"
    INTERMEDIATE = "Intermediate"
    ADVANCED = "Advanced"


class QType(str, enum.Enum):
    FA = "FA"  # find all
    FO = "FO"  # find one
    HM = "HM"  # how many
    CS = "CS"  # choice selection
    YN = "YN"  # yes or no
    EX = "EX"  # existence

    @property
    def subjective(self) -> bool:
        return self in (QType.FA, QType.FO)

    @property
    def long_name(self) -> str:
        return _QTYPE_NAMES[self]


_QTYPE_NAMES = {
    QType.FA: "FindAll",
    QType.FO: "FindOne",
    QType.HM: "HowMany",
    QType.CS: "ChoiceSelection",
    QType.YN: "YesNo",
    QType.EX: "Existence",
}

OBJECTIVE = (QType.HM, QType.CS, QType.YN, QType.EX)


@dataclass(frozen=True)
class TaskInfo:
    code: str
    name: str
    level: Level
    prerequisites: tuple = field(default=())


TASKS = {
    t.code: t
    for t in [
        TaskInfo("SN", "Single node", Level.BASIC),
        TaskInfo("SE", "Single edge", Level.BASIC, ("SN",)),
        TaskInfo("2NR", "Two nodes relationship", Level.BASIC, ("SE",)),
        TaskInfo("3NR", "Three nodes relationship", Level.BASIC, ("2NR",)),
        TaskInfo("PT", "Path", Level.BASIC, ("SE",)),
        TaskInfo("CL", "Cycle", Level.BASIC, ("PT",)),
        TaskInfo("TO", "Topological ordering", Level.BASIC, ("2NR", "CL")),
        TaskInfo("BLP", "Blocked path", Level.INTERMEDIATE, ("3NR", "PT")),
        TaskInfo("DS", "D-separation", Level.INTERMEDIATE, ("BLP",)),
        TaskInfo("MEC", "Markov equivalent class", Level.INTERMEDIATE, ("3NR",)),
        TaskInfo("MB", "Markov blanket", Level.INTERMEDIATE, ("2NR",)),
        TaskInfo("DP", "Directed path", Level.INTERMEDIATE, ("PT",)),
        TaskInfo("BKP", "Backdoor path", Level.INTERMEDIATE, ("3NR", "PT")),
        TaskInfo("CC", "C-component", Level.INTERMEDIATE, ("SE",)),
        TaskInfo("CT", "C-tree", Level.INTERMEDIATE, ("CC", "MRS")),
        TaskInfo("CF", "C-forest", Level.INTERMEDIATE, ("CT",)),
        TaskInfo("MRS", "Maximal root set", Level.INTERMEDIATE, ("2NR",)),
        TaskInfo("BAS", "Backdoor adjustment set", Level.ADVANCED, ("BKP", "DS")),
        TaskInfo("FAS", "Frontdoor adjustment set", Level.ADVANCED, ("BKP", "DP")),
        TaskInfo("CEI", "Causal effect identification", Level.ADVANCED, ("CF", "CC")),
    ]
}

TASK_ORDER = tuple(TASKS)


def _row(fa=0, fo=0, hm=0, cs=0, yn=0, ex=0):
    cells = {QType.FA: fa, QType.FO: fo, QType.HM: hm, QType.CS: cs, QType.YN: yn, QType.EX: ex}
    return {q: n for q, n in cells.items() if n}


# per-(task, question type) question counts of the released benchmark
DEFAULT_COUNTS = {
    "SN": _row(fa=48, hm=48, cs=48, yn=48),
    "SE": _row(fa=48, hm=48, cs=48, yn=48),
    "2NR": _row(fa=24, hm=24, cs=24, yn=24, ex=24),
    "3NR": _row(fa=24, hm=24, cs=24, yn=24, ex=24),
    "PT": _row(fa=24, fo=72, hm=24, cs=24, yn=24),
    "CL": _row(fo=36, cs=36, yn=36, ex=36),
    "TO": _row(fo=48, cs=48, yn=48),
    "BLP": _row(fo=72, cs=36, yn=36),
    "DS": _row(fo=60, cs=30, yn=30),
    "MEC": _row(fo=60, yn=60),
    "MB": _row(fo=48, cs=48, yn=48),
    "DP": _row(fa=24, hm=24, cs=24, yn=24, ex=24),
    "BKP": _row(fa=24, fo=48, hm=24, cs=24, yn=24),
    "CC": _row(fa=36, hm=36, yn=36),
    "CT": _row(yn=120),
    "CF": _row(yn=120),
    "MRS": _row(fa=48, hm=48, cs=48, yn=48),
    "BAS": _row(fo=72, cs=24, yn=24, ex=12),
    "FAS": _row(fo=72, cs=24, yn=24, ex=24),
    "CEI": _row(yn=120),
}


def supported(task: str, qtype) -> bool:
    return QType(qtype) in DEFAULT_COUNTS.get(task, {})


# sub-variants a template can take; chosen per question
VARIANTS = {
    ("2NR", "*"): ("parents", "descendants", "children", "ancestors"),
    ("3NR", "*"): ("chain", "fork", "v-structure"),
    ("PT", QType.FO): ("one", "shortest", "longest"),
    ("BLP", QType.FO): ("valid", "minimal"),
    ("DS", QType.FO): ("valid", "minimal"),
    ("BKP", QType.FO): ("shortest", "longest"),
    ("BAS", QType.FO): ("valid", "minimal", "maximal"),
    ("FAS", QType.FO): ("valid", "minimal", "maximal"),
}


def variants_for(task: str, qtype) -> tuple:
    qtype = QType(qtype)
    return VARIANTS.get((task, qtype)) or VARIANTS.get((task, "*")) or ()


POLARITY_TASKS = {("SN", QType.CS), ("SE", QType.CS)}

_PLURAL = {"chain": "chains", "fork": "forks", "v-structure": "v-structures"}
_SELECT_WORDS = {
    "one": "one",
    "shortest": "the shortest",
    "longest": "the longest",
}
_SET_WORDS_BLP = {"valid": "one valid", "minimal": "the minimal"}
_SET_WORDS_ADJ = {"valid": "one valid", "minimal": "one minimal", "maximal": "one maximal"}

TEMPLATES = {
    ("SN", QType.FA): "List all nodes of this graph.",
    ("SN", QType.HM): "How many nodes does this graph have?",
    ("SN", QType.CS): "Which of the following {polarity} a node of this graph?",
    ("SN", QType.YN): "Is {v} a node of this graph?",
    ("SE", QType.FA): "List all edges of this graph.",
    ("SE", QType.HM): "How many edges does this graph have?",
    ("SE", QType.CS): "Which of the following {polarity} an edge of this graph?",
    ("SE", QType.YN): "Is {e} a edge of this graph?",
    ("2NR", QType.FA): "List all {relation} of {v}.",
    ("2NR", QType.HM): "How many {relation} does {v} have?",
    ("2NR", QType.CS): "Which of the following is one of {relation} of {v}?",
    ("2NR", QType.YN): "Is {u} one of {relation} of {v}?",
    ("2NR", QType.EX): "Does {v} have any {relation}?",
    ("3NR", QType.FA): "List all {kinds} of this graph.",
    ("3NR", QType.HM): "How many {kinds} does this graph have?",
    ("3NR", QType.CS): "Which of the following is a {kind} of this graph?",
    ("3NR", QType.YN): "Does {triple} form a {kind} in this graph?",
    ("3NR", QType.EX): "Are there any {kind} of this graph?",
    ("PT", QType.FA): "Find all path from {x} to {y}.",
    ("PT", QType.FO): "Find {select} path from {x} to {y}.",
    ("PT", QType.HM): "How many paths are there from {x} to {y}.",
    ("PT", QType.CS): "Which of the following is a path from {x} to {y}?",
    ("PT", QType.YN): "Is {path} a path from {x} to {y}?",
    ("CL", QType.FO): "Find one cycle in this graph.",
    ("CL", QType.CS): "Which of the following is a cycle in this graph?",
    ("CL", QType.YN): "Is {cycle} a cycle in this graph?",
    ("CL", QType.EX): "Are there any cycle in this graph?",
    ("TO", QType.FO): "Find one valid topological ordering in this graph.",
    ("TO", QType.CS): "Which of the following is a valid topological ordering of this graph?",
    ("TO", QType.YN): "Is {order} a valid topological ordering of this graph?",
    ("BLP", QType.FO): "Find {select} nodeset that can block {path}.",
    ("BLP", QType.CS): "Which of the following nodesets can block {path}?",
    ("BLP", QType.YN): "Can {path} be blocked by {Z}?",
    ("DS", QType.FO): "Find {select} nodeset that can d-separate {x} and {y}.",
    ("DS", QType.CS): "Which of the following nodesets can d-separate {x} and {y}?",
    ("DS", QType.YN): "Are {x} and {y} d-separated by {Z}?",
    ("MEC", QType.FO): (
        "Find another graph that belongs to the same markov equivalent class of the given graph."
    ),
    ("MEC", QType.YN): (
        "Given another DAG with nodes {other_nodes} and directed edges {other_edges}, "
        "do these two graphs belong to the same markov equivalent class?"
    ),
    ("MB", QType.FO): "What is the markov blanket of {v}.",
    ("MB", QType.CS): "Which of the following is the markov blanket of {v}?",
    ("MB", QType.YN): "Is {S} the markov blanket of {v}?",
    ("DP", QType.FA): "Find all directed paths from {x} to {y}.",
    ("DP", QType.HM): "How many directed paths are there from {x} to {y}?",
    ("DP", QType.CS): "Which of the following is a directed path from {x} to {y}?",
    ("DP", QType.YN): "Is {path} a directed path from {x} to {y}?",
    ("DP", QType.EX): "Is there a directed path from {x} to {y}?",
    ("BKP", QType.FA): "Find all backdoor paths from {x} to {y}.",
    ("BKP", QType.FO): "Find {select} backdoor path from {x} to {y}.",
    ("BKP", QType.HM): "How many backdoor paths are there from {x} to {y}.",
    ("BKP", QType.CS): "Which of the following is a backdoor path from {x} to {y}?",
    ("BKP", QType.YN): "Is {path} a backdoor path {x} to {y}?",
    ("CC", QType.FA): (
        "It can be uniquely partitioned into a set C(G) of subgraphs, each a maximal "
        "C-component. Write down such partition of the given graph."
    ),
    ("CC", QType.HM): (
        "It can be uniquely partitioned into a set C(G) of subgraphs, each a maximal "
        "C-component. How many subgraphs are there in C(G)?"
    ),
    ("CC", QType.YN): "Is it a C-component?",
    ("CT", QType.YN): "Is it a C-tree?",
    ("CF", QType.YN): "Is it a C-forest?",
    ("MRS", QType.FA): "Find the maximal root set of this graph.",
    ("MRS", QType.HM): "How many nodes are there in the maximal root set of this graph?",
    ("MRS", QType.CS): "Which of the following options is the maximal root set of this graph?",
    ("MRS", QType.YN): "Is {S} the maximal root set of this graph?",
    ("BAS", QType.FO): "Find {select} backdoor adjustment set for {x} and {y}.",
    ("BAS", QType.CS): (
        "Which of the following sets is a valid backdoor adjustment set for {x} and {y}?"
    ),
    ("BAS", QType.YN): "Is {Z} a valid backdoor adjustment set for {x} and {y}?",
    ("BAS", QType.EX): "Does there exist a valid backdoor adjustment set for {x} and {y}?",
    ("FAS", QType.FO): "Find {select} frontdoor adjustment set for {x} and {y}.",
    ("FAS", QType.CS): (
        "Which of the following sets is a valid frontdoor adjustment set for {x} and {y}?"
    ),
    ("FAS", QType.YN): "Is {Z} a valid frontdoor adjustment set for {x} and {y}?",
    ("FAS", QType.EX): "Does there exist a valid frontdoor adjustment set for {x} and {y}?",
    ("CEI", QType.YN): "Can the causal effect of {x} on {y} be identified or not?",
}


def fill_template(task: str, qtype, **fields) -> str:
    qtype = QType(qtype)
    text = TEMPLATES[(task, qtype)]
    if "kind" in fields:
        fields.setdefault("kinds", _PLURAL[fields["kind"]])
    if "select" in fields:
        words = _SELECT_WORDS
        if task in ("BLP", "DS"):
            words = _SET_WORDS_BLP
        elif task in ("BAS", "FAS"):
            words = _SET_WORDS_ADJ
        fields["select"] = words[fields["select"]]
    return text.format(**fields)


# dependency chains examined by the task-dependence criterion
DEFAULT_CHAINS = (("CC", "CT", "CF"), ("3NR", "BKP", "BAS"), ("3NR", "BLP", "DS"))

DEFINITION_TASKS = ("3NR", "PT", "BLP", "BKP", "CC", "MRS", "FAS")
