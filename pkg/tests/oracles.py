"""Independently derived expectations used by the test suite.

Everything in this module is written without importing ``haiproto`` so that the
package under test cannot influence the expected values.  The classifier oracle
is a deliberately naive brute-force implementation; the tables below were
derived by hand from the shipped catalog design and frozen here.
"""

from __future__ import annotations


# --------------------------------------------------------------------------
# Brute-force nearest-centroid oracle.
# --------------------------------------------------------------------------


def oracle_classify(
    examples: list[tuple[tuple[float, ...], str]], point: tuple[float, ...]
) -> str:
    """Classify ``point`` by the nearest per-label centroid.

    Centroids are coordinate-wise ``sum/len``; distances are squared
    Euclidean computed in coordinate order; ties break to the
    lexicographically smallest label.  Raises ``ValueError`` on an empty
    example set.
    """
    if not examples:
        raise ValueError("no training examples")
    by_label: dict[str, list[tuple[float, ...]]] = {}
    for vector, label in examples:
        by_label.setdefault(label, []).append(vector)
    best_label: str | None = None
    best_dist: float | None = None
    for label in sorted(by_label):
        vectors = by_label[label]
        dims = len(vectors[0])
        centroid = tuple(
            sum(vector[d] for vector in vectors) / len(vectors) for d in range(dims)
        )
        dist = 0.0
        for a, b in zip(point, centroid):
            dist += (a - b) * (a - b)
        if best_dist is None or dist < best_dist:
            best_dist = dist
            best_label = label
    assert best_label is not None
    return best_label


# Six-point demo dataset: two points per label, chosen so every training point
# is strictly nearest to its own centroid.
SIX_POINT_EXAMPLES: list[tuple[tuple[float, ...], str]] = [
    ((0.0, 0.0), "happy"),
    ((10.0, 10.0), "sad"),
    ((5.0, 5.0), "calm"),
    ((1.0, 1.0), "happy"),
    ((9.0, 9.0), "sad"),
    ((4.0, 4.0), "calm"),
]

# Hand-checked: centroids happy=(0.5,0.5), sad=(9.5,9.5), calm=(4.5,4.5).
SIX_POINT_EXPECTED: dict[tuple[float, ...], str] = {
    (0.0, 0.0): "happy",
    (1.0, 1.0): "happy",
    (10.0, 10.0): "sad",
    (9.0, 9.0): "sad",
    (5.0, 5.0): "calm",
    (4.0, 4.0): "calm",
    (2.0, 2.0): "happy",  # d2(happy)=4.5 < d2(calm)=12.5
    (3.0, 2.5): "calm",  # d2(calm)=6.25 < d2(happy)=10.25
    (7.0, 7.0): "calm",  # exact tie with sad (12.5 each); lexicographic break
}

# Tie case: centroids a=(2,0), b=(0,0); (1,0) is equidistant; "a" < "b" fails,
# lexicographic tie-break picks "a".
TIE_EXAMPLES: list[tuple[tuple[float, ...], str]] = [
    ((0.0, 0.0), "b"),
    ((2.0, 0.0), "a"),
]
TIE_POINT: tuple[float, ...] = (1.0, 0.0)
TIE_EXPECTED = "a"


# --------------------------------------------------------------------------
# Catalog expectations (hand-derived, frozen).
# --------------------------------------------------------------------------

# The canonical action vocabulary that must exist in the shipped catalog.
CORE_ACTIONS: frozenset[str] = frozenset(
    {
        "req-class_selection",
        "select-class",
        "req-new_class_sample",
        "req-class_sample",
        "req-sample_class",
        "req-gsample_class",
        "req-sel_sample_class",
        "annotate-sample",
        "show-policy",
        "give-evaluative_advice",
        "modify-prediction",
        "show-candidate_samples",
        "select-sample",
        "modify-sample",
        "generate-sample",
        "modify-mparams",
        "modify-features",
        "req-prediction_evaluation",
        "evaluate-prediction",
        "show-prediction_XAI",
    }
)

# The canonical pattern rows: name -> exact action sequence.
CORE_PATTERNS: dict[str, list[str]] = {
    "class-selection": ["req-class_selection", "select-class"],
    "new_sample": ["req-new_sample", "generate-sample"],
    "new_class_sample": ["req-new_class_sample", "generate-class_sample"],
    "sample-annotation": ["req-sample_class", "annotate-sample"],
    "new_sample-annotation": ["req-new_sample", "req-gsample_class"],
    "candidate_samples": ["req-candidate_samples", "show-candidate_samples"],
    "sample-modification": ["req-modified_sample", "modify-sample"],
    "feature-modification": ["req-modified_feature", "modify-features"],
    "parameter-modification": ["req-mparam-modification", "modify-mparams"],
    "prediction-modification": ["annotate-sample", "modify-prediction"],
    "policy-visualization": ["show-policy"],
    "informative_advice": ["req-informative_advice", "give-informative_advice"],
    "evaluative_advice": ["req-evaluative_advice", "give-evaluative_advice"],
    "prediction-based_XAI": ["req-prediction_XAI", "show-prediction_XAI"],
    "outcome-evaluation": ["req-outcome_evaluation", "evaluate-outcome"],
    "prediction_parameters": ["req-prediction_params", "show-prediction_params"],
    "turn_taking-evaluation": [
        "generate-and-turn",
        "capture-and-generate",
        "evaluate-outcome",
    ],
    "prediction-with-XAI": [
        "select-sample",
        "show-prediction_XAI",
        "modify-annotation",
    ],
    "recommendations": [
        "req-recommendations",
        "show-recommendations",
        "evaluate-recommendation",
    ],
}

# Message label groups that must all be present in the shipped corpus.
CORE_MESSAGE_GROUPS: dict[str, list[str]] = {
    "A": ["A1", "A2", "A3", "A4", "A5", "A6"],
    "B": ["B1", "B2", "B3", "B4", "B5", "B6", "B7", "B8", "B9"],
    "C": ["C1", "C2", "C3", "C4", "C5"],
    "D": ["D1", "D2", "D3", "D4", "D5"],
    "E": ["E1", "E2", "E3"],
    "F": ["F1", "F2", "F3", "F4", "F5", "F6", "F7"],
    "G": ["G1", "G2", "G3", "G4", "G5"],
    "H": ["H1", "H2"],
}

# Patterns that must appear under these paradigm tags.
TAG_EXPECTATIONS: dict[str, frozenset[str]] = {
    "xai": frozenset(
        {
            "prediction-based_XAI",
            "prediction-with-XAI",
            "prediction_parameters",
            "policy-visualization",
        }
    ),
    "hitl": frozenset(
        {
            "sample-annotation",
            "informative_advice",
            "evaluative_advice",
            "parameter-modification",
        }
    ),
    "hi": frozenset(
        {"turn_taking-evaluation", "candidate_samples", "turn-taking_XAI"}
    ),
}

# Diff oracle for the two query-variant patterns: hand-derived alignment.
DIFF_SHARED: list[tuple[str, str]] = [
    ("user>model", "req-sample_class"),
    ("user>model", "modify-prediction"),
]
DIFF_ONLY_P1: list[tuple[str, str]] = [("model>user", "annotate-sample")]
DIFF_ONLY_P2: list[tuple[str, str]] = [("model>user", "req-modified_prediction")]

# Scenario composition oracle: name -> total message count.
SCENARIO_LENGTHS: dict[str, int] = {"D1": 6, "D2": 6, "D3": 6, "D4": 8}

# D1 runtime oracle: per-repetition message sequence and scripted payloads.
D1_MESSAGE_SEQUENCE: list[str] = ["A1", "A2", "A3", "A4", "A5", "A6"]
D1_SCRIPT_LABELS: list[str] = ["happy", "sad", "calm", "happy", "sad", "calm"]
D1_SCRIPT_POINTS: list[tuple[float, float]] = [
    (0.0, 0.0),
    (10.0, 10.0),
    (5.0, 5.0),
    (1.0, 1.0),
    (9.0, 9.0),
    (4.0, 4.0),
]

# D2 disagreement oracle: with happy=(0,0),(1,1) and sad=(10,10),(9,9) stored,
# the scripted point (9.5, 9.5) is nearest the "sad" centroid while the user
# reports "happy", forcing a "reject" evaluation.
D2_SEED_EXAMPLES: list[tuple[tuple[float, ...], str]] = [
    ((0.0, 0.0), "happy"),
    ((1.0, 1.0), "happy"),
    ((10.0, 10.0), "sad"),
    ((9.0, 9.0), "sad"),
]
D2_POINT: tuple[float, ...] = (9.5, 9.5)
D2_USER_LABEL = "happy"
D2_EXPECTED_PREDICTION = "sad"


# --------------------------------------------------------------------------
# Coherence expectations (hand-derived, frozen).
# --------------------------------------------------------------------------

# For every pattern: which message answers which request.  Deleting the
# answering message from the pattern must surface an unanswered-request
# diagnostic naming the request message.  Patterns absent from this table
# contain no answered request.
ANSWER_MAP: dict[str, list[tuple[str, str]]] = {
    "class-selection": [("A1", "A2")],
    "new_class_sample": [("A3", "A4")],
    "sample-annotation": [("A5", "A6")],
    "candidate_samples": [("B3", "B4")],
    "sample-modification": [("B8", "B9")],
    "informative_advice": [("C2", "C3")],
    "evaluative_advice": [("C4", "C5")],
    "prediction_parameters": [("D7", "D1")],
    "prediction-based_XAI": [("D4", "D5")],
    "turn_taking-evaluation": [("E1", "E2")],
    "outcome-evaluation": [("E4", "E3")],
    "recommendations": [("F1", "F2")],
    "feature-modification": [("F8", "F3")],
    "recommendation-XAI": [("F6", "F7")],
    "guided-prediction-with-XAI": [("G2", "G3")],
    "parameter-modification": [("G6", "G5")],
    "new_sample": [("Q1", "Q2")],
    "new_sample-annotation": [("Q1", "Q3")],
    "query-P1": [("Q4", "Q5")],
    "query-P2": [("Q4", "Q6"), ("Q6", "Q7")],
    "prediction-evaluation": [("PE1", "PE2")],
    "supervisor-oversight": [("MU2", "MU3")],
    "player-engagement": [("MU4", "MU5")],
    "subject-sample_annotation": [("CT1", "CT2")],
    "subject-prediction_XAI": [("CT3", "CT4")],
    "subject-prediction_evaluation": [("CT5", "CT6")],
    "subject-decision_request": [("CN1", "CN2")],
    "modification-request": [("CN4", "CN5")],
}

# Requests left open at the end of their pattern yet excused there: each is a
# counter-request that both answered an earlier request and introduced newly
# created material whose acceptance lies outside the pattern.  At scenario
# scope they must still be answered.
EXEMPT_OPEN: frozenset[tuple[str, str]] = frozenset(
    {
        ("new_sample-annotation", "Q3"),
        ("subject-decision_request", "CN2"),
    }
)

# Patterns made of provides only (no request anywhere), hand-listed.
PROVIDE_ONLY_EXPECTED: frozenset[str] = frozenset(
    {
        "decision-notice",
        "negotiation",
        "policy-visualization",
        "prediction-modification",
        "prediction-with-XAI",
        "turn-taking_XAI",
        "user-control-feedback",
        "user-feedback-control",
    }
)

# Agent roles the corpus declares (two are predeclared by the language).
ROLES_EXPECTED: frozenset[str] = frozenset(
    {"user", "model", "supervisor", "decision_subject", "human_controller"}
)
