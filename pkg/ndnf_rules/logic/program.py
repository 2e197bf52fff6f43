"""
Logic-program data model, evaluation and ASP-style text emission.

Programs are two-layer and stratified: conjunction heads are defined over input
atoms, label heads over conjunction heads or (after flattening) input atoms.
Negation is evaluated over complete input assignments, so no answer-set solving
is needed.
"""

import logging
import re
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import LATTICE_WEIGHT
from ..core.predicates import PredicateDef, parse_predicate
from ..errors import EvaluationError, TranslationError

logger = logging.getLogger(__name__)

AtomNamer = Callable[[int], str]

_NATURAL = re.compile(r'(\d+)')
_PREDICATE_START = re.compile(r'^a_\d+\s*=')


def default_atom_namer(k: int) -> str:
    return f"a_{k}"


def natural_key(name: str) -> Tuple:
    """Sort key that orders a_2 before a_10."""
    return tuple(int(part) if part.isdigit() else part for part in _NATURAL.split(name))


@dataclass(frozen=True)
class Rule:
    """head :- pos_body, not neg_body."""

    head: str
    pos_body: Tuple[str, ...] = ()
    neg_body: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'pos_body', tuple(sorted(set(self.pos_body), key=natural_key)))
        object.__setattr__(self, 'neg_body', tuple(sorted(set(self.neg_body), key=natural_key)))
        overlap = set(self.pos_body) & set(self.neg_body)
        if overlap:
            raise ValueError(f"Rule for {self.head} uses {sorted(overlap)} both positively and negatively")

    @property
    def length(self) -> int:
        return len(self.pos_body) + len(self.neg_body)

    @property
    def is_fact(self) -> bool:
        return self.length == 0

    def literals(self) -> List[str]:
        """Body literals ordered by atom, negated ones rendered as ``not a``."""
        tagged = [(atom, atom) for atom in self.pos_body] + [(atom, f"not {atom}") for atom in self.neg_body]
        return [text for _, text in sorted(tagged, key=lambda item: natural_key(item[0]))]

    def sort_key(self) -> Tuple:
        return natural_key(self.head), tuple(natural_key(lit) for lit in self.literals())

    def to_text(self) -> str:
        if self.is_fact:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(self.literals())}."


@dataclass(frozen=True)
class AnnotatedRule:
    """Annotated disjunction ``p0::h0 ; p1::h1 :- body.`` over one conjunction pattern."""

    heads: Tuple[Tuple[str, float], ...]
    pos_body: Tuple[str, ...] = ()

    def to_text(self) -> str:
        annotated = ' ; '.join(f"{p:.3f}::{h}" for h, p in self.heads)
        if not self.pos_body:
            return f"{annotated}."
        return f"{annotated} :- {', '.join(self.pos_body)}."

    @property
    def best_head(self) -> str:
        return max(self.heads, key=lambda item: item[1])[0]


@dataclass
class LogicProgram:
    """
    Emission target for extracted rules.

    Attributes:
        predicate_defs: Threshold predicate definitions (emitted first)
        rules: Definite rules with negation over lower strata
        label_heads: Output atoms in label order (t, l_k or class_k)
        annotated: Annotated disjunctions for mutex-tanh heads
        n_atoms: Number of input atoms a_0..a_{n-1}, when known
    """

    predicate_defs: List[PredicateDef] = field(default_factory=list)
    rules: List[Rule] = field(default_factory=list)
    label_heads: List[str] = field(default_factory=list)
    annotated: List[AnnotatedRule] = field(default_factory=list)
    n_atoms: Optional[int] = None

    @property
    def derived_heads(self) -> List[str]:
        return sorted({rule.head for rule in self.rules}, key=natural_key)


@dataclass(frozen=True)
class CompactnessReport:
    max_rule_length: int
    avg_rule_length: float
    num_rules: int


def tensor_to_rule(tensor: Sequence[float], head: str, atom_namer: AtomNamer = default_atom_namer) -> Rule:
    """
    Translate a lattice tensor into a rule: +6 gives a literal, -6 a negated literal.

    Raises:
        TranslationError: A value is not in {-6, 0, 6}
    """
    pos, neg = [], []
    for j, value in enumerate(np.asarray(tensor, dtype=float)):
        if value == LATTICE_WEIGHT:
            pos.append(atom_namer(j))
        elif value == -LATTICE_WEIGHT:
            neg.append(atom_namer(j))
        elif value != 0.0:
            raise TranslationError(j, float(value))
    rule = Rule(head=head, pos_body=tuple(pos), neg_body=tuple(neg))
    if rule.is_fact:
        logger.warning(f"All-zero tensor for {head} translated to the fact '{head}.'")
    return rule


def _stratified_values(program: LogicProgram, inputs: Mapping[str, np.ndarray]) -> Dict[str, np.ndarray]:
    by_head: Dict[str, List[Rule]] = {}
    for rule in program.rules:
        by_head.setdefault(rule.head, []).append(rule)

    values: Dict[str, np.ndarray] = {}
    in_progress = set()
    n_rows = len(next(iter(inputs.values()))) if inputs else 1

    def value_of(atom: str) -> np.ndarray:
        if atom in values:
            return values[atom]
        if atom in by_head:
            if atom in in_progress:
                raise EvaluationError(f"Recursive definition through {atom}")
            in_progress.add(atom)
            result = np.zeros(n_rows, dtype=bool)
            for rule in by_head[atom]:
                body = np.ones(n_rows, dtype=bool)
                for a in rule.pos_body:
                    body &= value_of(a)
                for a in rule.neg_body:
                    body &= ~value_of(a)
                result |= body
            in_progress.discard(atom)
        elif atom in inputs:
            result = np.asarray(inputs[atom], dtype=bool)
        else:
            raise EvaluationError(f"Atom {atom} is neither assigned nor defined")
        values[atom] = result
        return result

    for head in list(by_head) + list(program.label_heads):
        if head in by_head:
            value_of(head)
        else:
            values.setdefault(head, np.zeros(n_rows, dtype=bool))
    return values


def eval_program(program: LogicProgram, assignment: Mapping[str, bool]) -> Dict[str, bool]:
    """
    Evaluate a program on one complete bivalent assignment of its input atoms.

    Args:
        program: Program to evaluate
        assignment: Truth value of every input atom used by the program

    Returns:
        Truth value of every derived and label head; for annotated programs the
        label chosen by the matching annotated rule is the only true label

    Raises:
        EvaluationError: A body atom is neither assigned nor defined
    """
    inputs = {atom: np.array([bool(value)]) for atom, value in assignment.items()}
    values = _stratified_values(program, inputs)
    result = {head: bool(column[0]) for head, column in values.items() if head not in inputs}
    if program.annotated:
        chosen = _choose_annotated(program, {h: v for h, v in result.items()}, program.label_heads)
        for head in program.label_heads:
            result[head] = head == chosen
    return result


def _choose_annotated(program: LogicProgram, values: Mapping[str, bool], label_heads: Sequence[str]) -> str:
    """Most probable head of the annotated rule nearest (smallest symmetric difference) to the firing conjunctions."""
    active = {head for head, value in values.items() if value and head not in label_heads}
    best, best_distance = None, None
    for rule in program.annotated:
        distance = len(active.symmetric_difference(rule.pos_body))
        if best_distance is None or distance < best_distance:
            best, best_distance = rule, distance
    return best.best_head


def input_assignment(program: LogicProgram, x_bool: np.ndarray, x_real: Optional[np.ndarray] = None,
                     atom_namer: AtomNamer = default_atom_namer) -> Dict[str, np.ndarray]:
    """
    Bivalent input atoms for a batch: predicate atoms from the program's own
    definitions, then boolean features at offset len(predicate_defs).
    """
    columns: Dict[str, np.ndarray] = {}
    for definition in program.predicate_defs:
        if x_real is None:
            raise EvaluationError('program defines threshold predicates but no real features were given')
        columns[atom_namer(definition.atom)] = np.asarray(x_real)[:, definition.feature] > definition.threshold
    offset = len(program.predicate_defs)
    x_bool = np.atleast_2d(np.asarray(x_bool, dtype=float))
    for j in range(x_bool.shape[1]):
        columns[atom_namer(offset + j)] = x_bool[:, j] > 0
    return columns


def eval_program_batch(program: LogicProgram, inputs: Mapping[str, np.ndarray]) -> np.ndarray:
    """
    Vectorised evaluation over a batch.

    Args:
        program: Program to evaluate
        inputs: Boolean column per input atom

    Returns:
        [B x L] boolean matrix over program.label_heads; for annotated programs a
        one-hot matrix of the chosen class
    """
    values = _stratified_values(program, inputs)
    n_rows = len(next(iter(inputs.values()))) if inputs else 1
    if not program.annotated:
        if not program.label_heads:
            return np.zeros((n_rows, 0), dtype=bool)
        return np.stack([values[head] for head in program.label_heads], axis=1)

    derived = [h for h in program.derived_heads if h not in program.label_heads]
    chosen = np.zeros((n_rows, len(program.label_heads)), dtype=bool)
    index = {head: k for k, head in enumerate(program.label_heads)}
    for row in range(n_rows):
        row_values = {h: bool(values[h][row]) for h in derived}
        chosen[row, index[_choose_annotated(program, row_values, program.label_heads)]] = True
    return chosen


def eval_program_dataset(program: LogicProgram, dataset) -> np.ndarray:
    """Predictions of a program on a dataset, in the dataset's label layout."""
    inputs = input_assignment(program, dataset.x_bool, dataset.x_real if program.predicate_defs else None)
    matrix = eval_program_batch(program, inputs)
    task = getattr(dataset.task, 'value', dataset.task)
    if task == 'multiclass':
        return np.argmax(matrix, axis=1)
    if task == 'binary':
        return matrix[:, 0].astype(int) if matrix.shape[1] else np.zeros(len(dataset), dtype=int)
    return matrix.astype(int)


def emit_asp(program: LogicProgram) -> str:
    """
    Render a program as text: predicate definitions, rules sorted by head then body,
    then annotated disjunctions. An empty program renders as the empty string.
    """
    lines = [definition.to_line() for definition in sorted(program.predicate_defs, key=lambda d: d.atom)]
    unique = {rule.to_text(): rule for rule in program.rules}
    lines += [rule.to_text() for rule in sorted(unique.values(), key=Rule.sort_key)]
    lines += [rule.to_text() for rule in program.annotated]
    return '\n'.join(lines) + '\n' if lines else ''


def _statements(text: str) -> Iterable[str]:
    buffer: List[str] = []
    for raw_line in text.splitlines():
        line = raw_line.split('%', 1)[0].strip()
        if not line or line.startswith('['):
            continue
        if not buffer and _PREDICATE_START.match(line):
            yield line
            continue
        buffer.append(line)
        if line.endswith('.'):
            yield ' '.join(buffer)
            buffer = []
    if buffer:
        raise ValueError(f"Unterminated statement: {' '.join(buffer)!r}")


def _parse_body(body: str) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    pos, neg = [], []
    for literal in (part.strip() for part in body.split(',') if part.strip()):
        if literal.startswith('not '):
            neg.append(literal[4:].strip())
        else:
            pos.append(literal)
    return tuple(pos), tuple(neg)


def parse_asp(text: str) -> LogicProgram:
    """
    Parse the dialect written by emit_asp.

    ``%`` comments, blank lines and bracketed debug lines are ignored. Label heads
    are the heads that are not conjunction heads (conj_i / nconj_i).
    """
    program = LogicProgram()
    labels = set()
    for statement in _statements(text):
        if _PREDICATE_START.match(statement):
            program.predicate_defs.append(parse_predicate(statement))
            continue
        statement = statement[:-1].strip()
        head_part, _, body = statement.partition(':-')
        if '::' in head_part:
            heads = []
            for item in head_part.split(';'):
                prob, _, head = item.strip().partition('::')
                heads.append((head.strip(), float(prob)))
                labels.add(head.strip())
            pos, neg = _parse_body(body)
            if neg:
                raise ValueError(f"Annotated rule bodies cannot use negation: {statement!r}")
            program.annotated.append(AnnotatedRule(heads=tuple(heads), pos_body=pos))
            continue
        head = head_part.strip()
        pos, neg = _parse_body(body)
        program.rules.append(Rule(head=head, pos_body=pos, neg_body=neg))
        if not head.startswith(('conj_', 'nconj_')):
            labels.add(head)
    program.label_heads = sorted(labels, key=natural_key)
    return program


def compactness(program: LogicProgram, conj_only: bool = False) -> CompactnessReport:
    """
    Rule-length and rule-count metrics.

    Args:
        program: Program to measure
        conj_only: Count only conjunction rules (used for multiclass programs)

    Returns:
        CompactnessReport (all zeros for an empty program)
    """
    unique = {rule.to_text(): rule for rule in program.rules}.values()
    rules = [r for r in unique if not conj_only or r.head.startswith(('conj_', 'nconj_'))]
    if not rules:
        return CompactnessReport(max_rule_length=0, avg_rule_length=0.0, num_rules=0)
    lengths = [rule.length for rule in rules]
    return CompactnessReport(max_rule_length=max(lengths), avg_rule_length=float(np.mean(lengths)),
                             num_rules=len(rules))
