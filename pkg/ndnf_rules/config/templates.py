"""
Text templates used in the neural DNF toolkit.

This module contains the templates for experiment reports and rule-file
headers.
"""

# Header of the text rendering of an experiment report
REPORT_HEADER = """
=== Experiment: {name} ===
Dataset: {dataset} | Task: {task} | Seeds: {seeds} ({failed} failed)
Evaluation split: {eval_split} | Selection metric: {metric}
""".strip()

# Section titles, in rendering order
REPORT_SECTIONS = {
    'f1': 'Macro F1 (mean +/- ste)',
    'drop': 'F1 drop after discretisation (f1_train - f1_method)',
    'compactness': 'Program compactness (mean +/- ste)',
}

# Footer stating how the numbers were computed
REPORT_FOOTER = """
Notes:
  f1_train is the macro F1 of the trained, not yet discretised model on the
  {eval_split} split. f1_thresh and f1_disent are the macro F1 of the programs
  extracted by thresholding and by disentanglement on the same split, and each
  drop column is f1_train - f1_method.
  Values are mean +/- ste over successful seeds, with ste = sd / sqrt(n) and sd
  the sample standard deviation (ddof=1); ste is nan when n = 1.
""".strip()

# Comment block written at the top of every emitted rule file
RULE_FILE_HEADER = """
% {method} program for {dataset} (seed {seed})
% rules={num_rules} max_rule_length={max_rule_length} avg_rule_length={avg_rule_length:.3f}
""".strip()
