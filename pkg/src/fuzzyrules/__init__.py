"""Explainable rule classifiers on fuzzy similarity tables.

The pipeline: normalize a tabular dataset, induce one minimal rule per
instance by consistence-preserving attribute-value reduction (plain or
key-set accelerated), extract a near-minimal rule subset, and classify by
best-matching rule.
"""

from .approximation import (FuzzySet, consistence_degree,
                            consistence_degree_restricted, lower_classic,
                            lower_robust, sig1, upper_classic, upper_robust)
from .classifier import (PredictionResult, RuleClassifier, TrainConfig,
                         load_model, predict, predict_batch, save_model,
                         train, train_bsrc)
from .evaluation import (EvalReport, TimingReport, benchmark_scaling,
                         cross_validate, welch_t_test)
from .extraction import (InducedRule, RuleSet, cover_degree_rules,
                         extract_gfrc, extract_lem2, extract_vcdomle,
                         rule_covers_instance, rule_covers_rule)
from .induction import (DiscernibilityVector, KeyState, Reduct, acvr_reduct,
                        build_key_state, cvr_reduct, discernibility_vector,
                        dvr_reduct, induce_all, reduct_is_valid, sig2)
from .operators import (LUKASIEWICZ, OperatorFamily, attribute_similarity,
                        degree, family, negator, residuated_implication,
                        s_residuation, subset_similarity, t_conorm, t_norm)
from .table import (FoldAssignment, FuzzyDecisionTable, drop_inconsistent,
                    from_normalized, load_csv, normalize_min_max, split_folds,
                    split_subgroups)

__version__ = "0.1.0"
