# -*- coding: utf-8 -*-

# See the file LICENSE for copying permission.

# Class symbols
NO_OVERLAP = 0
OVERLAP = 1

# Paradigms
LOCAL = 'LL'
CENTRALIZED = 'CL'
FEDERATED = 'FL'
PARADIGMS = (LOCAL, CENTRALIZED, FEDERATED)

# Decision rule used while training (validation accuracy)
TRAINING_THRESHOLD = 0.5

# Random streams, combined with the master seed and a client id
COHORT_STREAM = 1
TEST_SPLIT_STREAM = 2
VALIDATION_STREAM = 3
SHUFFLE_STREAM = 4
REBALANCE_STREAM = 5
SHIFT_STREAM = 6
INIT_STREAM = 7

# Centralized training and un-keyed local training share stream 0
CENTRAL_STREAM = 0

# Threshold sources
LOCAL_TRAIN = 'local-train'
LOCAL_TRAIN_VALIDATION = 'local-train+validation'
POOLED_TRAIN_VALIDATION = 'pooled-train+validation'
LOCAL_VALIDATION = 'local-validation'

# Client failure policies
ABORT = 'abort'
DROP = 'drop'

# Significance table footnotes
PRIMARY = '†'      # uncorrected primary analysis
ROBUSTNESS = '‡'   # corrected over the LL family
PAIRED = '*'       # corrected paired Wilcoxon family

CHECKPOINT_VERSION = 1
MANIFEST_VERSION = 1

# J-curve aggregation rules
MEAN = 'mean'
MEDIAN = 'median'
WORST_CASE = 'worst_case'
AGGREGATION_RULES = (MEAN, MEDIAN, WORST_CASE)

# Significance tests
DELONG = 'delong'
WILCOXON = 'wilcoxon'

# Kappa weighting schemes
QUADRATIC = 'quadratic'
LINEAR = 'linear'
UNWEIGHTED = 'unweighted'

# Model kinds
LOGISTIC = 'logistic'
MLP = 'mlp'
RELU = 'relu'
