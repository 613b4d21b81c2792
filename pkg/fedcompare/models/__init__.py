# -*- coding:utf-8 -*-

# See the file LICENSE for copying permission.

from fedcompare.models.base import BaseModel, ModelDiff, Difference
from fedcompare.models.dataset import (Example, LabeledDataset, ClientSpec,
                                       ClientSplit, SplitLayout,
                                       RebalancePolicy)
from fedcompare.models.params import (LayoutEntry, PredictorSpec, ParamVector,
                                      OptimizerState, Batch)
from fedcompare.models.training import (TrainConfig, RoundConfig, EpochRecord,
                                        ClientUpdate, TrainingRunRecord)
from fedcompare.models.evaluation import (ConfusionCounts, MetricReport,
                                          RocCurve, ThresholdChoice,
                                          EvaluationRow, EvaluationTable,
                                          EvaluationSet)
from fedcompare.models.stats import (PairedAucSamples, TestResult,
                                     RaterLabels, KappaResult, Comparison,
                                     SignificanceRow)
from fedcompare.models.monitor import (UpdateSummary, SimilarityMatrix, JCurve,
                                       AggregationRule, OutlierPolicy,
                                       ClientFlag, RoundLogRecord)
from fedcompare.models.round import FederatedRound
from fedcompare.models.history import RoundHistory
from fedcompare.models.config import (CohortConfig, SplitConfig, EvalConfig,
                                      BenchConfig, ExperimentConfig,
                                      RunManifest)
