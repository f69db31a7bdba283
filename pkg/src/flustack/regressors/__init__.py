"""Regression machinery used by the weak predictors and the ensembles."""

from .boost import AdaBoostFit, adaboost_predict, adaboost_r2_fit, weighted_median
from .cv import CvPlan, cv_select
from .lasso import (
    LassoFit,
    lambda_max,
    lasso_cd_fit,
    lasso_lambda_path,
    lasso_objective,
    lasso_predict,
    lasso_predict_many,
)
from .svr import (
    NonConvergenceError,
    SvrFit,
    kernel_eval,
    svr_fit,
    svr_predict,
    svr_predict_many,
)
from .tree import Leaf, Split, TreeNode, tree_fit, tree_predict, tree_predict_many

__all__ = [
    "AdaBoostFit",
    "adaboost_predict",
    "adaboost_r2_fit",
    "weighted_median",
    "CvPlan",
    "cv_select",
    "LassoFit",
    "lambda_max",
    "lasso_cd_fit",
    "lasso_lambda_path",
    "lasso_objective",
    "lasso_predict",
    "lasso_predict_many",
    "NonConvergenceError",
    "SvrFit",
    "kernel_eval",
    "svr_fit",
    "svr_predict",
    "svr_predict_many",
    "Leaf",
    "Split",
    "TreeNode",
    "tree_fit",
    "tree_predict",
    "tree_predict_many",
]
