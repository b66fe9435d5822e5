"""Catalog of the pre-defined experiments."""

import pandas as pd

from mfcz.data_models import EnumValue, MFCZEnum
from mfcz.exceptions import MFCZInvalidExperiment
from mfcz.experiments.base import ExperimentBase
from mfcz.experiments.bochner_experiments import BRKernelScaling, BRNormScan, DeltaPTable
from mfcz.experiments.decomposition_experiments import CZDecompositionAudit, Weak11Scan
from mfcz.experiments.norm_experiments import NormScanUnweighted, NormScanWeighted
from mfcz.experiments.sharp_experiments import PointwiseDomination, SharpMaxFeffermanStein
from mfcz.experiments.span_experiments import LemmaSweep, SumsetTable
from mfcz.experiments.weight_experiments import WeightsJN


class ExperimentType(MFCZEnum):
    """Pre-defined experiments"""

    LEMMA_SWEEP = EnumValue(
        value="lemma-sweep",
        description="Span constants for orthogonal and random frequency sets",
        experiment_class=LemmaSweep,
    )
    SUMSET_TABLE = EnumValue(
        value="sumset-table",
        description="Iterated sumset cardinalities",
        experiment_class=SumsetTable,
    )
    CZDECOMP_AUDIT = EnumValue(
        value="czdecomp-audit",
        description="Audit of the multi-frequency CZ decomposition",
        experiment_class=CZDecompositionAudit,
    )
    WEAK11_SCAN = EnumValue(
        value="weak11-scan",
        description="Weak-type (1,1) growth of the multi-frequency Hilbert transform",
        experiment_class=Weak11Scan,
    )
    NORMSCAN_UNWEIGHTED = EnumValue(
        value="normscan-unweighted",
        description="L^p norm growth and power-method oracles",
        experiment_class=NormScanUnweighted,
    )
    NORMSCAN_WEIGHTED = EnumValue(
        value="normscan-weighted",
        description="Weighted L^p norm growth",
        experiment_class=NormScanWeighted,
    )
    SHARPMAX_FS = EnumValue(
        value="sharpmax-fs",
        description="Classical reduction and Fefferman-Stein ratios of the sharp function",
        experiment_class=SharpMaxFeffermanStein,
    )
    POINTWISE_DOM = EnumValue(
        value="pointwise-dom",
        description="Pointwise domination of the sharp function of T f",
        experiment_class=PointwiseDomination,
    )
    WEIGHTS_JN = EnumValue(
        value="weights-jn",
        description="Weight characteristics, duality and the power identity",
        experiment_class=WeightsJN,
    )
    BR_KERNEL_SCALING = EnumValue(
        value="br-kernel-scaling",
        description="Whitney counts and kernel norms of Bochner-Riesz pieces",
        experiment_class=BRKernelScaling,
    )
    BR_NORM_SCAN = EnumValue(
        value="br-norm-scan",
        description="Norms of the single-scale Bochner-Riesz operators",
        experiment_class=BRNormScan,
    )
    DELTA_P_TABLE = EnumValue(
        value="delta-p-table",
        description="Bochner-Riesz exponents delta(p)",
        experiment_class=DeltaPTable,
    )


def get_experiment(name) -> ExperimentBase:
    """Return an instance of the experiment registered under name."""
    try:
        experiment_type = ExperimentType(name)
    except ValueError:
        catalog = ", ".join(ExperimentType.values())
        raise MFCZInvalidExperiment(
            f"unknown experiment {name!r}; available experiments: {catalog}"
        ) from None
    return experiment_type.experiment_class()


def list_experiments() -> pd.DataFrame:
    """Return the catalog with columns name, anchor, description."""
    rows = [
        {
            "name": x.value,
            "anchor": x.experiment_class.ANCHOR,
            "description": x.description,
        }
        for x in ExperimentType
    ]
    return pd.DataFrame(rows, columns=["name", "anchor", "description"])
