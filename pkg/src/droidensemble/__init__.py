"""Static Android malware detection with parallel heterogeneous classifiers.

Pipeline: :mod:`droidensemble.ingest` pulls DEX strings, manifest
permissions and raw strings out of an APK; :mod:`droidensemble.features`
turns them into binary keyword vectors; :mod:`droidensemble.learners`
trains five base classifiers; :mod:`droidensemble.ensemble` fuses their
posteriors; :mod:`droidensemble.evaluation` runs stratified k-fold CV.
"""
__version__ = "0.1.0"

import logging

logging.getLogger(__name__).addHandler(logging.NullHandler())

from .ensemble import SCHEMES, EnsembleVerdict, PosteriorSet, combine
from .features import (FeatureCatalog, FeatureVector, LabelledSample, SampleMatrix, default_catalog,
                       load_catalog, read_matrix, vectorize, write_matrix)
from .ingest import (ApkPackage, EvidenceBundle, collect_evidence, extract_dex_strings,
                     extract_manifest_permissions, harvest_raw_strings, open_package)
from .learners import ALGORITHMS, Posterior, TrainedModel, load_model, predict, save_model, train

__all__ = [
    "ALGORITHMS", "SCHEMES",
    "ApkPackage", "EvidenceBundle", "open_package", "collect_evidence",
    "extract_dex_strings", "extract_manifest_permissions", "harvest_raw_strings",
    "FeatureCatalog", "FeatureVector", "LabelledSample", "SampleMatrix",
    "default_catalog", "load_catalog", "vectorize", "read_matrix", "write_matrix",
    "Posterior", "TrainedModel", "train", "predict", "save_model", "load_model",
    "PosteriorSet", "EnsembleVerdict", "combine",
]
