"""Exception hierarchy shared by the extraction, learning and evaluation layers."""


class DroidEnsembleError(Exception):
    """Base class for every error raised by this package."""


# --- package ingestion -------------------------------------------------------

class ApkError(DroidEnsembleError):
    pass


class NotAnArchive(ApkError):
    pass


class EntryCorrupt(ApkError):
    pass


class MalformedDex(ApkError):
    pass


class NoManifest(ApkError):
    pass


class MalformedManifest(ApkError):
    pass


# --- catalogs and matrices ---------------------------------------------------

class CatalogError(DroidEnsembleError):
    pass


class DuplicateKeyword(CatalogError):
    pass


class UnknownCategory(CatalogError):
    pass


class EmptyCatalog(CatalogError):
    pass


class BadKeyword(CatalogError):
    pass


class MatrixError(DroidEnsembleError):
    pass


class SchemaMismatch(DroidEnsembleError):
    """A matrix header or model file does not have the expected layout."""


class BadValue(MatrixError):
    pass


class BadLabel(MatrixError):
    pass


class DuplicateSample(MatrixError):
    pass


# --- learners ----------------------------------------------------------------

class LearnerError(DroidEnsembleError):
    pass


class SingleClassData(LearnerError):
    pass


class NoConvergence(LearnerError):
    pass


class DimensionMismatch(LearnerError):
    pass


class CorruptModel(LearnerError):
    pass


# --- evaluation --------------------------------------------------------------

class EvaluationError(DroidEnsembleError):
    pass


class TooFewSamples(EvaluationError):
    pass


class EmptyClass(EvaluationError):
    pass
