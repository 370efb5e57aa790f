class IterScbError(Exception):
    """Base exception for all iterscb errors"""
    pass

class DimensionError(IterScbError):
    """Matrix or vector has an invalid or mismatched dimension"""
    pass

class TupleError(IterScbError):
    """Hyperplane tuples cannot be sampled as requested"""
    pass

class PatternWidthError(TupleError):
    """Sign pattern would not fit in a 32-bit word"""
    pass

class UnobservedPatternError(IterScbError):
    """Membership requested for a pattern no training point produced"""
    pass

class EmptyDataError(IterScbError):
    """Training set has no points"""
    pass

class LabelError(IterScbError):
    """Label outside the declared class range"""
    pass

class DegenerateLabelsError(LabelError):
    """Binary classifier received a single class"""
    pass

class IterationError(IterScbError):
    """Invalid number of iterative applications"""
    pass

class ConfigError(IterScbError):
    """Error in configuration or settings"""
    pass

class UndefinedAngleError(IterScbError):
    """Angle requested against a zero vector"""
    pass

class IdxFormatError(IterScbError):
    """IDX file has an unexpected magic number or rank"""
    pass

class IdxLengthError(IdxFormatError):
    """IDX payload is shorter or longer than its header declares"""
    pass

class ConsistencyError(IterScbError):
    """Image and label files disagree"""
    pass

class ModelFormatError(IterScbError):
    """Model file cannot be parsed"""
    pass

class MigrationError(ModelFormatError):
    """Model file was written by an unsupported format version"""
    pass

class DownloadError(IterScbError):
    """Error while fetching a dataset"""
    pass

class AcceptanceError(IterScbError):
    """An experiment result fell outside its acceptance gate"""
    pass

class ProcessError(IterScbError):
    """Error in trial process management"""
    pass
