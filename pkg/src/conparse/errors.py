"""Exception types shared across the toolkit."""


class ConparseError(Exception):
    """Base class for all toolkit errors."""


class UnbalancedBrackets(ConparseError):
    def __init__(self, position: int):
        super().__init__(f"unbalanced brackets at offset {position}")
        self.position = position


class EmptyNode(ConparseError):
    def __init__(self, position: int):
        super().__init__(f"empty node at offset {position}")
        self.position = position


class ChainTooLong(ConparseError):
    def __init__(self, span, length: int, cap: int):
        super().__init__(f"unary chain of length {length} over span {span} exceeds cap {cap}")
        self.span = span
        self.length = length
        self.cap = cap


class UnknownCategory(ConparseError):
    def __init__(self, label: str):
        super().__init__(f"no head rule for category {label!r} and no default configured")
        self.label = label


class EmptyCorpus(ConparseError):
    pass


class ShapeMismatch(ConparseError):
    def __init__(self, op: str, shapes):
        super().__init__(f"{op}: incompatible shapes {shapes}")
        self.op = op
        self.shapes = shapes


class NotScalar(ConparseError):
    def __init__(self, shape):
        super().__init__(f"backward requires a scalar loss, got shape {shape}")
        self.shape = shape


class IndexOutOfRange(ConparseError):
    def __init__(self, i: int, j: int, n: int):
        super().__init__(f"span [{i},{j}] out of range for sentence of length {n}")
        self.i = i
        self.j = j
        self.n = n


class EmptySentence(ConparseError):
    pass


class UnknownPOS(ConparseError):
    def __init__(self, tag: str):
        super().__init__(f"POS tag {tag!r} not in vocabulary")
        self.tag = tag


class LabelNotInVocab(ConparseError):
    def __init__(self, label: str):
        super().__init__(f"constituent label {label!r} not in vocabulary")
        self.label = label


class NonFiniteScore(ConparseError):
    def __init__(self, i: int, j: int):
        super().__init__(f"non-finite score for span [{i},{j}]")
        self.i = i
        self.j = j


class TooLarge(ConparseError):
    def __init__(self, n: int, limit: int):
        super().__init__(f"enumeration over {n} leaves exceeds limit {limit}")
        self.n = n
        self.limit = limit


class NonFiniteGradient(ConparseError):
    def __init__(self, name: str):
        super().__init__(f"non-finite gradient for parameter {name!r}")
        self.name = name


class LengthMismatch(ConparseError):
    def __init__(self, n_gold: int, n_pred: int):
        super().__init__(f"tree lengths differ: gold {n_gold} vs pred {n_pred}")
        self.n_gold = n_gold
        self.n_pred = n_pred


class ConfigError(ConparseError):
    pass


class DataError(ConparseError):
    pass


class ModelFormatError(ConparseError):
    pass
