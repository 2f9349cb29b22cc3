"""Exception types raised across the package."""


class CouponEmbedError(ValueError):
    """Base class for all domain errors."""


class EmptySet(CouponEmbedError):
    pass


class TooLarge(CouponEmbedError):
    pass


class NotStochastic(CouponEmbedError):
    pass


class NotCM(CouponEmbedError):
    """Matrix does not have the coupon-Markov structure.

    ``witness`` holds the offending ``(I, J)`` mask pair and ``deviation``
    the absolute mismatch found there.
    """

    def __init__(self, msg, witness=None, deviation=None):
        super().__init__(msg)
        self.witness = witness
        self.deviation = deviation


class NotCG(NotCM):
    """Matrix does not have the coupon-generator structure."""


class DegenerateIndependent(CouponEmbedError):
    pass


class SingularMatrix(CouponEmbedError):
    pass


class NotEmbeddable(CouponEmbedError):
    def __init__(self, msg, witnesses=()):
        super().__init__(msg)
        self.witnesses = list(witnesses)


class NotGenerator(CouponEmbedError):
    pass


class ConditionOnNullEvent(CouponEmbedError):
    pass


class NonConvergence(CouponEmbedError):
    pass


class OutOfConvergenceRegion(CouponEmbedError):
    def __init__(self, msg, norm=None):
        super().__init__(msg)
        self.norm = norm


class SpectralRadiusTooLarge(CouponEmbedError):
    def __init__(self, msg, bound=None):
        super().__init__(msg)
        self.bound = bound


class Unreachable(CouponEmbedError):
    def __init__(self, msg, elements=()):
        super().__init__(msg)
        self.elements = list(elements)
