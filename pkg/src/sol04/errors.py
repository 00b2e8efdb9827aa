"""Exception types raised by the package."""


class DomainError(ValueError):
    """A coordinate or parameter lies outside the supported numeric range."""


class DegeneratePatchError(ValueError):
    """The immersion differential is (numerically) rank deficient."""


class NotInScopeError(ValueError):
    """The hypersurface does not have constant angle functions c and d."""


class NoMatchError(ValueError):
    """Canonicalization could not place a patch on any catalog family."""
