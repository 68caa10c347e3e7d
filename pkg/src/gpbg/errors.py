"""Exception hierarchy shared by all modules."""


class GPBGError(Exception):
    """Base class for every error raised by this package."""


class GuardError(GPBGError):
    """A size or memory guard refused the request (CLI exit status 2)."""


class SizeGuardExceeded(GuardError):
    pass


class MemoryGuardExceeded(GuardError):
    pass


class TermCapExceeded(GuardError):
    pass


class DepthCapExceeded(GuardError):
    pass


class WraparoundRisk(GuardError):
    """Dispersed data would reach the edge of the periodic box."""


class MoveNotApplicable(GPBGError):
    pass


class SchedulerStuck(GPBGError):
    """No estimate rule applies to a kernel term."""


class InconsistentForest(GPBGError):
    pass
