"""Exception hierarchy shared by every stage of the pipeline."""


class TaegError(Exception):
    """Base class for all data and configuration errors raised by taeg."""


class MalformedRef(TaegError):
    pass


class SchemaError(TaegError):
    pass


class InvariantError(TaegError):
    pass


class OverlapError(InvariantError):
    """A sentence span lies inside two events' spans for the same document."""

    def __init__(self, sentence_id, first_event, second_event):
        self.sentence_id = sentence_id
        self.events = (first_event, second_event)
        super().__init__(
            f"sentence {sentence_id} is contained in events {first_event} and {second_event}"
        )


class EmptyCorpus(TaegError):
    pass


class EmptyTimeline(TaegError):
    pass


class NoVersions(TaegError):
    pass


class NegativeWeight(TaegError):
    pass


class NonStochastic(TaegError):
    pass


class MissingScore(TaegError):
    pass


class KTooLarge(TaegError):
    pass


class EmptyReference(TaegError):
    pass


class ConfigError(TaegError):
    pass
