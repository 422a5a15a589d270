from abc import ABCMeta, abstractmethod
from math import inf


class Subscriber(metaclass=ABCMeta):
    @abstractmethod
    def on_subscribe(self, subscription):
        pass

    @abstractmethod
    def on_next(self, value):
        pass

    @abstractmethod
    def on_error(self, exception):
        pass

    @abstractmethod
    def on_complete(self):
        pass


class DefaultSubscriber(Subscriber):
    """Requests every sample up front and ignores all signals."""

    def __init__(self):
        self.subscription = None

    def on_subscribe(self, subscription):
        self.subscription = subscription
        subscription.request(inf)

    def on_next(self, value):
        pass

    def on_error(self, exception):
        pass

    def on_complete(self):
        pass
