from abc import ABCMeta, abstractmethod


class Subscription(metaclass=ABCMeta):
    """Demand of one subscriber on a publisher."""

    @abstractmethod
    def request(self, n):
        pass

    @abstractmethod
    def cancel(self):
        pass


class DemandSubscription(Subscription):
    """
    Outstanding demand of one subscriber.  A publisher delivers a sample only
    against demand and stops early once no subscription has any left.  A
    passive subscription observes without keeping the publisher running.
    """

    def __init__(self, subscriber, passive=False):
        self.subscriber = subscriber
        self.passive = passive
        self.requested = 0
        self.cancelled = False

    def request(self, n):
        if n <= 0:
            raise ValueError('Demand must be positive, got {}'.format(n))
        self.requested += n

    def cancel(self):
        self.cancelled = True
        self.requested = 0

    @property
    def active(self):
        return not self.cancelled and self.requested > 0

    def deliver(self, sample):
        self.requested -= 1
        self.subscriber.on_next(sample)
