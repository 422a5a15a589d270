from math import inf

import numpy as np
import pytest

from sampling import DefaultSubscriber, DemandSubscription, Publisher, \
    Sample, Subscriber, Subscription, sampling


def test_sampling():
    assert sampling() == "sampling-0.1"


def test_abstract_interfaces():
    for interface in (Publisher, Subscriber, Subscription):
        with pytest.raises(TypeError):
            interface()


def test_default_subscriber_requests_everything():
    subscriber = DefaultSubscriber()
    subscription = DemandSubscription(subscriber)
    subscriber.on_subscribe(subscription)
    assert subscriber.subscription is subscription
    assert subscription.requested == inf
    assert subscription.active


def test_demand_is_consumed_by_delivery():
    class Collector(DefaultSubscriber):
        def __init__(self):
            super().__init__()
            self.values = []

        def on_subscribe(self, subscription):
            self.subscription = subscription
            subscription.request(2)

        def on_next(self, value):
            self.values.append(value.index)

    collector = Collector()
    subscription = DemandSubscription(collector)
    collector.on_subscribe(subscription)
    for index in range(2):
        subscription.deliver(Sample(index, float(index), np.zeros(1)))
    assert collector.values == [0, 1]
    assert not subscription.active


def test_cancel_and_invalid_demand():
    subscription = DemandSubscription(DefaultSubscriber(), passive=True)
    assert subscription.passive
    with pytest.raises(ValueError):
        subscription.request(0)
    subscription.request(5)
    subscription.cancel()
    assert subscription.cancelled
    assert not subscription.active
