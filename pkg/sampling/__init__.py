"""
Sampling
~~~~~~~~

Publisher/Subscriber abstractions through which a time integrator streams
its samples to observers.
"""

from sampling.publisher import Publisher, Sample
from sampling.subscriber import DefaultSubscriber, Subscriber
from sampling.subscription import DemandSubscription, Subscription


def sampling():
    return 'sampling-0.1'
