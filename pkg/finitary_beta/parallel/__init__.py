from .partial_results import LogMoments, MomentSums, PartialResultResolver, merge_in_order
from .worker_pool import SeedRangePool
