"""inktrace: drawing-process analytics.

Turns timestamped stroke logs plus object annotations into kinematic and
behavioral features, a replayed image, a structured description,
indicator mappings, and a retrieval-grounded interpretation prompt.
"""

__version__ = "0.1.0"
