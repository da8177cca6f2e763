__all__ = [
    "instance",
    "schedule",
    "engine",
    "algorithms",
    "baselines",
    "registry",
    "oracle",
    "limits",
    "analysis",
    "generators",
    "adversary",
    "documents",
    "cli",
    "errors",
]
