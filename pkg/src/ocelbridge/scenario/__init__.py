from .generate import (
    ACTIVITIES,
    BASE_TIME,
    ScenarioArtifacts,
    ScenarioParams,
    generate,
)

__all__ = ["ACTIVITIES", "BASE_TIME", "ScenarioArtifacts", "ScenarioParams", "generate"]
