from eigendesign.controllers.artifact_service import ArtifactFiles, ArtifactService
from eigendesign.controllers.services import ExperimentService
