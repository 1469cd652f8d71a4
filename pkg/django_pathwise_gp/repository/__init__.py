from .artifact_store import ArtifactStore, canonical_json, config_digest
