"""scorer-service: HTTP/JSON microservice scoring text pairs (similarity,
entailment, alignment probability) plus offline score-file export."""

__version__ = "0.1.0"

from .app import create_app
from .export import export_scores
from .models import DEFAULT_CONFIG, load_config, load_models

__all__ = ["create_app", "export_scores", "load_config", "load_models", "DEFAULT_CONFIG", "__version__"]
