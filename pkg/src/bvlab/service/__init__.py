"""Service layer: pydantic schemas, transport-free handlers, FastAPI app.

The handlers in `bvlab.service.handlers` are plain functions from request
models to response models; the CLI calls them in-process by default, and
`bvlab.service.app` exposes the same handlers over HTTP.
"""

from . import handlers, schemas  # noqa: F401

__all__ = ["handlers", "schemas"]
