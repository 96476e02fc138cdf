"""Execution controller: persistence, jobs, workers, real-time event log."""

from .api import create_app
from .launcher import CustomEndpointLauncher, SharedPoolLauncher
from .service import (
    AlreadyLaunched,
    AuthFailed,
    ControllerService,
    DuplicateName,
    Forbidden,
    JobTerminal,
    LaunchFailed,
    NotFound,
    PayloadTooLarge,
    ValidationFailed,
)
from .store import TERMINAL_STATUSES, Store, event_frame
from .worker import HttpControllerClient, LocalControllerClient, run_worker

__all__ = [
    "AlreadyLaunched",
    "AuthFailed",
    "ControllerService",
    "CustomEndpointLauncher",
    "DuplicateName",
    "Forbidden",
    "HttpControllerClient",
    "JobTerminal",
    "LaunchFailed",
    "LocalControllerClient",
    "NotFound",
    "PayloadTooLarge",
    "SharedPoolLauncher",
    "Store",
    "TERMINAL_STATUSES",
    "ValidationFailed",
    "create_app",
    "event_frame",
    "run_worker",
]
