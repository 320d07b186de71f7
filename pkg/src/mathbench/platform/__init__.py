from .store import EventLog, StoreRecord, StoreError, DuplicateId
from .leaderboard import (
    LeaderboardRow,
    LeaderboardSnapshot,
    build_leaderboard,
    final_grades,
    surprising_failures,
)
from .export import export_static
from .api import create_app

__all__ = [
    "EventLog", "StoreRecord", "StoreError", "DuplicateId",
    "LeaderboardRow", "LeaderboardSnapshot", "build_leaderboard",
    "final_grades", "surprising_failures", "export_static", "create_app",
]
