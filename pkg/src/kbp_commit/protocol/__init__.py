from kbp_commit.protocol.types import (
    COORDINATOR,
    ByzantineBehaviour,
    CoordinatorState,
    Decision,
    DecisionChoice,
    EnvState,
    GlobalState,
    Location,
    ParticipantState,
    SendPattern,
    SendRecord,
    Vote,
    agents,
    participants,
)
from kbp_commit.protocol.cheating import cheating_ground_truth
from kbp_commit.protocol.coordinator import coordinator_step, honest_decision
from kbp_commit.protocol.participant import ParticipantView, open_2pc_run, participant_step
from kbp_commit.protocol.environment import InitialChoice, advance, initial_state
from kbp_commit.protocol.atoms import atoms, observable_names, observation

__all__ = [
    "COORDINATOR",
    "ByzantineBehaviour",
    "CoordinatorState",
    "Decision",
    "DecisionChoice",
    "EnvState",
    "GlobalState",
    "InitialChoice",
    "Location",
    "ParticipantState",
    "ParticipantView",
    "SendPattern",
    "SendRecord",
    "Vote",
    "advance",
    "agents",
    "atoms",
    "cheating_ground_truth",
    "coordinator_step",
    "honest_decision",
    "initial_state",
    "observable_names",
    "observation",
    "open_2pc_run",
    "participant_step",
    "participants",
]
