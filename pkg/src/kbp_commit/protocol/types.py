from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, List, Optional, Tuple


COORDINATOR = "c"


class Vote(str, Enum):
    UNDEF = "undef"     # only ever seen by the coordinator: vote not received
    NO = "no"
    YES = "yes"


class Decision(str, Enum):
    UNDECIDED = "undecided"
    ABORT = "abort"
    COMMIT = "commit"


class DecisionChoice(str, Enum):
    FORCE_ABORT = "force_abort"
    FORCE_COMMIT = "force_commit"


class SendPattern(str, Enum):
    BROADCAST_CHOSEN = "broadcast_chosen"
    SPLIT_ABORT_FIRST = "split_abort_first"
    SPLIT_COMMIT_FIRST = "split_commit_first"
    ARBITRARY_VECTOR = "arbitrary_vector"


class Location(str, Enum):
    # coordinator
    START = "Start"
    AWAIT_VOTES = "AwaitVotes"
    DECIDE = "Decide"
    COORD_TERM_CHECK = "CoordTermCheck"
    COORD_RETRANS_LOOP = "CoordRetransLoop"
    # participants; (1) (2) (3) are the marked knowledge tests
    AWAIT_START = "AwaitStart"
    VOTE = "Vote"
    AWAIT_DECISION = "AwaitDecision"
    CHEAT_CHECK_1 = "CheatCheck1"
    OPEN_RUN = "OpenRun"
    DECIDE_ABORT_2 = "DecideAbort2"
    FOLLOW_DECISION_3 = "FollowDecision3"
    RETRANS_LOOP = "RetransLoop"
    TERM_CHECK = "TermCheck"
    DONE = "done"


def participants(d: int) -> List[str]:
    """Participant ids "2".."d"; the coordinator is agent "c"."""
    return [str(i) for i in range(2, d + 1)]


def agents(d: int) -> List[str]:
    return [COORDINATOR] + participants(d)


def slot(agent: str) -> int:
    """Index of a participant in the per-participant tuples."""
    return int(agent) - 2


def set_slot(values: Tuple, agent: str, value) -> Tuple:
    i = slot(agent)
    return values[:i] + (value,) + values[i + 1:]


@dataclass(frozen=True, order=True)
class SendRecord:
    round: int
    sender: str
    receiver: str
    message: str                    # "start" | "abort" | "commit" | "vote:yes" | "ack" | "open:vote:no" | ...


@dataclass(frozen=True)
class ByzantineBehaviour:
    decision_choice: DecisionChoice
    send_pattern: SendPattern
    vector: Tuple[Decision, ...] = ()   # only read for arbitrary_vector

    @property
    def decision(self) -> Decision:
        return Decision.COMMIT if self.decision_choice == DecisionChoice.FORCE_COMMIT else Decision.ABORT

    def sends(self, d: int) -> Tuple[Decision, ...]:
        """The value delivered to each participant at announcement."""
        n = d - 1
        if self.send_pattern == SendPattern.BROADCAST_CHOSEN:
            return (self.decision,) * n
        if self.send_pattern == SendPattern.SPLIT_ABORT_FIRST:
            return (Decision.ABORT,) + (Decision.COMMIT,) * (n - 1)
        if self.send_pattern == SendPattern.SPLIT_COMMIT_FIRST:
            return (Decision.COMMIT,) + (Decision.ABORT,) * (n - 1)
        if len(self.vector) != n:
            raise ValueError(f"arbitrary_vector needs {n} entries, got {len(self.vector)}")
        return tuple(self.vector)

    def canonical(self, d: int) -> "ByzantineBehaviour":
        return ByzantineBehaviour(self.decision_choice, SendPattern.ARBITRARY_VECTOR, self.sends(d))


@dataclass(frozen=True)
class EnvState:
    byzantine: bool
    decision: Decision
    rcvd_start_msg: Tuple[bool, ...]
    trap: bool
    cheating_detected: bool
    decision_channel: Tuple[Decision, ...]
    behaviour: Optional[ByzantineBehaviour] = None
    send_log: Tuple[SendRecord, ...] = ()           # coordinator sends, append-only
    participant_log: Tuple[SendRecord, ...] = ()    # participant sends, append-only

    def log_sends(self, sends: Iterable[SendRecord]) -> "EnvState":
        own, others = [], []
        for s in sends:
            (own if s.sender == COORDINATOR else others).append(s)
        if not own and not others:
            return self
        return replace(
            self,
            send_log=self.send_log + tuple(sorted(own)),
            participant_log=self.participant_log + tuple(sorted(others)),
        )


@dataclass(frozen=True)
class CoordinatorState:
    coord_vote: Vote
    vote: Tuple[Vote, ...]
    ack: Tuple[bool, ...]
    pc: Location = Location.START
    stop_cond: Tuple[bool, ...] = ()
    retrans_cond: Tuple[bool, ...] = ()
    ack_wait: int = 0


@dataclass(frozen=True)
class ParticipantState:
    ident: str
    vote: Vote
    ack: bool = False
    outcome: Decision = Decision.UNDECIDED
    pc: Location = Location.AWAIT_START
    start_received: bool = False
    received_decision: Decision = Decision.UNDECIDED
    confirmed: Decision = Decision.UNDECIDED
    opened: bool = False
    opened_votes: Tuple[Vote, ...] = ()             # per participant slot; own slot stays undef
    opened_decisions: Tuple[Decision, ...] = ()


@dataclass(frozen=True)
class GlobalState:
    env: EnvState
    coordinator: CoordinatorState
    participants: Tuple[ParticipantState, ...] = field(default_factory=tuple)

    @property
    def d(self) -> int:
        return len(self.participants) + 1

    def participant(self, agent: str) -> ParticipantState:
        return self.participants[slot(agent)]

    def quiescent(self) -> bool:
        return self.coordinator.pc == Location.DONE and all(p.pc == Location.DONE for p in self.participants)
