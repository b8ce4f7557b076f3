from __future__ import annotations

from typing import Set

from kbp_commit.protocol.types import CoordinatorState, Decision, EnvState, Vote


def sent_decisions(env: EnvState, value: Decision) -> Set[str]:
    """Participants the coordinator has sent `value` to so far."""
    return {s.receiver for s in env.send_log if s.message == value.value}


def cheating_ground_truth(env: EnvState, coord: CoordinatorState) -> bool:
    """
    cheating_c, read off the coordinator's send log:
      - a no vote (received or its own) and a commit sent to someone, or
      - all votes yes and an abort sent to someone, or
      - commit sent to some i and abort to some j != i.
    """
    commits = sent_decisions(env, Decision.COMMIT)
    aborts = sent_decisions(env, Decision.ABORT)

    some_no = coord.coord_vote == Vote.NO or any(v == Vote.NO for v in coord.vote)
    all_yes = coord.coord_vote == Vote.YES and all(v == Vote.YES for v in coord.vote)

    if some_no and commits:
        return True
    if all_yes and aborts:
        return True
    return any(i != j for i in commits for j in aborts)
