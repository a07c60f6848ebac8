"""Plan faithfulness: how close reconstructed requests land to the real one.

Score = mean cosine similarity between the embedding of the original
request and the embeddings of n pseudo tasks generated from the proposal's
retrieved context, reported with its standard error.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..agent import MemoryContext, Proposal
from ..llm import ChatGateway, ChatParams
from ..model import ProtocolDocument
from .metrics import cosine_similarity, mean, standard_error
from .pseudo import DEFAULT_TASK_COUNT, PseudoTask, generate_pseudo_tasks


@dataclass(frozen=True)
class FaithfulnessScore:
    mean: float
    sem: float
    n: int
    similarities: tuple = ()

    def to_json(self) -> dict:
        return {"mean": self.mean, "sem": self.sem, "n": self.n,
                "similarities": list(self.similarities)}


def faithfulness_from_texts(request_text: str, task_texts, embedder) -> FaithfulnessScore:
    """Embed the request and every pseudo task; average the cosines."""
    anchor = embedder.embed(request_text)
    sims = tuple(cosine_similarity(anchor, embedder.embed(text))
                 for text in task_texts)
    return FaithfulnessScore(mean=mean(sims), sem=standard_error(sims),
                             n=len(sims), similarities=sims)


def compute_faithfulness(request_text: str, proposal: Proposal,
                         doc: ProtocolDocument, llm: ChatGateway, embedder,
                         n: int = DEFAULT_TASK_COUNT, *,
                         memory: MemoryContext | None = None,
                         source_case_id: str = "",
                         params: ChatParams | None = None) -> FaithfulnessScore:
    tasks = generate_pseudo_tasks(proposal.retrieved, doc, llm, n,
                                  memory=memory, source_case_id=source_case_id,
                                  params=params)
    return faithfulness_from_texts(request_text, [t.text for t in tasks], embedder)
