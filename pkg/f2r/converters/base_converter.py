# -*- coding: utf-8 -*-
import logging
from typing import Any, Dict, List, Sequence

from ..data.corpus import Conversation, assemble_history

logger = logging.getLogger(__name__)


class BaseConverter:
    """
    Base converter: rewrites a feedback utterance into a response that can be
    used as a gold answer for the conversation it was given in
    """

    name = "base"

    def convert(self, feedback: str, history: str = "") -> str:
        """
        Convert one feedback utterance, subclasses must override this method
        """
        raise NotImplementedError("Subclasses must implement convert")

    def convert_many(self, feedbacks: Sequence[str], histories: Sequence[str]) -> List[str]:
        """
        Convert a list of feedback utterances with their assembled histories
        """
        if len(feedbacks) != len(histories):
            raise ValueError("feedbacks and histories must have the same length")
        return [self.convert(f, h) for f, h in zip(feedbacks, histories)]

    def convert_conversations(
        self, conversations: Sequence[Conversation], n_turns: int = 2
    ) -> List[Conversation]:
        """
        Replace every final response by its conversion; histories are untouched
        """
        histories = [assemble_history(conv, n_turns) for conv in conversations]
        converted = self.convert_many([c.final_response for c in conversations], histories)
        results = []
        for conv, response in zip(conversations, converted):
            if not response.strip():
                logger.warning(f"{self.name} produced an empty response, keeping the feedback")
                response = conv.final_response
            results.append(conv.with_response(response))
        logger.info(f"{self.name} converted {len(results)} conversations")
        return results

    def get_converter_info(self) -> Dict[str, Any]:
        """
        Summary of this converter for manifests and reports
        """
        return {"converter": self.name}
