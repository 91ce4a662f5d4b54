"""
Passthrough Converter - Uses raw feedback as the response
"""

from .base_converter import BaseConverter


class PassthroughConverter(BaseConverter):
    """
    Converter that keeps feedback unchanged (the Feedback setting)
    """

    name = "feedback"

    def convert(self, feedback: str, history: str = "") -> str:
        return feedback
