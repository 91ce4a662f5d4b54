import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import torch

from ..checkpoints import CheckpointManager
from ..data.batching import encode_pair, pad_sequences
from ..data.corpus import StyleLabel
from ..data.vocab import Vocab
from ..models.generator import StyleTransferGenerator
from .base_converter import BaseConverter

logger = logging.getLogger(__name__)


class F2RConverter(BaseConverter):
    """
    基于对抗式风格迁移生成器的Converter
    """

    name = "f2r"

    def __init__(
        self,
        generator: StyleTransferGenerator,
        vocab: Vocab,
        max_len: int = 50,
        repetition_penalty: float = 2.0,
        max_history_len: int = 64,
        batch_size: int = 64,
        device: Optional[torch.device] = None,
    ):
        if len(vocab) != generator.vocab_size:
            raise ValueError(
                f"Vocab size {len(vocab)} does not match generator vocab {generator.vocab_size}"
            )
        # 生成参数
        self.generator = generator
        self.vocab = vocab
        self.max_len = max_len
        self.repetition_penalty = repetition_penalty
        self.max_history_len = max_history_len
        self.batch_size = batch_size
        self.device = device or generator.token_embedding.weight.device
        self.generator.to(self.device)

    @classmethod
    def from_checkpoint(
        cls, checkpoint: Union[str, Path], models_dir: Union[str, Path] = "models", **kwargs
    ) -> "F2RConverter":
        """
        从检查点加载生成器
        """
        generator, vocab = CheckpointManager(models_dir).load_generator(checkpoint)
        return cls(generator, vocab, **kwargs)

    def convert(self, feedback: str, history: str = "") -> str:
        """
        使用生成器把反馈改写为自然回复
        """
        return self.convert_many([feedback], [history])[0]

    def convert_many(self, feedbacks: Sequence[str], histories: Sequence[str]) -> List[str]:
        if len(feedbacks) != len(histories):
            raise ValueError("feedbacks and histories must have the same length")

        results: List[str] = []
        was_training = self.generator.training
        self.generator.eval()
        try:
            for start in range(0, len(feedbacks), self.batch_size):
                chunk = list(zip(feedbacks, histories))[start : start + self.batch_size]
                results.extend(self._convert_chunk(chunk))
        except Exception as e:
            logger.error(f"F2R转换时出错: {e}")
            raise RuntimeError(f"F2R conversion failed: {e}")
        finally:
            self.generator.train(was_training)
        return results

    def _convert_chunk(self, chunk) -> List[str]:
        histories, responses = [], []
        for feedback, history in chunk:
            h, x = encode_pair(history, feedback, self.vocab, self.max_history_len, self.max_len)
            histories.append(h)
            responses.append(x)

        styles = torch.full((len(chunk),), int(StyleLabel.NATURAL), device=self.device)
        ids = self.generator.generate(
            pad_sequences(histories).to(self.device),
            pad_sequences(responses).to(self.device),
            styles,
            max_len=self.max_len,
            repetition_penalty=self.repetition_penalty,
        )
        # 生成结果为空时保留原始反馈
        return [self.vocab.decode(seq) or feedback for seq, (feedback, _) in zip(ids, chunk)]

    def get_converter_info(self) -> Dict[str, Any]:
        info = super().get_converter_info()
        info.update(
            {
                "max_len": self.max_len,
                "repetition_penalty": self.repetition_penalty,
                "generator": self.generator.config.to_dict(),
            }
        )
        return info
