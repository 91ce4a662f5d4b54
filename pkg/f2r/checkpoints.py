import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import torch
import torch.nn as nn

from .data.vocab import Vocab
from .models.discriminator import DiscriminatorConfig, StyleDiscriminator
from .models.generator import GeneratorConfig, StyleTransferGenerator
from .models.ranker import Ranker, RankerConfig

logger = logging.getLogger(__name__)

# Checkpoint kinds this package can write and rebuild
MODEL_KINDS = {
    "generator": {
        "name": "StyleTransferGenerator",
        "description": "Style-conditioned encoder-decoder (feedback -> response)",
        "config": GeneratorConfig,
        "model": StyleTransferGenerator,
    },
    "discriminator": {
        "name": "StyleDiscriminator",
        "description": "Feedback vs natural response classifier",
        "config": DiscriminatorConfig,
        "model": StyleDiscriminator,
    },
    "ranker": {
        "name": "Ranker",
        "description": "Bi-/poly-encoder retrieval chatbot",
        "config": RankerConfig,
        "model": Ranker,
    },
}


def kind_of(model: nn.Module) -> str:
    for kind, info in MODEL_KINDS.items():
        if isinstance(model, info["model"]):
            return kind
    raise ValueError(f"Unsupported model type: {type(model).__name__}")


class CheckpointManager:
    """Save, load and inspect self-describing model checkpoints"""

    def __init__(self, models_dir: Union[str, Path] = "models"):
        self.models_dir = Path(models_dir)
        self.models_dir.mkdir(parents=True, exist_ok=True)

    def path_for(self, name: Union[str, Path]) -> Path:
        """Accepts a bare checkpoint name or a path to a .pt file"""
        path = Path(name)
        if path.suffix == ".pt" and (path.exists() or path.parent != Path(".")):
            return path
        return self.models_dir / (path.name if path.suffix == ".pt" else f"{path.name}.pt")

    def save(
        self,
        name: str,
        model: nn.Module,
        vocab: Vocab,
        extra: Optional[Dict[str, Any]] = None,
    ) -> Path:
        kind = kind_of(model)
        payload = {
            "kind": kind,
            "config": model.config.to_dict(),
            "state_dict": model.state_dict(),
            "vocab": vocab.to_dict(),
            "extra": extra or {},
        }
        target = self.path_for(name)
        target.parent.mkdir(parents=True, exist_ok=True)
        torch.save(payload, target)
        logger.info(f"Saved {kind} checkpoint to {target}")
        return target

    def load_payload(self, name: Union[str, Path]) -> Dict[str, Any]:
        path = self.path_for(name)
        if not path.exists():
            raise FileNotFoundError(f"Checkpoint not found: {path}")
        payload = torch.load(path, map_location="cpu", weights_only=True)
        missing = {"kind", "config", "state_dict", "vocab"} - set(payload)
        if missing or payload["kind"] not in MODEL_KINDS:
            raise ValueError(f"Not a valid checkpoint: {path}")
        return payload

    def load(
        self, name: Union[str, Path], kind: Optional[str] = None
    ) -> Tuple[nn.Module, Vocab, Dict[str, Any]]:
        """
        Rebuild a model from a checkpoint

        Returns:
            (model in eval mode, vocab, extra)
        """
        payload = self.load_payload(name)
        if kind is not None and payload["kind"] != kind:
            raise ValueError(f"Expected a {kind} checkpoint, got {payload['kind']}")

        info = MODEL_KINDS[payload["kind"]]
        model = info["model"](info["config"].from_dict(payload["config"]))
        model.load_state_dict(payload["state_dict"])
        model.eval()
        return model, Vocab.from_dict(payload["vocab"]), payload.get("extra", {})

    def load_generator(self, name: Union[str, Path]) -> Tuple[StyleTransferGenerator, Vocab]:
        model, vocab, _ = self.load(name, "generator")
        return model, vocab  # type: ignore[return-value]

    def load_discriminator(self, name: Union[str, Path]) -> Tuple[StyleDiscriminator, Vocab]:
        model, vocab, _ = self.load(name, "discriminator")
        return model, vocab  # type: ignore[return-value]

    def load_ranker(self, name: Union[str, Path]) -> Tuple[Ranker, Vocab]:
        model, vocab, _ = self.load(name, "ranker")
        return model, vocab  # type: ignore[return-value]

    def list_checkpoints(self) -> List[str]:
        """Names of the checkpoints saved under models_dir"""
        if not self.models_dir.exists():
            return []
        return sorted(file.stem for file in self.models_dir.glob("*.pt"))

    def show_checkpoint_info(self, name: Optional[str] = None) -> None:
        """Print one checkpoint's description, or all of them"""
        names = [name] if name else self.list_checkpoints()
        print(f"=== Checkpoints in {self.models_dir} ===")
        print()
        if not names:
            print("(none)")
            print()
        for ckpt in names:
            try:
                payload = self.load_payload(ckpt)
            except (FileNotFoundError, ValueError) as e:
                print(f"❌ {ckpt}: {e}")
                continue
            info = MODEL_KINDS[payload["kind"]]
            n_params = sum(t.numel() for t in payload["state_dict"].values())
            print(f"✅ {ckpt}")
            print(f"    Kind: {info['name']}")
            print(f"    Description: {info['description']}")
            print(f"    Parameters: {n_params:,}")
            print(f"    Vocab size: {len(payload['vocab']['tokens'])}")
            for key, value in sorted(payload["config"].items()):
                print(f"    {key}: {value}")
            print()

        print("=== Kinds ===")
        for kind, info in MODEL_KINDS.items():
            print(f"  {kind}: {info['description']}")


def checkpoints_command(args) -> None:
    """Handle the checkpoints subcommand"""
    manager = CheckpointManager(args.models_dir)
    if args.name:
        manager.show_checkpoint_info(args.name)
        return
    if args.list:
        for name in manager.list_checkpoints():
            print(name)
        return
    manager.show_checkpoint_info()
