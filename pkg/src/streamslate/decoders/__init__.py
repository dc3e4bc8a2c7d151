from .base import DecodeRequest, Decoder, beam_from_wire, beam_to_wire
from .bridge import BridgeDecoder, bridge_decode
from .scripted import RecordingDecoder, ScriptedDecoder, dump_script, load_script, scripted_decode
from .sim import SimDecoder, SimDecoderConfig, sim_decode

__all__ = [
    "BridgeDecoder",
    "DecodeRequest",
    "Decoder",
    "RecordingDecoder",
    "ScriptedDecoder",
    "SimDecoder",
    "SimDecoderConfig",
    "beam_from_wire",
    "beam_to_wire",
    "bridge_decode",
    "dump_script",
    "load_script",
    "scripted_decode",
    "sim_decode",
]
