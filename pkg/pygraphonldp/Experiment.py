from __future__ import annotations
import os
import json
import copy
import logging

from .General import ConfigError


COMMANDS = ("info", "rate", "sample", "ensemble", "psi", "scaling", "approx")

DEFAULTS = {
    "command": None,
    "ref": None,
    "graphon": None,
    "m": 32,
    "seed": 0,
    "restarts": 20,
    "cut_restarts": 32,
    "beta": None,
    "eps": [0.1, 0.05, 0.025],
    "n": 100,
    "count": 100,
    "thresholds": [],
    "k_list": [4, 8, 16, 32],
    "m_list": [],
    "warm_start": True,
    "verbose": False,
    "threads": None,
    "out": None,
}


def _is_int(value):
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


class ExperimentConfig:
    """Fully resolved run description; the serialized form determines the run."""

    def __init__(self, info):
        unknown = sorted(set(info) - set(DEFAULTS))
        if len(unknown) > 0:
            raise ConfigError("unknown config keys {} error @ExperimentConfig".format(unknown))
        resolved = copy.deepcopy(DEFAULTS)
        resolved.update(copy.deepcopy(info))
        if resolved["out"] is None and resolved["command"] is not None:
            resolved["out"] = os.path.join(".", "runs", resolved["command"])
        self.info = resolved
        self.validate()

    def getInfo(self):
        return self.info

    def get(self, key):
        return self.info[key]

    def getCommand(self):
        return self.info["command"]

    def getOutDir(self):
        return self.info["out"]

    def validate(self):
        info = self.info
        if info["command"] not in COMMANDS:
            raise ConfigError("command must be one of {}, got {} error @validate".format(COMMANDS, info["command"]))
        if not isinstance(info["ref"], str) or len(info["ref"]) == 0:
            raise ConfigError("a reference (--ref) is required error @validate")
        for key in ("m", "n", "count", "restarts", "cut_restarts"):
            if not _is_int(info[key]) or info[key] < 1:
                raise ConfigError("{} must be a positive integer, got {} error @validate".format(key, info[key]))
        if not _is_int(info["seed"]) or info["seed"] < 0:
            raise ConfigError("seed must be a nonnegative integer, got {} error @validate".format(info["seed"]))
        if info["threads"] is not None and (not _is_int(info["threads"]) or info["threads"] < 1):
            raise ConfigError("threads must be a positive integer error @validate")
        if info["beta"] is not None and not _is_number(info["beta"]):
            raise ConfigError("beta must be a number, got {} error @validate".format(info["beta"]))
        for key in ("eps", "thresholds"):
            if not isinstance(info[key], list) or not all(_is_number(v) for v in info[key]):
                raise ConfigError("{} must be a list of numbers error @validate".format(key))
        if info["thresholds"] != sorted(info["thresholds"]):
            raise ConfigError("thresholds must be sorted error @validate")
        for key in ("k_list", "m_list"):
            if not isinstance(info[key], list) or not all(_is_int(v) and v >= 1 for v in info[key]):
                raise ConfigError("{} must be a list of positive integers error @validate".format(key))
        for key in ("warm_start", "verbose"):
            if not isinstance(info[key], bool):
                raise ConfigError("{} must be true or false error @validate".format(key))
        if info["graphon"] is not None and not isinstance(info["graphon"], str):
            raise ConfigError("graphon must be a reference string error @validate")
        if info["command"] == "psi" and info["beta"] is None:
            raise ConfigError("psi needs --beta error @validate")
        if info["command"] == "rate" and info["graphon"] is None:
            raise ConfigError("rate needs --graphon error @validate")

    @classmethod
    def resolve(cls, command, fileInfo=None, flagInfo=None):
        # defaults < config file < command-line flags; flags left as None do not override
        info = {}
        if fileInfo:
            info.update(fileInfo)
        if fileInfo and fileInfo.get("command", command) != command:
            logging.warning("config file command {} replaced by {}".format(fileInfo.get("command"), command))
        info["command"] = command
        for key, value in (flagInfo or {}).items():
            if value is not None:
                info[key] = value
        return cls(info)

    def toJson(self) -> str:
        return json.dumps(self.info, indent=2, sort_keys=True)

    @classmethod
    def fromJson(cls, text):
        try:
            info = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError("config is not valid JSON: {} error @fromJson".format(e))
        if not isinstance(info, dict):
            raise ConfigError("config must be a JSON object error @fromJson")
        return cls(info)

    @classmethod
    def loadFileInfo(cls, filePath):
        if not os.path.exists(filePath):
            raise ConfigError("config file not found: {} error @loadFileInfo".format(filePath))
        with open(filePath, "r", encoding="utf-8") as f:
            try:
                info = json.load(f)
            except json.JSONDecodeError as e:
                raise ConfigError("config file {} is not valid JSON: {} error @loadFileInfo".format(filePath, e))
        if not isinstance(info, dict):
            raise ConfigError("config file must hold a JSON object error @loadFileInfo")
        return info

    @classmethod
    def loadSelfByInfo(cls, info):
        return cls(info=info)

    def __eq__(self, other):
        return isinstance(other, ExperimentConfig) and self.info == other.info

    def __repr__(self):
        return "ExperimentConfig({},ref={})".format(self.info["command"], self.info["ref"])
