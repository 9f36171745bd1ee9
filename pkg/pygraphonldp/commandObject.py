import os
import json
from abc import abstractmethod

from .General import ConfigError, get_thread_count, is_inside_directory, write_atomic
from .Reference import parse_reference


class commandObject:
    name = None

    def __init__(self, config):
        self.config = config
        self.outDir = config.getOutDir()
        self.written = []

    def getConfig(self):
        return self.config

    def getThreads(self):
        threads = self.config.get("threads")
        return threads if threads is not None else get_thread_count()

    @abstractmethod
    def execute(self, progress_callback=None) -> dict:
        pass
        # returns the summary printed by the CLI

    def derivedSeeds(self) -> dict:
        return {"master": self.config.get("seed")}

    def getReference(self):
        return parse_reference(self.config.get("ref"), self.config.get("m"))

    def getGraphon(self):
        return parse_reference(self.config.get("graphon"), self.config.get("m"))

    def outPath(self, fileName):
        path = os.path.join(self.outDir, fileName)
        if not is_inside_directory(self.outDir, path):
            raise ConfigError("refusing to write {} outside {} error @outPath".format(path, self.outDir))
        return path

    def writeText(self, fileName, text):
        write_atomic(self.outPath(fileName), text)
        self.written.append(fileName)

    def writeJson(self, fileName, info):
        self.writeText(fileName, json.dumps(info, indent=2, sort_keys=True) + "\n")

    @classmethod
    def loadSelfByInfo(cls, info):
        from .Experiment import ExperimentConfig

        return cls(ExperimentConfig(info))

    def __repr__(self):
        return "{}({})".format(self.__class__.__name__, self.outDir)
