import logging
import os
import sys
from pathlib import Path
from logging.handlers import RotatingFileHandler
from typing import Optional

LOG_DIR_ENV = "ITERSCB_LOG_DIR"
LOG_FILE = "iterscb.log"

class Logger:
    """Process-wide logging setup for the CLI.

    Library modules only ever call get_logger(); handlers are attached once,
    by the entry point, through get_instance().
    """
    _instance: Optional['Logger'] = None
    
    def __init__(self, log_dir: Optional[Path] = None, verbose: bool = False):
        if Logger._instance is not None:
            raise RuntimeError("Logger is a singleton! Use Logger.get_instance()")
            
        self.logs_dir = Path(log_dir or os.environ.get(LOG_DIR_ENV, "logs"))
        self.logs_dir.mkdir(parents=True, exist_ok=True)
        
        self.logger = logging.getLogger()
        self.logger.setLevel(logging.DEBUG)
        
        # Console: stdout is reserved for report output
        self.console_handler = logging.StreamHandler(sys.stderr)
        self.console_handler.setLevel(logging.DEBUG if verbose else logging.INFO)
        self.console_handler.setFormatter(logging.Formatter('%(levelname)s: %(message)s'))
        self.logger.addHandler(self.console_handler)
        
        # Experiment runs are long; keep a full DEBUG trail on disk
        file_handler = RotatingFileHandler(
            self.logs_dir / LOG_FILE,
            maxBytes=10*1024*1024,  # 10MB
            backupCount=5
        )
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter(
            '%(asctime)s - %(processName)s - %(name)s - %(levelname)s - %(message)s'
        ))
        self.logger.addHandler(file_handler)
        
        # numpy RuntimeWarnings end up in the log file instead of bare stderr
        logging.captureWarnings(True)
        
        Logger._instance = self
        
    @staticmethod
    def get_instance(log_dir: Optional[Path] = None, verbose: bool = False) -> logging.Logger:
        if Logger._instance is None:
            Logger(log_dir=log_dir, verbose=verbose)
        elif verbose:
            Logger._instance.console_handler.setLevel(logging.DEBUG)
        return Logger._instance.logger
        
    @staticmethod
    def get_logger(name: str) -> logging.Logger:
        """Get a named logger that inherits root logger settings"""
        return logging.getLogger(name)
