# hecke/logs.py
# Diagnósticos en stderr; stdout queda reservado para la salida JSON.
from __future__ import annotations
import json
import sys


def log(msg: str):
    print(msg, flush=True, file=sys.stderr)


def log_json(**kv):
    log(json.dumps(kv, ensure_ascii=False, default=str))
