"""Line-delimited JSON service exposing predict / observe / snapshot.

One JSON object per line in both directions over a plain TCP socket:

    {"kind": "predict", "url": "/a", "window": 2}   -> {"window": ["/b", "/c"]}
    {"kind": "observe", "url": "/a", "session": "s1"} -> {"ok": true}
    {"kind": "snapshot"}                            -> {"snapshot": "<model csv>"}

Malformed requests get an {"error": ...} response and the connection stays
usable.  Observes are serialized through one lock and advance the model's
logical clock by one tick each; sweeps fire whenever the clock reaches a
multiple of the configured sweep period, so a given request sequence always
leaves the same model behind.
"""

from __future__ import annotations

import json
import socketserver
import threading

from .config import EngineConfig
from .errors import EngineError
from .model import Model, model_to_csv
from .predictor import predict
from .updates import SessionEvent, SweepEvent, apply_event


class PredictionService:
    """Request handler around one model; transport-independent."""

    def __init__(self, model: Model, cfg: EngineConfig):
        self.model = model
        self.cfg = cfg
        self._lock = threading.Lock()

    def handle(self, request: object) -> dict:
        if not isinstance(request, dict):
            return {"error": "request must be a JSON object"}
        kind = request.get("kind")
        try:
            if kind == "predict":
                return self._predict(request)
            if kind == "observe":
                return self._observe(request)
            if kind == "snapshot":
                with self._lock:
                    return {"snapshot": model_to_csv(self.model)}
            return {"error": f"unknown kind {kind!r}"}
        except EngineError as e:
            return {"error": str(e)}

    def handle_line(self, line: str) -> str:
        try:
            request = json.loads(line)
        except json.JSONDecodeError as e:
            return json.dumps({"error": f"bad JSON: {e.msg}"})
        return json.dumps(self.handle(request))

    def _predict(self, request: dict) -> dict:
        url = request.get("url")
        if not isinstance(url, str):
            return {"error": "predict needs a string 'url'"}
        window = request.get("window", self.cfg.window)
        if not isinstance(window, int) or window < 0:
            return {"error": "'window' must be a non-negative integer"}
        with self._lock:
            prediction = predict(self.model, url, window)
        return {"window": list(prediction.window)}

    def _observe(self, request: dict) -> dict:
        url = request.get("url")
        if not isinstance(url, str):
            return {"error": "observe needs a string 'url'"}
        session = request.get("session", "")
        with self._lock:
            if url not in self.model.records:
                return {"error": f"unknown page {url}"}
            tick = self.model.tick + 1
            update_cfg = self.cfg.update_config()
            apply_event(self.model, update_cfg, SessionEvent(session_id=str(session), url=url, tick=tick))
            if tick % self.cfg.sweep_period == 0:
                apply_event(self.model, update_cfg, SweepEvent(tick=tick))
        return {"ok": True}

    def snapshot_csv(self) -> str:
        with self._lock:
            return model_to_csv(self.model)


class _LineHandler(socketserver.StreamRequestHandler):
    def handle(self):
        for raw in self.rfile:
            line = raw.decode("utf-8", errors="replace").strip()
            if not line:
                continue
            response = self.server.service.handle_line(line)
            self.wfile.write(response.encode("utf-8") + b"\n")
            self.wfile.flush()


class PredictionServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address, service: PredictionService):
        super().__init__(address, _LineHandler)
        self.service = service


def serve(
    model: Model,
    cfg: EngineConfig,
    host: str = "127.0.0.1",
    port: int = 8750,
    snapshot_path: str | None = None,
) -> None:
    """Run the service until interrupted; flush a final snapshot on the way out.

    Prints the bound address once ready, so `port=0` (pick a free port)
    is usable from scripts.
    """
    service = PredictionService(model, cfg)
    server = PredictionServer((host, port), service)
    bound_host, bound_port = server.server_address[:2]
    print(f"listening on {bound_host}:{bound_port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
        if snapshot_path is not None:
            with open(snapshot_path, "w", encoding="utf-8") as fh:
                fh.write(service.snapshot_csv())
