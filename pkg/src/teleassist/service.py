"""Streaming command/event service around one session controller.

Wire format: JSON documents over a persistent bidirectional WebSocket (each
text frame is one length-delimited document), plus a plain GET route for
snapshots. Every message is an envelope::

    {"seq": <int>, "kind": "command" | "reply" | "event", "payload": {...}}

Commands (payload.type):
    inject_object    {object_class, pose{position, orientation_xyzw}}
    override_pose    {object_id, pose}
    activate         {object_id?}
    feed_observation {t, values}         -> reply {accepted, dropped_total}
    respond          {verdict: accept|reject}
    advance          {delta}             -> reply {cursor}
    tick             {dt}                -> reply {follower}
    abort            {}
    get_snapshot     {}                  -> reply {snapshot}

Every command receives exactly one reply carrying the command's seq; an
error reply names the offending command and the current session state.
Events (snapshot, object_added, availability, pose_overridden,
state_changed, proposal, progress, deviation_warning, gripper) fan out to
every connected client in mutation order. Received commands can be recorded
as JSON lines and replayed deterministically.
"""

from __future__ import annotations

import asyncio
import json
from pathlib import Path

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from .config import AssistConfig
from .errors import AssistanceError, ParseError, SchemaError
from .geometry import Pose
from .scene import SceneRegistry, TaskRegistry
from .session import SessionController

EVENT_BACKLOG_LIMIT = 1024


def build_controller(config: AssistConfig, tasks: TaskRegistry | None = None):
    """Controller wired to a fresh scene; tasks come from the manifest if not given."""
    if tasks is None:
        if not config.manifest:
            raise SchemaError("config.manifest must point to a registry manifest")
        tasks = TaskRegistry.from_manifest(config.manifest)
    events: list = []
    controller = SessionController(SceneRegistry(tasks), config, emit=events.append)
    return controller, events


class ServiceHub:
    """Serializes commands against the controller and numbers outgoing events."""

    def __init__(self, controller, pending_events: list, record_path=None):
        self.controller = controller
        self._pending = pending_events
        self._event_seq = 0
        self._record = open(record_path, "w", encoding="utf-8") if record_path else None
        self._handlers = {
            "inject_object": self._inject_object,
            "override_pose": self._override_pose,
            "activate": self._activate,
            "feed_observation": self._feed_observation,
            "respond": self._respond,
            "advance": self._advance,
            "tick": self._tick,
            "abort": self._abort,
            "get_snapshot": self._get_snapshot,
        }

    # -- command handlers --------------------------------------------------

    def _inject_object(self, cmd):
        obj = self.controller.inject_detection(
            cmd["object_class"], Pose.from_dict(cmd["pose"])
        )
        return {"object_id": obj.id}

    def _override_pose(self, cmd):
        obj = self.controller.override_pose(cmd["object_id"], Pose.from_dict(cmd["pose"]))
        return {"object_id": obj.id, "pose_source": obj.pose_source}

    def _activate(self, cmd):
        self.controller.activate(cmd.get("object_id"))
        return {}

    def _feed_observation(self, cmd):
        accepted = self.controller.feed_observation(
            float(cmd["t"]), np.asarray(cmd["values"], dtype=float)
        )
        return {
            "accepted": accepted,
            "dropped_total": self.controller.dropped_samples,
            "state": self.controller.session.state.value,
        }

    def _respond(self, cmd):
        self.controller.respond(cmd["verdict"])
        return {}

    def _advance(self, cmd):
        session = self.controller.session  # completion swaps in a fresh session
        self.controller.advance(float(cmd["delta"]))
        return {"cursor": session.cursor}

    def _tick(self, cmd):
        follower = self.controller.tick(float(cmd.get("dt", 0.02)))
        return {"follower": follower}

    def _abort(self, cmd):
        self.controller.abort()
        return {}

    def _get_snapshot(self, cmd):
        return {"snapshot": self.controller.snapshot()}

    # -- dispatch ------------------------------------------------------------

    def execute(self, payload: dict):
        """Run one command; returns (reply_payload, [event envelopes])."""
        if self._record is not None:
            self._record.write(json.dumps(payload) + "\n")
            self._record.flush()
        command_type = payload.get("type")
        handler = self._handlers.get(command_type)
        if handler is None:
            reply = {
                "ok": False,
                "command": command_type,
                "error": "UnknownCommand",
                "message": f"unknown command type {command_type!r}",
                "state": self.controller.session.state.value,
            }
            return reply, self._drain_events()
        try:
            extra = handler(payload) or {}
            reply = {"ok": True, "command": command_type, **extra}
        except AssistanceError as exc:
            reply = {
                "ok": False,
                "command": command_type,
                "error": type(exc).__name__,
                "message": str(exc),
                "state": self.controller.session.state.value,
            }
        except (KeyError, TypeError, ValueError) as exc:
            reply = {
                "ok": False,
                "command": command_type,
                "error": "MalformedCommand",
                "message": f"{type(exc).__name__}: {exc}",
                "state": self.controller.session.state.value,
            }
        return reply, self._drain_events()

    def _drain_events(self):
        envelopes = []
        for payload in self._pending:
            self._event_seq += 1
            envelopes.append({"seq": self._event_seq, "kind": "event", "payload": payload})
        self._pending.clear()
        return envelopes

    def snapshot_envelope(self):
        self._event_seq += 1
        return {
            "seq": self._event_seq,
            "kind": "event",
            "payload": {"type": "snapshot", **self.controller.snapshot()},
        }

    def close(self):
        if self._record is not None:
            self._record.close()
            self._record = None


def run_script(hub: ServiceHub, commands) -> tuple:
    """Execute a command list; returns (replies, events) — the scripted-client path."""
    replies = []
    events = []
    for command in commands:
        reply, evs = hub.execute(command)
        replies.append(reply)
        events.extend(evs)
    return replies, events


def load_command_log(path) -> list:
    commands = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                commands.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", f"{path}:{lineno}") from exc
    return commands


def replay_command_log(path, config: AssistConfig, tasks: TaskRegistry | None = None):
    """Re-run a recorded command log against a fresh controller."""
    controller, pending = build_controller(config, tasks)
    hub = ServiceHub(controller, pending)
    return run_script(hub, load_command_log(path))


# --- ASGI app ---------------------------------------------------------------


def build_app(hub: ServiceHub, static_dir=None):
    """FastAPI app exposing the hub over /ws, /snapshot and static assets."""
    app = FastAPI(title="teleassist service")
    lock = asyncio.Lock()
    subscribers: set = set()

    @app.get("/snapshot")
    async def snapshot():
        async with lock:
            return hub.controller.snapshot()

    async def _pump(websocket, queue: asyncio.Queue):
        while True:
            message = await queue.get()
            await websocket.send_text(json.dumps(message))

    @app.websocket("/ws")
    async def websocket_endpoint(websocket: WebSocket):
        await websocket.accept()
        queue: asyncio.Queue = asyncio.Queue(maxsize=EVENT_BACKLOG_LIMIT)
        subscribers.add(queue)
        pump_task = asyncio.create_task(_pump(websocket, queue))
        try:
            async with lock:
                queue.put_nowait(hub.snapshot_envelope())
            while True:
                raw = await websocket.receive_text()
                try:
                    envelope = json.loads(raw)
                except json.JSONDecodeError as exc:
                    envelope = {"seq": None, "payload": {"type": None}}
                    reply_payload = {
                        "ok": False, "command": None, "error": "MalformedEnvelope",
                        "message": exc.msg,
                        "state": hub.controller.session.state.value,
                    }
                    queue.put_nowait({"seq": envelope.get("seq"), "kind": "reply",
                                      "payload": reply_payload})
                    continue
                async with lock:
                    reply, events = hub.execute(envelope.get("payload") or {})
                    queue.put_nowait(
                        {"seq": envelope.get("seq"), "kind": "reply", "payload": reply}
                    )
                    dead = []
                    for sub in subscribers:
                        try:
                            for event in events:
                                sub.put_nowait(event)
                        except asyncio.QueueFull:
                            dead.append(sub)  # slow client: cut it loose
                    for sub in dead:
                        subscribers.discard(sub)
        except WebSocketDisconnect:
            pass
        finally:
            subscribers.discard(queue)
            pump_task.cancel()

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="console")
    return app


def serve(config: AssistConfig, record_path=None, static_dir=None,
          startup_commands=()) -> None:
    """Build everything from the config and block serving clients."""
    import uvicorn

    controller, pending = build_controller(config)
    hub = ServiceHub(controller, pending, record_path=record_path)
    for command in startup_commands:
        reply, _ = hub.execute(command)
        if not reply.get("ok"):
            raise SchemaError(f"startup command failed: {reply.get('message')}")
    app = build_app(hub, static_dir=static_dir)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
