"""Live teleoperation service: runs simulation sessions and exposes them
over WebSockets.

Endpoints:
  GET /envs               registry listing as JSON
  GET /session/{id}       WebSocket; inbound CommandMessage JSON, outbound
                          RenderFrame JSON (the env-core schema)
  POST /kill              stop every session and shut the server down

Commands latch last-write-wins: each simulation tick consumes the most
recent twist/suspension values; nothing is queued. Slow subscribers never
stall the loop — each has a depth-1 queue where newer frames replace older
ones. The loop is deadline-scheduled at the physics rate (50 Hz) with
catch-up, broadcasting at 20 Hz.
"""

from __future__ import annotations

import asyncio
import contextlib
import json
import math
import zlib
from dataclasses import dataclass
from typing import Optional

import numpy as np
from aiohttp import WSMsgType, web

from .core import RoverGymError, make, registry
from .dynamics import DT

DEFAULT_PORT = 8631

COMMAND_KINDS = ("twist", "suspension", "reset", "stop")


class BindFailure(RoverGymError):
    pass


class BadCommand(RoverGymError):
    pass


def parse_command(text: str) -> dict:
    """Validate an inbound CommandMessage; raises BadCommand on any schema
    violation (unknown kind, wrong fields, non-finite values)."""
    try:
        msg = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError):
        raise BadCommand("not valid JSON") from None
    if not isinstance(msg, dict):
        raise BadCommand("command must be a JSON object")
    kind = msg.get("kind")
    if kind not in COMMAND_KINDS:
        raise BadCommand(f"unknown command kind {kind!r}")
    if kind == "twist":
        twist = msg.get("twist")
        if (not isinstance(twist, dict)
                or not _finite_number(twist.get("linear"))
                or not _finite_number(twist.get("angular"))):
            raise BadCommand("twist requires finite linear and angular")
    elif kind == "suspension":
        motors = msg.get("motors")
        if (not isinstance(motors, list) or len(motors) != 4
                or not all(_finite_number(m) for m in motors)):
            raise BadCommand("suspension requires 4 finite motor values")
    return msg


def _finite_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) \
        and math.isfinite(v)


@dataclass
class _Latch:
    """Latest-command holder; consumed (not cleared) every tick."""
    linear: float = 0.0
    angular: float = 0.0
    motors: tuple = (0.0, 0.0, 0.0, 0.0)
    reset_requested: bool = False


class Session:
    """One simulation loop owning one environment exclusively."""

    # 20 Hz broadcast at a 50 Hz simulation rate: one frame per 2.5 ticks,
    # via a fractional accumulator (alternating 2- and 3-tick gaps)
    BROADCAST_PERIOD_TICKS = 2.5

    def __init__(self, session_id: str, env_id: str, seed: int):
        self.id = session_id
        self.env_id = env_id
        self.env = make(env_id, seed)
        self.env.reset()
        self.latch = _Latch()
        self.subscribers: set[asyncio.Queue] = set()
        self.running = True
        self._task: Optional[asyncio.Task] = None

    def start(self) -> None:
        self._task = asyncio.get_running_loop().create_task(self._run())

    async def stop(self) -> None:
        self.running = False
        if self._task is not None:
            self._task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await self._task
            self._task = None

    def apply(self, msg: dict) -> dict:
        """Latch a validated command; returns the ack payload."""
        kind = msg["kind"]
        if kind == "twist":
            self.latch.linear = float(msg["twist"]["linear"])
            self.latch.angular = float(msg["twist"]["angular"])
        elif kind == "suspension":
            self.latch.motors = tuple(float(m) for m in msg["motors"])
        elif kind == "reset":
            self.latch.reset_requested = True
        elif kind == "stop":
            self.running = False
        return {"ok": kind}

    def _action(self) -> np.ndarray:
        """Map the latched command onto this env's action layout."""
        dim = self.env.action_space.dim
        if dim >= 6:
            return np.array([*self.latch.motors, self.latch.linear,
                             self.latch.angular])
        if dim == 2:
            return np.array([self.latch.linear, self.latch.angular])
        return np.array([self.latch.linear])

    async def _run(self) -> None:
        loop = asyncio.get_running_loop()
        next_tick = loop.time()
        broadcast_due = self.BROADCAST_PERIOD_TICKS
        while self.running:
            if self.latch.reset_requested:
                self.latch = _Latch()
                self.env.reset()
            result = self.env.step(self._action())
            if result.done:
                self.env.reset()
            broadcast_due -= 1.0
            if broadcast_due <= 0.0:
                broadcast_due += self.BROADCAST_PERIOD_TICKS
                frame = self.env.render().to_json()
                for queue in self.subscribers:
                    if queue.full():  # newest wins; slow readers drop frames
                        with contextlib.suppress(asyncio.QueueEmpty):
                            queue.get_nowait()
                    queue.put_nowait(frame)
            next_tick += DT
            delay = next_tick - loop.time()
            if delay > 0:
                await asyncio.sleep(delay)
            # behind schedule: run the next tick immediately (catch-up)


class TeleopServer:
    """aiohttp application hosting sessions; sessions are created on first
    WebSocket connect to /session/{id} using the server's default env."""

    def __init__(self, env_id: str, seed: int = 0, host: str = "127.0.0.1",
                 port: int = DEFAULT_PORT):
        if env_id not in registry():
            from .core import UnknownEnvironment
            raise UnknownEnvironment(env_id)
        self.env_id = env_id
        self.seed = seed
        self.host = host
        self.port = port
        self.sessions: dict[str, Session] = {}
        self.app = web.Application()
        self.app.router.add_get("/envs", self._handle_envs)
        self.app.router.add_get("/session/{id}", self._handle_session)
        self.app.router.add_post("/kill", self._handle_kill)
        self._runner: Optional[web.AppRunner] = None
        self._accepting = True

    # -- lifecycle ----------------------------------------------------------
    async def start(self) -> None:
        self._runner = web.AppRunner(self.app)
        await self._runner.setup()
        site = web.TCPSite(self._runner, self.host, self.port)
        try:
            await site.start()
        except OSError as exc:
            raise BindFailure(f"cannot bind {self.host}:{self.port}: {exc}") from None

    async def shutdown(self) -> None:
        await self.kill_all()
        if self._runner is not None:
            await self._runner.cleanup()
            self._runner = None

    async def kill_all(self) -> int:
        """Stop every session; idempotent, returns the number stopped."""
        self._accepting = False
        stopped = 0
        for session in list(self.sessions.values()):
            await session.stop()
            stopped += 1
        self.sessions.clear()
        return stopped

    # -- handlers ----------------------------------------------------------
    async def _handle_envs(self, request: web.Request) -> web.Response:
        listing = [
            {"id": spec.env_id, "obs_dim": spec.obs_dim, "act_dim": spec.act_dim}
            for spec in registry().values()
        ]
        return web.json_response(listing)

    async def _handle_kill(self, request: web.Request) -> web.Response:
        count = await self.kill_all()
        # respond first; tear the server down shortly after the reply flushes
        asyncio.get_running_loop().call_later(
            0.1, lambda: asyncio.ensure_future(self._cleanup_later()))
        return web.json_response({"stopped": count})

    async def _cleanup_later(self) -> None:
        if self._runner is not None:
            await self._runner.cleanup()
            self._runner = None

    async def _handle_session(self, request: web.Request) -> web.WebSocketResponse:
        if not self._accepting:
            raise web.HTTPGone(text="server is shutting down")
        session_id = request.match_info["id"]
        session = self.sessions.get(session_id)
        if session is None:
            # per-session seed derived stably from the id
            seed = (self.seed + zlib.crc32(session_id.encode("utf-8"))) \
                & 0x7FFFFFFF
            session = Session(session_id, self.env_id, seed)
            self.sessions[session_id] = session
            session.start()

        ws = web.WebSocketResponse()
        await ws.prepare(request)
        queue: asyncio.Queue = asyncio.Queue(maxsize=1)
        session.subscribers.add(queue)
        sender = asyncio.get_running_loop().create_task(
            self._pump_frames(ws, queue))
        try:
            async for msg in ws:
                if msg.type != WSMsgType.TEXT:
                    continue
                try:
                    command = parse_command(msg.data)
                except BadCommand:
                    await ws.send_str(json.dumps({"error": "bad_command"}))
                    continue
                ack = session.apply(command)
                await ws.send_str(json.dumps(ack))
                if command["kind"] == "stop":
                    await session.stop()
                    self.sessions.pop(session.id, None)
                    break
        finally:
            sender.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await sender
            session.subscribers.discard(queue)
            with contextlib.suppress(Exception):
                await ws.close()
        return ws

    @staticmethod
    async def _pump_frames(ws: web.WebSocketResponse,
                           queue: asyncio.Queue) -> None:
        while True:
            frame = await queue.get()
            if ws.closed:
                return
            await ws.send_str(frame)


async def serve_forever(env_id: str, seed: int = 0, host: str = "127.0.0.1",
                        port: int = DEFAULT_PORT,
                        static_dir: Optional[str] = None) -> None:
    """Run the service until cancelled (used by the CLI serve command)."""
    server = TeleopServer(env_id, seed, host, port)
    if static_dir is not None:
        server.app.router.add_get(
            "/", lambda request: web.FileResponse(f"{static_dir}/index.html"))
        server.app.router.add_static("/static", static_dir)
    await server.start()
    try:
        while server._runner is not None:
            await asyncio.sleep(0.2)
    finally:
        await server.shutdown()
