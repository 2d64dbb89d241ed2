"""Session server: datagram sensor feeds plus one line-stream UI client
routed through the affect, controller, scoring, and coach modules.

The message engine is transport-free and synchronous; the asyncio layer
only moves bytes, so every routing rule is unit-testable without sockets.
"""

from __future__ import annotations

import asyncio
import logging
from pathlib import Path
from typing import IO, Optional

from .affect import AttentionMonitor, PainMonitor
from .assist import advance_reference, compute_force
from .coach import CoachState, Phase, Start, Tick, UserAck, advance
from .config import AppConfig
from .errors import DecodeError, ProtocolError
from .scoring import metrics_from_arrays
from .trajectory import project
from .wire import (
    WireMessage,
    decode,
    encode,
    frame_from_msg,
    handle_to_state,
    msg_agent_action,
    msg_event,
    msg_force,
    msg_hello,
    msg_metrics,
)

log = logging.getLogger(__name__)

HEARTBEAT_S = 5.0


class _Accumulator:
    """Per-session scoring state fed by inbound HANDLE messages."""

    def __init__(self) -> None:
        self.t: list[float] = []
        self.dev: list[float] = []
        self.distance = 0.0
        self.last_pos: Optional[tuple[float, float]] = None
        self.s_ref = 0.0
        self.start_ts: Optional[float] = None


class MessageEngine:
    """Applies one inbound message to the session state.

    Returns the outbound messages it produced; the caller owns delivery
    and logging.  ``done`` flips after an abort.
    """

    def __init__(self, cfg: AppConfig, log_fh: Optional[IO[bytes]] = None):
        self.cfg = cfg
        self.coach = CoachState(plan=cfg.plan, seed=cfg.seed)
        self.attention = AttentionMonitor(cfg.thresholds)
        self.pain = PainMonitor(cfg.thresholds)
        self.acc = _Accumulator()
        self.log_fh = log_fh
        self.done = False

    @property
    def phase(self) -> Phase:
        return self.coach.phase

    def _log(self, msg: WireMessage) -> None:
        if self.log_fh is not None:
            self.log_fh.write(encode(msg))

    def process(self, msg: WireMessage) -> list[WireMessage]:
        self._log(msg)
        out: list[WireMessage] = []
        try:
            # Clock progression may end calibration regardless of type.
            self.coach, acts = advance(self.coach, Tick(msg.ts_ms))
            self._emit_actions(acts, msg.ts_ms, out)

            if msg.type == "SESSION_CTRL":
                self._ctrl(msg, out)
            elif msg.type == "FRAME":
                self._frame(msg, out)
            elif msg.type == "HANDLE":
                self._handle(msg, out)
            # HELLO and echoes of outbound types need no routing.
        except ProtocolError as exc:
            log.warning("rejected message: %s", exc)
        for m in out:
            self._log(m)
        return out

    def _emit_actions(self, acts, ts: float, out: list[WireMessage]) -> None:
        for a in acts:
            out.append(msg_agent_action(a, ts))

    def _ctrl(self, msg: WireMessage, out: list[WireMessage]) -> None:
        cmd = msg.fields["command"]
        if cmd == "config":
            if self.coach.phase is not Phase.IDLE:
                raise ProtocolError("config only legal before start")
            if "config" in msg.fields:
                self.cfg = AppConfig.from_dict(msg.fields["config"])
                self.coach = CoachState(plan=self.cfg.plan, seed=self.cfg.seed)
                self.attention = AttentionMonitor(self.cfg.thresholds)
                self.pain = PainMonitor(self.cfg.thresholds)
        elif cmd == "start":
            self.coach, acts = advance(self.coach, Start(msg.ts_ms))
            self._emit_actions(acts, msg.ts_ms, out)
        elif cmd == "ack":
            was = self.coach.phase
            self.coach, acts = advance(self.coach, UserAck(msg.ts_ms))
            self._emit_actions(acts, msg.ts_ms, out)
            if was is not Phase.EXERCISE and self.coach.phase is Phase.EXERCISE:
                self.acc = _Accumulator()
        elif cmd == "abort":
            self.done = True

    def _frame(self, msg: WireMessage, out: list[WireMessage]) -> None:
        frame = frame_from_msg(msg)
        for monitor in (self.attention, self.pain):
            ev = monitor.push(frame)
            if ev is not None:
                self.coach, acts = advance(self.coach, ev)
                out.append(msg_event(ev))
                self._emit_actions(acts, ev.onset_ms, out)

    def _handle(self, msg: WireMessage, out: list[WireMessage]) -> None:
        if self.coach.phase is not Phase.EXERCISE:
            return
        state = handle_to_state(msg)
        spec = self.cfg.plan.exercise
        ref = advance_reference(spec, self.acc.s_ref, state.position)
        self.acc.s_ref = ref.s
        cmd = compute_force(state, ref, self.coach.assist)
        out.append(msg_force(cmd, msg.ts_ms))

        acc = self.acc
        if acc.start_ts is None:
            acc.start_ts = msg.ts_ms
        if acc.t and msg.ts_ms <= acc.t[-1]:
            return  # stale or duplicate sample: keep timestamps increasing
        _, dev = project(spec, state.position)
        if acc.last_pos is not None:
            dx = state.position[0] - acc.last_pos[0]
            dy = state.position[1] - acc.last_pos[1]
            acc.distance += (dx * dx + dy * dy) ** 0.5
        acc.last_pos = state.position
        acc.t.append(msg.ts_ms)
        acc.dev.append(dev)

        duration_ms = self.cfg.plan.per_session_duration_s * 1000.0
        if msg.ts_ms - acc.start_ts >= duration_ms and len(acc.t) >= 2:
            metrics = metrics_from_arrays(
                acc.t,
                acc.dev,
                acc.distance,
                spec,
                self.cfg.scoring,
                session_index=self.coach.session,
            )
            self.coach, acts = advance(self.coach, metrics)
            out.append(msg_metrics(metrics, msg.ts_ms))
            self._emit_actions(acts, msg.ts_ms, out)
            self.acc = _Accumulator()


class SessionServer:
    """Asyncio shell: UDP datagrams in, one TCP line stream for the UI."""

    def __init__(self, cfg: AppConfig, log_path: Optional[str | Path] = None):
        self.cfg = cfg
        self.log_path = log_path
        self._log_fh: Optional[IO[bytes]] = None
        self.engine: Optional[MessageEngine] = None
        self._ui_writers: list[asyncio.StreamWriter] = []
        self._udp: Optional[asyncio.DatagramTransport] = None
        self._tcp_server: Optional[asyncio.base_events.Server] = None
        self._stopped = asyncio.Event()

    # -- delivery ------------------------------------------------------------

    def _broadcast(self, messages: list[WireMessage]) -> None:
        if not messages or not self._ui_writers:
            return
        payload = b"".join(encode(m) for m in messages)
        for w in list(self._ui_writers):
            try:
                w.write(payload)
            except ConnectionError:
                self._ui_writers.remove(w)

    def _dispatch(self, data: bytes, reply, from_ui: bool = False) -> None:
        try:
            msg = decode(data)
        except DecodeError as exc:
            log.warning("dropped datagram: %s", exc)
            return
        out = self.engine.process(msg)
        # FORCE replies go straight back to the sender; everything else
        # (plus FORCE from sensor feeds) fans out to the UI stream.
        for m in out:
            if m.type == "FORCE":
                reply(encode(m))
        fanout = [m for m in out if m.type != "FORCE" or not from_ui]
        self._broadcast(fanout)
        if self.engine.done:
            self._stopped.set()

    # -- transports ----------------------------------------------------------

    async def _on_ui_client(
        self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter
    ) -> None:
        self._ui_writers.append(writer)
        try:
            while not self._stopped.is_set():
                line = await reader.readline()
                if not line:
                    break
                self._dispatch(line, reply=writer.write, from_ui=True)
                await writer.drain()
        except (ConnectionError, asyncio.IncompleteReadError):
            pass
        finally:
            if writer in self._ui_writers:
                self._ui_writers.remove(writer)
            writer.close()

    async def _heartbeat(self) -> None:
        n = 0
        while not self._stopped.is_set():
            await asyncio.sleep(HEARTBEAT_S)
            if self.engine.phase is Phase.IDLE:
                n += 1
                hello = msg_hello("server", n * HEARTBEAT_S * 1000.0)
                self.engine._log(hello)
                self._broadcast([hello])

    async def start(self) -> None:
        if self.log_path is not None:
            self._log_fh = open(self.log_path, "wb")
        self.engine = MessageEngine(self.cfg, self._log_fh)
        loop = asyncio.get_running_loop()

        server = self

        class _Udp(asyncio.DatagramProtocol):
            def connection_made(self, transport):
                self.transport = transport

            def datagram_received(self, data, addr):
                server._dispatch(
                    data, reply=lambda b: self.transport.sendto(b, addr)
                )

        self._udp, _ = await loop.create_datagram_endpoint(
            _Udp, local_addr=("127.0.0.1", self.cfg.udp_port)
        )
        self._tcp_server = await asyncio.start_server(
            self._on_ui_client, "127.0.0.1", self.cfg.tcp_port
        )

    async def run_until_abort(self) -> int:
        hb = asyncio.create_task(self._heartbeat())
        try:
            await self._stopped.wait()
        finally:
            hb.cancel()
            await self.close()
        return 0

    async def close(self) -> None:
        self._stopped.set()
        if self._udp is not None:
            self._udp.close()
        if self._tcp_server is not None:
            self._tcp_server.close()
            await self._tcp_server.wait_closed()
        for w in self._ui_writers:
            w.close()
        self._ui_writers.clear()
        if self._log_fh is not None:
            self._log_fh.flush()
            self._log_fh.close()
            self._log_fh = None


def run_session_server(cfg: AppConfig, log_path: Optional[str | Path] = None) -> int:
    """Blocking entry point; returns the process exit status."""

    async def main() -> int:
        server = SessionServer(cfg, log_path)
        await server.start()
        log.info(
            "listening: udp %d, tcp %d", cfg.udp_port, cfg.tcp_port
        )
        return await server.run_until_abort()

    try:
        return asyncio.run(main())
    except OSError as exc:
        log.error("startup failed: %s", exc)
        return 1
