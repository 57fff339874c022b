"""Packets, links, drop-tail queues, nodes, and the dumbbell topology.

Links are store-and-forward with exact integer-nanosecond serialization
(rounded up). Queue occupancy counts waiting packets only; the packet being
serialized has left the queue. Every egress port is an Interface owning one
queue and one unidirectional link.
"""

from collections import Counter, deque
from typing import Callable, Optional

from .errors import ConfigError, SimulationError
from .kernel import Kernel, NS_PER_S, s_to_ticks

HEADER_BYTES = 40

UPLINK = "uplink"
DOWNLINK = "downlink"


def serialization_ns(wire_bytes: int, rate_bps: int) -> int:
    """Time to clock wire_bytes onto a rate_bps link, rounded up to whole ns."""
    return (wire_bytes * 8 * NS_PER_S + rate_bps - 1) // rate_bps


class TcpHeader:
    __slots__ = ("seq", "ack", "psh", "is_ack", "sack_blocks")

    def __init__(self, seq: int = 0, ack: int = 0, psh: bool = False,
                 is_ack: bool = False, sack_blocks: tuple = ()):
        if len(sack_blocks) > 3:
            raise SimulationError("a header carries at most 3 SACK blocks")
        self.seq = seq
        self.ack = ack
        self.psh = psh
        self.is_ack = is_ack
        self.sack_blocks = tuple(sack_blocks)


class Packet:
    __slots__ = ("pid", "flow", "direction", "src", "dst", "header",
                 "payload_bytes", "wire_bytes", "t_created", "t_enqueued")

    def __init__(self, pid: int, flow: str, direction: str, src: str, dst: str,
                 header: TcpHeader, payload_bytes: int, t_created: int):
        if payload_bytes < 0:
            raise SimulationError("negative payload")
        self.pid = pid
        self.flow = flow
        self.direction = direction
        self.src = src
        self.dst = dst
        self.header = header
        self.payload_bytes = payload_bytes
        self.wire_bytes = payload_bytes + HEADER_BYTES
        self.t_created = t_created
        self.t_enqueued = -1

    def __repr__(self):
        kind = "ack" if self.header.is_ack else "data"
        return (f"Packet(#{self.pid} {self.flow}/{kind} {self.src}->{self.dst} "
                f"{self.wire_bytes}B)")


class Link:
    """Unidirectional pipe with fixed rate and propagation delay."""

    __slots__ = ("rate_bps", "prop_delay_ns", "busy_until")

    def __init__(self, rate_bps: int, prop_delay_ns: int):
        if rate_bps <= 0:
            raise ConfigError("link rate must be positive")
        if prop_delay_ns < 0:
            raise ConfigError("propagation delay must be non-negative")
        self.rate_bps = rate_bps
        self.prop_delay_ns = prop_delay_ns
        self.busy_until = 0

    def transmit(self, packet: Packet, now: int) -> tuple:
        """Occupy the link for one packet; returns (start, end_tx, delivery)."""
        start = max(now, self.busy_until)
        self.busy_until = start + serialization_ns(packet.wire_bytes, self.rate_bps)
        return start, self.busy_until, self.busy_until + self.prop_delay_ns


class DropTailQueue:
    """FIFO buffer counted in packets; capacity None means unbounded."""

    __slots__ = ("name", "capacity_pkts", "fifo", "drops_by_flow", "waiting_bytes",
                 "accepted_total", "dequeued_total", "dropped_total",
                 "max_occupancy", "probe")

    def __init__(self, name: str, capacity_pkts: Optional[int] = None):
        if capacity_pkts is not None and capacity_pkts <= 0:
            raise ConfigError(f"queue {name}: capacity_pkts must be positive")
        self.name = name
        self.capacity_pkts = capacity_pkts
        self.fifo: deque = deque()
        self.drops_by_flow: Counter = Counter()
        self.waiting_bytes = 0
        self.accepted_total = 0
        self.dequeued_total = 0
        self.dropped_total = 0
        self.max_occupancy = 0
        self.probe: Optional[Callable[[int, int, int, int], None]] = None

    def __len__(self):
        return len(self.fifo)

    def enqueue(self, packet: Packet, now: int) -> bool:
        """Append the packet, or drop it when the buffer is at capacity."""
        if self.capacity_pkts is not None and len(self.fifo) >= self.capacity_pkts:
            self.drop(packet, now)
            return False
        packet.t_enqueued = now
        self.fifo.append(packet)
        self.waiting_bytes += packet.wire_bytes
        self.accepted_total += 1
        if len(self.fifo) > self.max_occupancy:
            self.max_occupancy = len(self.fifo)
        self._note(now)
        return True

    def drop(self, packet: Packet, now: int) -> None:
        self.dropped_total += 1
        self.drops_by_flow[packet.flow] += 1
        self._note(now)

    def pop(self, now: int) -> Optional[Packet]:
        if not self.fifo:
            return None
        packet = self.fifo.popleft()
        self.waiting_bytes -= packet.wire_bytes
        self.dequeued_total += 1
        self._note(now)
        return packet

    def _note(self, now: int) -> None:
        if self.probe is not None:
            self.probe(now, len(self.fifo), self.waiting_bytes, self.dropped_total)


class Interface:
    """Egress port: a drop-tail queue feeding one link, work-conserving."""

    __slots__ = ("kernel", "name", "link", "queue", "deliver", "busy",
                 "current_tx_end", "on_delay", "drop_filter")

    def __init__(self, kernel: Kernel, name: str, link: Link, queue: DropTailQueue,
                 deliver: Callable[[Packet], None]):
        self.kernel = kernel
        self.name = name
        self.link = link
        self.queue = queue
        self.deliver = deliver
        self.busy = False
        self.current_tx_end: Optional[int] = None
        self.on_delay: Optional[Callable[[Packet, int], None]] = None
        self.drop_filter: Optional[Callable[[Packet], bool]] = None

    def send(self, packet: Packet) -> None:
        now = self.kernel.now
        if self.drop_filter is not None and self.drop_filter(packet):
            packet.t_enqueued = now
            self.queue.drop(packet, now)
            return
        if not self.busy:
            packet.t_enqueued = now
            self._start_tx(packet)
        else:
            self.queue.enqueue(packet, now)

    def _start_tx(self, packet: Packet) -> None:
        now = self.kernel.now
        self.busy = True
        if self.on_delay is not None:
            self.on_delay(packet, now - packet.t_enqueued)
        _start, end_tx, delivery = self.link.transmit(packet, now)
        self.current_tx_end = end_tx
        self.kernel.schedule(end_tx, self._tx_done, None,
                             kind="transmit-complete", target=self.name)
        self.kernel.schedule(delivery, self.deliver, packet,
                             kind="packet-arrival", target=self.name)

    def _tx_done(self, _arg) -> None:
        nxt = self.queue.pop(self.kernel.now)
        if nxt is None:
            self.busy = False
            self.current_tx_end = None
        else:
            self._start_tx(nxt)


class Node:
    """Forwarding element: routes by destination, hands local traffic to handlers."""

    __slots__ = ("name", "routes", "default_route", "handlers", "on_packet")

    def __init__(self, name: str):
        self.name = name
        self.routes: dict = {}
        self.default_route: Optional[Interface] = None
        self.handlers: dict = {}
        self.on_packet: Optional[Callable[[Packet], None]] = None

    def originate(self, packet: Packet) -> None:
        self._forward(packet)

    def receive(self, packet: Packet) -> None:
        if self.on_packet is not None:
            self.on_packet(packet)
        if packet.dst == self.name:
            kind = "ack" if packet.header.is_ack else "data"
            handler = self.handlers.get((packet.flow, kind))
            if handler is None:
                raise SimulationError(
                    f"node {self.name}: no {kind} handler for flow {packet.flow!r}")
            handler(packet)
        else:
            self._forward(packet)

    def _forward(self, packet: Packet) -> None:
        iface = self.routes.get(packet.dst, self.default_route)
        if iface is None:
            raise SimulationError(f"node {self.name}: no route to {packet.dst!r}")
        iface.send(packet)


class Topology:
    __slots__ = ("nodes", "queues", "uplink_queue", "downlink_queue",
                 "uplink_iface", "downlink_iface", "all_queues")

    def __init__(self, nodes, queues, uplink_iface, downlink_iface, all_queues):
        self.nodes = nodes
        self.queues = queues
        self.uplink_queue = queues[UPLINK]
        self.downlink_queue = queues[DOWNLINK]
        self.uplink_iface = uplink_iface
        self.downlink_iface = downlink_iface
        self.all_queues = all_queues


def build_dumbbell(kernel: Kernel, *, uplink_rate_bps: int, downlink_rate_bps: int,
                   lan_rate_bps: int, one_way_delay_s: float,
                   uplink_buffer_pkts: int, downlink_buffer_pkts: int,
                   lan_delay_s: float = 0.0001,
                   access_delay_s: float = 0.001) -> Topology:
    """Two client hosts behind a home router, two servers behind an ISP router.

    The access link between the routers is the asymmetric bottleneck. The
    configured one-way delay is propagation only, split as one LAN hop plus
    the access hop plus the remainder on the WAN hops.
    """
    for key, value in (("uplink_rate_bps", uplink_rate_bps),
                       ("downlink_rate_bps", downlink_rate_bps),
                       ("lan_rate_bps", lan_rate_bps)):
        if value <= 0:
            raise ConfigError(f"{key}: must be positive")
    for key, value in (("uplink_buffer_pkts", uplink_buffer_pkts),
                       ("downlink_buffer_pkts", downlink_buffer_pkts)):
        if value <= 0:
            raise ConfigError(f"{key}: must be positive")
    lan_ns = s_to_ticks(lan_delay_s)
    access_ns = s_to_ticks(access_delay_s)
    wan_ns = s_to_ticks(one_way_delay_s) - lan_ns - access_ns
    if wan_ns <= 0:
        raise ConfigError("one_way_delay_s: must exceed the LAN plus access link delays")

    nodes = {name: Node(name) for name in
             ("wow_client", "ftp_client", "home", "isp", "wow_server", "ftp_server")}

    def port(src: str, dst: str, rate: int, prop_ns: int,
             queue: Optional[DropTailQueue] = None) -> Interface:
        q = queue if queue is not None else DropTailQueue(f"{src}->{dst}")
        iface = Interface(kernel, f"{src}->{dst}", Link(rate, prop_ns), q,
                          nodes[dst].receive)
        return iface

    uplink_queue = DropTailQueue(UPLINK, uplink_buffer_pkts)
    downlink_queue = DropTailQueue(DOWNLINK, downlink_buffer_pkts)

    wc_home = port("wow_client", "home", lan_rate_bps, lan_ns)
    fc_home = port("ftp_client", "home", lan_rate_bps, lan_ns)
    home_wc = port("home", "wow_client", lan_rate_bps, lan_ns)
    home_fc = port("home", "ftp_client", lan_rate_bps, lan_ns)
    uplink = port("home", "isp", uplink_rate_bps, access_ns, uplink_queue)
    downlink = port("isp", "home", downlink_rate_bps, access_ns, downlink_queue)
    isp_ws = port("isp", "wow_server", lan_rate_bps, wan_ns)
    isp_fs = port("isp", "ftp_server", lan_rate_bps, wan_ns)
    ws_isp = port("wow_server", "isp", lan_rate_bps, wan_ns)
    fs_isp = port("ftp_server", "isp", lan_rate_bps, wan_ns)

    nodes["wow_client"].default_route = wc_home
    nodes["ftp_client"].default_route = fc_home
    nodes["home"].routes = {"wow_client": home_wc, "ftp_client": home_fc}
    nodes["home"].default_route = uplink
    nodes["isp"].routes = {"wow_server": isp_ws, "ftp_server": isp_fs}
    nodes["isp"].default_route = downlink
    nodes["wow_server"].default_route = ws_isp
    nodes["ftp_server"].default_route = fs_isp

    all_queues = [iface.queue for iface in
                  (wc_home, fc_home, home_wc, home_fc, uplink, downlink,
                   isp_ws, isp_fs, ws_isp, fs_isp)]
    return Topology(nodes, {UPLINK: uplink_queue, DOWNLINK: downlink_queue},
                    uplink, downlink, all_queues)
