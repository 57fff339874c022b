"""Links, queues, interfaces, topology: timing and buffering behavior."""

import pytest

from simrun import Kernel, s_to_ticks
from simrun.errors import ConfigError
from simrun.netstack import (DOWNLINK, UPLINK, DropTailQueue, Interface, Link,
                             Packet, TcpHeader, build_dumbbell,
                             serialization_ns)

T_S_1500_UP = 23_437_500


def mk_packet(pid, payload, flow="f", direction=UPLINK, t=0):
    return Packet(pid, flow, direction, "a", "b", TcpHeader(), payload, t)


def test_serialization_examples():
    assert serialization_ns(1500, 512_000) == T_S_1500_UP
    assert serialization_ns(40, 512_000) == 625_000
    assert serialization_ns(1500, 6_000_000) == 2_000_000
    assert serialization_ns(40, 100_000_000) == 3_200
    # non-divisible case rounds up to the next nanosecond
    assert serialization_ns(40, 6_000_000) == 53_334


def test_link_transmit_idle():
    link = Link(512_000, 0)
    start, end_tx, delivery = link.transmit(mk_packet(0, 1460), 0)
    assert (start, end_tx, delivery) == (0, T_S_1500_UP, T_S_1500_UP)


def test_link_transmit_queues_behind_busy():
    link = Link(6_000_000, 1_000_000)
    _, end1, d1 = link.transmit(mk_packet(0, 1460), 0)
    assert end1 == 2_000_000 and d1 == 3_000_000
    start2, end2, d2 = link.transmit(mk_packet(1, 1460), 500_000)
    assert start2 == 2_000_000
    assert end2 == 4_000_000
    assert d2 == 5_000_000


def test_queue_boundary_accept_and_drop():
    q = DropTailQueue("q", capacity_pkts=20)
    for i in range(19):
        assert q.enqueue(mk_packet(i, 100), now=i) is True
    assert len(q) == 19
    assert q.enqueue(mk_packet(19, 100), now=19) is True
    assert len(q) == 20
    assert q.enqueue(mk_packet(20, 100), now=20) is False
    assert len(q) == 20
    assert q.dropped_total == 1
    assert q.drops_by_flow["f"] == 1
    assert q.accepted_total == 20


def test_queue_fifo_and_conservation():
    q = DropTailQueue("q", capacity_pkts=10)
    pkts = [mk_packet(i, 40 + i) for i in range(10)]
    for p in pkts:
        q.enqueue(p, 0)
    assert q.waiting_bytes == sum(p.wire_bytes for p in pkts)
    out = []
    while True:
        p = q.pop(1)
        if p is None:
            break
        out.append(p.pid)
    assert out == list(range(10))
    assert q.accepted_total == q.dequeued_total + len(q)
    assert q.waiting_bytes == 0


class IfaceRig:
    """One interface on a 512 kbps link, delivery and delay capture."""

    def __init__(self, capacity=None, rate=512_000):
        self.kernel = Kernel()
        self.queue = DropTailQueue("uplink", capacity)
        self.delivered = []
        self.waits = {}
        self.iface = Interface(self.kernel, "up", Link(rate, 0), self.queue,
                               self.delivered.append)
        self.iface.on_delay = lambda pkt, w: self.waits.setdefault(pkt.pid, w)

    def inject(self, at_ns, packet):
        self.kernel.schedule(at_ns, self.iface.send, packet, kind="inject")


def test_delay_empty_queue_idle_link_is_zero():
    rig = IfaceRig()
    rig.inject(0, mk_packet(0, 1460))
    rig.kernel.run_until(s_to_ticks(1))
    assert rig.waits[0] == 0


def test_delay_thirteen_packets_ahead():
    rig = IfaceRig()
    for i in range(14):
        rig.inject(0, mk_packet(i, 1460))
    rig.kernel.run_until(s_to_ticks(1))
    assert rig.waits[13] == 13 * T_S_1500_UP == 304_687_500


def test_delay_full_200_packet_queue_ahead_and_tail_drop():
    rig = IfaceRig(capacity=200)
    for i in range(202):
        rig.inject(0, mk_packet(i, 1460))
    rig.kernel.run_until(s_to_ticks(10))
    assert rig.waits[200] == 200 * T_S_1500_UP == 4_687_500_000
    assert 201 not in rig.waits
    assert rig.queue.dropped_total == 1
    assert len(rig.delivered) == 201


def test_delay_occupancy_consistency_per_sample():
    # each wait must equal residual service plus the waiting bytes' serialization
    rig = IfaceRig()
    expected = {}
    original_send = rig.iface.send

    def send_with_expectation(packet):
        now = rig.kernel.now
        if rig.iface.busy:
            ahead = rig.iface.current_tx_end - now
            ahead += sum(serialization_ns(p.wire_bytes, 512_000)
                         for p in rig.queue.fifo)
        else:
            ahead = 0
        expected[packet.pid] = ahead
        original_send(packet)

    pid = 0
    for burst_at, count, size in ((0, 5, 1460), (10_000_000, 3, 460),
                                  (40_000_000, 1, 11), (41_000_000, 7, 1460),
                                  (300_000_000, 2, 0)):
        for _ in range(count):
            rig.kernel.schedule(burst_at, send_with_expectation,
                                mk_packet(pid, size))
            pid += 1
    rig.kernel.run_until(s_to_ticks(2))
    assert len(rig.waits) == pid
    for i in range(pid):
        assert rig.waits[i] == expected[i], f"packet {i}"


def test_work_conservation_and_fifo_delivery():
    rig = IfaceRig()
    occupancy_while_idle = []

    def probe(now, pkts, nbytes, drops):
        if pkts > 0 and not rig.iface.busy:
            occupancy_while_idle.append(now)

    rig.queue.probe = probe
    for i in range(50):
        rig.inject((i % 7) * 1_000_000, mk_packet(i, 1460))
    rig.kernel.run_until(s_to_ticks(5))
    assert occupancy_while_idle == []
    assert len(rig.delivered) == 50
    by_inject_order = sorted(range(50), key=lambda i: ((i % 7), i))
    assert [p.pid for p in rig.delivered] == by_inject_order


def access_topology(kernel, **overrides):
    params = dict(uplink_rate_bps=512_000, downlink_rate_bps=6_000_000,
                  lan_rate_bps=100_000_000, one_way_delay_s=0.080,
                  uplink_buffer_pkts=200, downlink_buffer_pkts=200)
    params.update(overrides)
    return build_dumbbell(kernel, **params)


def test_build_defaults():
    topo = access_topology(Kernel())
    assert topo.uplink_iface.link.rate_bps == 512_000
    assert topo.downlink_iface.link.rate_bps == 6_000_000
    assert topo.uplink_queue.capacity_pkts == 200
    assert topo.downlink_queue.capacity_pkts == 200
    assert set(topo.nodes) == {"wow_client", "ftp_client", "home", "isp",
                               "wow_server", "ftp_server"}
    # one-way propagation sums to 80 ms on the client-to-server path
    lan = topo.nodes["wow_client"].default_route.link.prop_delay_ns
    access = topo.uplink_iface.link.prop_delay_ns
    wan = topo.nodes["isp"].routes["wow_server"].link.prop_delay_ns
    assert lan + access + wan == s_to_ticks(0.080)


def test_build_buffer_override():
    topo = access_topology(Kernel(), uplink_buffer_pkts=20)
    assert topo.uplink_queue.capacity_pkts == 20


def test_build_is_flow_agnostic():
    # the topology always includes the bulk-upload host, even if no flow uses it
    topo = access_topology(Kernel())
    assert topo.nodes["ftp_client"].default_route is not None
    assert topo.nodes["ftp_server"].default_route is not None


def test_build_rejects_bad_rates_and_delay():
    with pytest.raises(ConfigError, match="uplink_rate_bps"):
        access_topology(Kernel(), uplink_rate_bps=0)
    with pytest.raises(ConfigError, match="one_way_delay_s"):
        access_topology(Kernel(), one_way_delay_s=0.0005)


def test_zero_load_40_byte_round_trip_exact():
    kernel = Kernel()
    topo = access_topology(kernel)
    times = {}

    def server_handler(pkt):
        times["at_server"] = kernel.now
        reply = Packet(1, "probe", DOWNLINK, "wow_server", "wow_client",
                       TcpHeader(is_ack=True), 0, kernel.now)
        topo.nodes["wow_server"].originate(reply)

    def client_handler(pkt):
        times["back_at_client"] = kernel.now

    topo.nodes["wow_server"].handlers[("probe", "data")] = server_handler
    topo.nodes["wow_client"].handlers[("probe", "ack")] = client_handler
    probe = Packet(0, "probe", UPLINK, "wow_client", "wow_server",
                   TcpHeader(), 0, 0)
    kernel.schedule(0, lambda _a: topo.nodes["wow_client"].originate(probe),
                    None)
    kernel.run_until(s_to_ticks(1))
    assert times["at_server"] == 80_631_400
    assert times["back_at_client"] == 160_691_134


def test_header_sack_block_limit():
    from simrun.errors import SimulationError
    with pytest.raises(SimulationError):
        TcpHeader(sack_blocks=((0, 1), (2, 3), (4, 5), (6, 7)))
    h = TcpHeader(sack_blocks=((0, 1460),))
    assert h.sack_blocks == ((0, 1460),)


def test_wire_bytes_accounting():
    data = mk_packet(0, 1460)
    ack = mk_packet(1, 0)
    assert data.wire_bytes == 1500
    assert ack.wire_bytes == 40
