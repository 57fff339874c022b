"""TCP sender and receiver state machines.

Three congestion-control variants share one sender: a scoreboard/pipe driven
variant ("sack"), a duplicate-ACK inflation variant ("new_reno"), and a
delay-based variant ("vegas") whose window adjusts once per RTT epoch.
Sequence space is bytes; windows are fractional segments. Senders never
coalesce application messages across message boundaries, and the last
segment of each message carries PSH.
"""

from collections import deque
from typing import Callable, List, Optional, Tuple

from .errors import ConfigError, SimulationError
from .kernel import Kernel, NS_PER_S, PENDING

MSS = 1460

VARIANTS = ("sack", "new_reno", "vegas")

VEGAS_ALPHA = 1.0
VEGAS_BETA = 3.0
VEGAS_GAMMA = 1.0

DUP_THRESHOLD = 3

OPEN = "open"
FAST_RECOVERY = "fast-recovery"
RTO_RECOVERY = "rto-recovery"


def vegas_diff(cwnd: float, base_rtt_ns: int, rtt_ns: int) -> float:
    """Estimated backlog in segments: (cwnd/base_rtt - cwnd/rtt) * base_rtt."""
    if base_rtt_ns <= 0 or rtt_ns <= 0:
        raise SimulationError("RTT values must be positive")
    return (cwnd / base_rtt_ns - cwnd / rtt_ns) * base_rtt_ns


class RtoEstimator:
    """Smoothed RTT estimator with gains 1/8 and 1/4, floor, and binary backoff."""

    __slots__ = ("srtt", "rttvar", "min_rto_ns", "initial_rto_ns", "backoff",
                 "max_backoff")

    def __init__(self, min_rto_ns: int = 200_000_000,
                 initial_rto_ns: int = 1_000_000_000, max_backoff: int = 64):
        self.srtt: Optional[int] = None
        self.rttvar: Optional[int] = None
        self.min_rto_ns = min_rto_ns
        self.initial_rto_ns = initial_rto_ns
        self.backoff = 1
        self.max_backoff = max_backoff

    def sample(self, rtt_ns: int) -> None:
        if rtt_ns <= 0:
            return
        if self.srtt is None:
            self.srtt = rtt_ns
            self.rttvar = rtt_ns // 2
        else:
            self.rttvar = (3 * self.rttvar + abs(self.srtt - rtt_ns)) // 4
            self.srtt = (7 * self.srtt + rtt_ns) // 8

    def base_rto_ns(self) -> int:
        if self.srtt is None:
            return self.initial_rto_ns
        return max(self.min_rto_ns, self.srtt + 4 * self.rttvar)

    def current_rto_ns(self) -> int:
        return self.base_rto_ns() * self.backoff

    def on_timeout(self) -> None:
        self.backoff = min(self.backoff * 2, self.max_backoff)

    def on_new_ack(self) -> None:
        self.backoff = 1


class Segment:
    __slots__ = ("start", "end", "psh", "sacked", "lost", "in_flight",
                 "retx_pending", "tx_count", "t_first_tx")

    def __init__(self, start: int, end: int, psh: bool):
        self.start = start
        self.end = end
        self.psh = psh
        self.sacked = False
        self.lost = False
        self.in_flight = False
        self.retx_pending = False
        self.tx_count = 0
        self.t_first_tx: Optional[int] = None


class TcpSender:
    """One direction's congestion-controlled byte stream."""

    def __init__(self, kernel: Kernel, flow: str, variant: str,
                 transmit: Callable[[int, int, bool, bool], None], *,
                 adv_window: int = 64, mss: int = MSS,
                 on_window: Optional[Callable[[int, float, float], None]] = None,
                 min_rto_s: float = 0.2, initial_rto_s: float = 1.0,
                 max_backoff: int = 64, initial_cwnd: float = 2.0):
        if variant not in VARIANTS:
            raise ConfigError(f"tcp_variant: {variant!r} is not one of {VARIANTS}")
        if adv_window < 1:
            raise ConfigError("adv_window_segments: must be at least 1")
        self.kernel = kernel
        self.flow = flow
        self.variant = variant
        self.transmit = transmit
        self.adv_window = adv_window
        self.mss = mss
        self.on_window = on_window
        self.app_pull: Optional[Callable[[int], int]] = None

        self.segs: deque = deque()
        self.offered = 0
        self._psh_marks: deque = deque()
        self._carve_pos = 0

        self.snd_una = 0
        self.snd_nxt = 0
        self._cwnd = initial_cwnd
        self.ssthresh = float(adv_window)
        self.mode = OPEN
        self.recovery_point = 0
        self.dupacks = 0
        self._pipe = 0

        self.estimator = RtoEstimator(round(min_rto_s * NS_PER_S),
                                      round(initial_rto_s * NS_PER_S), max_backoff)
        self._timed_end: Optional[int] = None
        self._timed_at = 0
        self._timer_deadline: Optional[int] = None
        self._timer_event = None

        self.base_rtt_ns: Optional[int] = None
        self.vegas_in_slow_start = variant == "vegas"
        self._vegas_epoch_count = 0
        self._epoch_target: Optional[int] = None
        self._epoch_stamp: Optional[int] = None
        self._epoch_clean = True

        self.retransmitted_total = 0
        self.timeouts_total = 0
        self.fast_recoveries_total = 0
        self._last_window_row: Optional[Tuple[float, float]] = None
        self._record_window()

    @property
    def cwnd(self) -> float:
        return self._cwnd

    @cwnd.setter
    def cwnd(self, value: float) -> None:
        self._cwnd = value

    def _record_window(self) -> None:
        row = (self._cwnd, self.ssthresh)
        if row != self._last_window_row:
            self._last_window_row = row
            if self.on_window is not None:
                self.on_window(self.kernel.now, self._cwnd, self.ssthresh)

    # application side

    def on_app_data(self, apdu_bytes: int) -> None:
        """Accept one application message; its final segment will carry PSH."""
        if apdu_bytes < 1:
            raise SimulationError("APDU must be at least 1 byte")
        self.offered += apdu_bytes
        self._psh_marks.append(self.offered)
        self._try_send()

    def wakeup(self) -> None:
        """Prod the sender after external state changed (e.g. source started)."""
        self._try_send()

    # segment bookkeeping

    def _usable_window(self) -> int:
        return min(int(self._cwnd), self.adv_window)

    def _carve_next(self) -> Optional[Segment]:
        if self._carve_pos >= self.offered and self.app_pull is not None:
            granted = self.app_pull(self.mss)
            if granted > 0:
                self.offered += granted
        if self._carve_pos >= self.offered:
            return None
        while self._psh_marks and self._psh_marks[0] <= self._carve_pos:
            self._psh_marks.popleft()
        end = self._carve_pos + self.mss
        psh = False
        if self._psh_marks and self._psh_marks[0] <= end:
            end = self._psh_marks[0]
            psh = True
        end = min(end, self.offered)
        seg = Segment(self._carve_pos, end, psh)
        self.segs.append(seg)
        self._carve_pos = end
        return seg

    def _next_retx(self) -> Optional[Segment]:
        for seg in self.segs:
            if seg.retx_pending:
                return seg
        return None

    def _try_send(self) -> None:
        while True:
            if self._pipe >= self._usable_window():
                return
            seg = self._next_retx()
            is_retx = seg is not None
            if seg is None:
                seg = self._carve_next()
            if seg is None:
                return
            self._transmit(seg, retx=is_retx)

    def _transmit(self, seg: Segment, retx: bool) -> None:
        now = self.kernel.now
        if retx:
            seg.retx_pending = False
            self.retransmitted_total += 1
            self._epoch_clean = False
            if self._timed_end is not None and seg.end == self._timed_end:
                self._timed_end = None
        else:
            if self._timed_end is None:
                self._timed_end = seg.end
                self._timed_at = now
            if self.variant == "vegas":
                if self._epoch_target is None:
                    self._epoch_target = seg.start
                if self._epoch_stamp is None:
                    self._epoch_stamp = now
        if not seg.in_flight:
            seg.in_flight = True
            self._pipe += 1
        seg.tx_count += 1
        if seg.t_first_tx is None:
            seg.t_first_tx = now
        if seg.end > self.snd_nxt:
            self.snd_nxt = seg.end
        if self._timer_deadline is None:
            self._timer_deadline = now + self.estimator.current_rto_ns()
            self._ensure_timer_event()
        self.transmit(seg.start, seg.end - seg.start, seg.psh, retx)

    # acknowledgment side

    def on_ack(self, ack: int, sack_blocks: tuple = ()) -> None:
        if ack < self.snd_una:
            return
        if sack_blocks and self.variant == "sack":
            self._mark_sacked(sack_blocks)
            self._infer_losses()
        if ack > self.snd_una:
            self._on_new_ack(ack)
        elif self.segs:
            self._on_dupack()
        self._try_send()

    def _on_new_ack(self, ack: int) -> None:
        now = self.kernel.now
        newly_acked = 0
        while self.segs and self.segs[0].end <= ack:
            seg = self.segs.popleft()
            if seg.in_flight:
                seg.in_flight = False
                self._pipe -= 1
            newly_acked += 1
        if self.segs and ack > self.segs[0].start:
            raise SimulationError("cumulative ACK splits a segment")
        self.snd_una = ack
        self.dupacks = 0
        if self._timed_end is not None and ack >= self._timed_end:
            # valid sample: backoff is retained until here (Karn's second rule)
            rtt = now - self._timed_at
            self.estimator.sample(rtt)
            self.estimator.on_new_ack()
            if self.variant == "vegas" and rtt > 0:
                if self.base_rtt_ns is None or rtt < self.base_rtt_ns:
                    self.base_rtt_ns = rtt
            self._timed_end = None

        exiting = False
        if self.mode == FAST_RECOVERY:
            if ack >= self.recovery_point:
                self.mode = OPEN
                self.cwnd = self.ssthresh
                exiting = True
            elif self.variant in ("new_reno", "vegas"):
                self.cwnd = max(self.cwnd - newly_acked + 1.0, 1.0)
                if self.segs:
                    self._transmit(self.segs[0], retx=True)
        elif self.mode == RTO_RECOVERY and ack >= self.recovery_point:
            self.mode = OPEN

        if not exiting and self.mode in (OPEN, RTO_RECOVERY):
            if self.variant == "vegas":
                self._vegas_on_new_ack(now, ack)
            elif self._cwnd < self.ssthresh:
                self.cwnd = self._cwnd + 1.0
            else:
                self.cwnd = self._cwnd + 1.0 / self._cwnd
        self._record_window()

        if self.segs:
            self._timer_deadline = now + self.estimator.current_rto_ns()
            self._ensure_timer_event()
        else:
            self._timer_deadline = None

    def _on_dupack(self) -> None:
        self.dupacks += 1
        if self.mode == OPEN and self.dupacks == DUP_THRESHOLD:
            self._enter_fast_recovery()
        elif self.mode == FAST_RECOVERY and self.variant in ("new_reno", "vegas"):
            self.cwnd = self._cwnd + 1.0
            self._record_window()

    def _enter_fast_recovery(self) -> None:
        flight = len(self.segs)
        self.ssthresh = max(flight / 2.0, 2.0)
        self.recovery_point = self.snd_nxt
        self.mode = FAST_RECOVERY
        self.fast_recoveries_total += 1
        self.vegas_in_slow_start = False
        if self.variant == "sack":
            self.cwnd = self.ssthresh
            first = self.segs[0]
            if not first.sacked and not first.retx_pending and not first.lost:
                first.lost = True
                if first.in_flight:
                    first.in_flight = False
                    self._pipe -= 1
                first.retx_pending = True
        else:
            self.cwnd = self.ssthresh + 3.0
            self._transmit(self.segs[0], retx=True)
        self._record_window()

    def _mark_sacked(self, blocks: tuple) -> None:
        for lo, hi in blocks:
            for seg in self.segs:
                if seg.start >= lo and seg.end <= hi and not seg.sacked:
                    seg.sacked = True
                    seg.retx_pending = False
                    if seg.in_flight:
                        seg.in_flight = False
                        self._pipe -= 1

    def _infer_losses(self) -> None:
        # a hole is presumed lost once 3 or more SACKed segments lie above it
        sacked_above = 0
        for seg in reversed(self.segs):
            if seg.sacked:
                sacked_above += 1
            elif sacked_above >= DUP_THRESHOLD and not seg.lost:
                seg.lost = True
                seg.retx_pending = True
                if seg.in_flight:
                    seg.in_flight = False
                    self._pipe -= 1

    # Vegas

    def _vegas_on_new_ack(self, now: int, ack: int) -> None:
        if self._epoch_target is None or ack <= self._epoch_target:
            return
        if self._epoch_clean and self._epoch_stamp is not None:
            self.vegas_epoch(now - self._epoch_stamp)
        self._epoch_target = self.snd_nxt
        self._epoch_stamp = None
        self._epoch_clean = True

    def vegas_epoch(self, rtt_sample_ns: int) -> None:
        """Adjust the window once per RTT epoch from one clean RTT sample."""
        if rtt_sample_ns <= 0:
            return
        if self.base_rtt_ns is None or rtt_sample_ns < self.base_rtt_ns:
            self.base_rtt_ns = rtt_sample_ns
        diff = vegas_diff(self._cwnd, self.base_rtt_ns, rtt_sample_ns)
        if self.vegas_in_slow_start and self._cwnd >= self.ssthresh:
            self.vegas_in_slow_start = False
        if self.vegas_in_slow_start:
            if diff <= VEGAS_GAMMA:
                self._vegas_epoch_count += 1
                if self._vegas_epoch_count % 2 == 0:
                    self.cwnd = self._cwnd * 2.0
                self._record_window()
                return
            self.vegas_in_slow_start = False
        if diff < VEGAS_ALPHA:
            self.cwnd = self._cwnd + 1.0
        elif diff > VEGAS_BETA:
            self.cwnd = max(self._cwnd - 1.0, 2.0)
        self._record_window()

    # retransmission timer

    def _ensure_timer_event(self) -> None:
        if self._timer_deadline is None:
            return
        ev = self._timer_event
        if ev is not None and ev.state == PENDING and ev.fire_at <= self._timer_deadline:
            return
        if ev is not None and ev.state == PENDING:
            self.kernel.cancel(ev)
        self._timer_event = self.kernel.schedule(
            self._timer_deadline, self._on_timer, None,
            kind="timer-expiry", target=self.flow)

    def _on_timer(self, _arg) -> None:
        self._timer_event = None
        if self._timer_deadline is None or not self.segs:
            return
        now = self.kernel.now
        if now < self._timer_deadline:
            self._ensure_timer_event()
            return
        self.on_timeout(now)

    def on_timeout(self, now: int) -> None:
        """RTO expiry: collapse the window and restart from the first hole."""
        if not self.segs:
            return
        flight = len(self.segs)
        self.ssthresh = max(flight / 2.0, 2.0)
        self.cwnd = 1.0
        self.mode = RTO_RECOVERY
        self.recovery_point = self.snd_nxt
        self.dupacks = 0
        self.timeouts_total += 1
        self._timed_end = None
        for seg in self.segs:
            if seg.sacked:
                continue
            if seg.in_flight:
                seg.in_flight = False
                self._pipe -= 1
            seg.retx_pending = True
        self.estimator.on_timeout()
        if self.variant == "vegas":
            self._epoch_target = None
            self._epoch_stamp = None
            self._epoch_clean = True
            self.vegas_in_slow_start = True
        self._record_window()
        self._timer_deadline = None
        self._transmit(self.segs[0], retx=True)
        self._timer_deadline = now + self.estimator.current_rto_ns()
        self._ensure_timer_event()


class TcpReceiver:
    """Reassembles the byte stream and acknowledges every data segment."""

    def __init__(self, flow: str, send_ack: Callable[[int, tuple], None], *,
                 sack_enabled: bool = True,
                 on_deliver: Optional[Callable[[int, int], None]] = None):
        self.flow = flow
        self.send_ack = send_ack
        self.sack_enabled = sack_enabled
        self.on_deliver = on_deliver
        self.rcv_nxt = 0
        self.ranges: List[Tuple[int, int]] = []
        self.recent: List[Tuple[int, int]] = []
        self.delivered_bytes = 0
        self.segments_received = 0
        self.duplicates_received = 0

    def on_data(self, seq: int, length: int, psh: bool = False) -> None:
        if length < 1:
            raise SimulationError("data segment with no payload")
        self.segments_received += 1
        end = seq + length
        if end <= self.rcv_nxt:
            self.duplicates_received += 1
        else:
            delivered_before = self.rcv_nxt
            lo = max(seq, self.rcv_nxt)
            new_lo, new_hi = lo, end
            kept = []
            for r in self.ranges:
                if r[1] < new_lo or r[0] > new_hi:
                    kept.append(r)
                else:
                    new_lo = min(new_lo, r[0])
                    new_hi = max(new_hi, r[1])
            kept.append((new_lo, new_hi))
            kept.sort()
            self.ranges = kept
            while self.ranges and self.ranges[0][0] <= self.rcv_nxt:
                head = self.ranges.pop(0)
                if head[1] > self.rcv_nxt:
                    self.rcv_nxt = head[1]
            self._update_recent(lo, end)
            if self.rcv_nxt > delivered_before:
                self.delivered_bytes = self.rcv_nxt
                if self.on_deliver is not None:
                    self.on_deliver(delivered_before, self.rcv_nxt)
        blocks = tuple(self.recent[:3]) if self.sack_enabled else ()
        self.send_ack(self.rcv_nxt, blocks)

    def _update_recent(self, lo: int, hi: int) -> None:
        containing = None
        for r in self.ranges:
            if r[0] <= lo and hi <= r[1]:
                containing = r
                break
        current = set(self.ranges)
        rebuilt = []
        if containing is not None:
            rebuilt.append(containing)
        for r in self.recent:
            if r in current and r != containing:
                rebuilt.append(r)
        self.recent = rebuilt


class TcpFlow:
    """Binds a sender/receiver pair to two nodes and converts bytes to packets."""

    def __init__(self, kernel: Kernel, trace_name: str, packet_flow: str,
                 src_node, dst_node, *, variant: str, data_direction: str,
                 next_pid: Callable[[], int], adv_window: int = 64,
                 on_window: Optional[Callable[[int, float, float], None]] = None,
                 on_deliver: Optional[Callable[[int, int], None]] = None,
                 mss: int = MSS):
        from .netstack import DOWNLINK, UPLINK, Packet, TcpHeader
        self._packet_cls = Packet
        self._header_cls = TcpHeader
        self.kernel = kernel
        self.trace_name = trace_name
        self.packet_flow = packet_flow
        self.src_node = src_node
        self.dst_node = dst_node
        self.data_direction = data_direction
        self.ack_direction = DOWNLINK if data_direction == UPLINK else UPLINK
        self.next_pid = next_pid
        self.sender = TcpSender(kernel, trace_name, variant, self._send_data,
                                adv_window=adv_window, mss=mss,
                                on_window=on_window)
        self.receiver = TcpReceiver(trace_name, self._send_ack,
                                    sack_enabled=variant == "sack",
                                    on_deliver=on_deliver)
        src_node.handlers[(packet_flow, "ack")] = self._on_ack_packet
        dst_node.handlers[(packet_flow, "data")] = self._on_data_packet

    def _send_data(self, start: int, length: int, psh: bool, retx: bool) -> None:
        header = self._header_cls(seq=start, psh=psh)
        packet = self._packet_cls(self.next_pid(), self.packet_flow,
                                  self.data_direction, self.src_node.name,
                                  self.dst_node.name, header, length,
                                  self.kernel.now)
        self.src_node.originate(packet)

    def _send_ack(self, ack: int, blocks: tuple) -> None:
        header = self._header_cls(ack=ack, is_ack=True, sack_blocks=blocks)
        packet = self._packet_cls(self.next_pid(), self.packet_flow,
                                  self.ack_direction, self.dst_node.name,
                                  self.src_node.name, header, 0,
                                  self.kernel.now)
        self.dst_node.originate(packet)

    def _on_data_packet(self, packet) -> None:
        self.receiver.on_data(packet.header.seq, packet.payload_bytes,
                              packet.header.psh)

    def _on_ack_packet(self, packet) -> None:
        self.sender.on_ack(packet.header.ack, packet.header.sack_blocks)
