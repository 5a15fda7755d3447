#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <queue>
#include <stdexcept>
#include <vector>

#include "ttss/classifier.hpp"
#include "ttss/traffic.hpp"

namespace ttss {

/// m-packets per packet: 64-byte receive/transmit buffer segments.
inline std::uint32_t segment(std::uint32_t size_bytes) {
  if (size_bytes == 0) throw std::invalid_argument("segment: size is zero");
  return (size_bytes + 63) / 64;
}

struct StageConfig {
  std::uint32_t workers = 8;
};

/// Classify service time = compute + memory wait, where
///   compute  = base_ns + per_node_ns * trie elements visited
///   mem wait = per_probe_ns * hash probes + per_scan_ns * flat-list scans.
/// The memory-wait share is charged as stage *idle* time (and reported as
/// mem_wait_ns): while a lookup waits on table memory the engine has no
/// runnable work. That split is what separates the classifiers here — a
/// flat tuple scan pays per_scan_ns for every table in the list, a trie
/// walk pays the cheaper per_node_ns per element it actually visits.
struct ClassifyCostModel {
  std::uint64_t base_ns = 50;
  std::uint64_t per_probe_ns = 100;
  std::uint64_t per_node_ns = 10;
  std::uint64_t per_scan_ns = 40;
};

struct SimConfig {
  StageConfig receive{};
  StageConfig classify{};
  StageConfig transmit{};
  std::uint64_t receive_per_mpkt_ns = 40;
  std::uint64_t transmit_per_mpkt_ns = 20;
  ClassifyCostModel cost{};
  std::size_t ring1_capacity = 128;  // receive -> classify, power of two
  std::size_t ring2_capacity = 128;  // classify -> transmit, power of two
  std::size_t port_queue_capacity = 64;
  std::uint32_t ports = 4;
  std::uint32_t port_rate_mbps = 1000;
  std::uint32_t tbuf_threshold_mpkts = 16;
  std::size_t input_capacity = 0;  // 0 = unbounded
  std::uint64_t duration_ns = 0;   // 0 = last arrival + mean gap + 2000
  bool record_sent_order = false;
};

struct StageMetrics {
  std::uint64_t busy_ns = 0;      // compute executed before the horizon
  std::uint64_t idle_ns = 0;      // workers*duration - busy
  std::uint64_t mem_wait_ns = 0;  // classify: table-memory wait (in idle)
  std::uint64_t blocked_ns = 0;   // held on a full downstream ring (in idle)
  std::uint64_t service_ns = 0;   // busy + mem_wait
  std::uint64_t processed = 0;
  std::uint64_t dropped = 0;
};

struct FlowStats {
  std::uint64_t classified = 0;
  std::uint64_t sent = 0;
  std::size_t max_queue = 0;
  std::vector<std::uint64_t> sent_order;  // trace indices, if recorded
};

struct SimReport {
  std::uint64_t duration_ns = 0;
  std::uint64_t received = 0;
  std::uint64_t sent = 0;
  std::uint64_t dropped = 0;
  std::uint64_t in_flight = 0;  // received - sent - dropped
  StageMetrics receive;
  StageMetrics classify;
  StageMetrics transmit;
  std::vector<std::uint64_t> port_sent;
  std::uint64_t wire_bytes = 0;
  double transmit_rate_mbps = 0.0;
  double sent_over_received = 1.0;
  std::map<FlowId, FlowStats> flows;
};

namespace detail {

inline bool is_pow2(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

/// Bounded FIFO of packet handles; a scratch ring between two stages.
class Ring {
 public:
  explicit Ring(std::size_t capacity) : capacity_(capacity) {}
  bool full() const { return q_.size() >= capacity_; }
  bool empty() const { return q_.empty(); }
  std::size_t size() const { return q_.size(); }
  std::size_t front() const { return q_.front(); }
  void push(std::size_t idx) { q_.push_back(idx); }
  std::size_t pop() {
    std::size_t idx = q_.front();
    q_.pop_front();
    return idx;
  }

 private:
  std::size_t capacity_;
  std::deque<std::size_t> q_;
};

/// Deterministic event-driven execution of the receive -> classify ->
/// transmit pipeline. Bounded scratch rings connect the stages; a stage
/// that completes a packet against a full ring holds it (worker occupied,
/// time counted as blocked) until space frees, so overload propagates
/// upstream instead of failing. Workers within a stage complete in strict
/// packet order.
class Simulation {
 public:
  Simulation(const std::vector<TraceRecord>& trace,
             const PacketClassifier& classifier, const SimConfig& cfg)
      : trace_(trace), classifier_(classifier), cfg_(cfg) {
    if (!is_pow2(cfg.ring1_capacity) || !is_pow2(cfg.ring2_capacity))
      throw std::invalid_argument("sim: ring capacity must be a power of two");
    if (cfg.ports == 0) throw std::invalid_argument("sim: no ports");
    if (cfg.receive.workers == 0 || cfg.classify.workers == 0 ||
        cfg.transmit.workers == 0)
      throw std::invalid_argument("sim: workers must be >= 1");
    if (cfg.receive_per_mpkt_ns == 0 || cfg.transmit_per_mpkt_ns == 0 ||
        cfg.cost.base_ns == 0)
      throw std::invalid_argument("sim: stage costs must be positive");
    receive_.workers = cfg.receive.workers;
    classify_.workers = cfg.classify.workers;
    transmit_.workers = cfg.transmit.workers;
  }

  SimReport run() {
    resolve_horizon();
    pkts_.resize(trace_.size());
    for (std::size_t i = 0; i < trace_.size(); ++i) {
      if (i > 0 && trace_[i].arrival_ns < trace_[i - 1].arrival_ns)
        throw std::invalid_argument("sim: trace is not time-sorted");
      pkts_[i].m_count = segment(trace_[i].size_bytes);
    }
    port_q_.resize(cfg_.ports);
    port_move_busy_.assign(cfg_.ports, false);
    tbuf_.assign(cfg_.ports, 0);
    wire_free_.assign(cfg_.ports, 0);
    port_sent_.assign(cfg_.ports, 0);

    if (!trace_.empty() && trace_[0].arrival_ns <= horizon_)
      schedule(trace_[0].arrival_ns, kArrival, 0);

    while (!events_.empty()) {
      Event ev = events_.top();
      if (ev.t > horizon_) break;
      events_.pop();
      dispatch(ev);
      pump(ev.t);
    }
    return finalize();
  }

 private:
  // Tie order at equal timestamps: drain the back of the pipe first.
  enum Kind { kWireDone = 0, kTxMoveDone, kClsDone, kRecvDone, kArrival };

  struct Event {
    std::uint64_t t;
    int kind;
    std::uint64_t seq;
    std::size_t idx;     // packet index (or port for kWireDone payloads)
    std::uint32_t port = 0;
    std::uint32_t bytes = 0;
    bool last_mpkt = false;
  };
  struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
      if (a.t != b.t) return a.t > b.t;
      if (a.kind != b.kind) return a.kind > b.kind;
      return a.seq > b.seq;
    }
  };

  struct Packet {
    std::uint32_t m_count = 1;
    FlowId flow = 0;
    std::uint64_t cls_compute = 0;
    std::uint64_t cls_mem = 0;
    std::uint32_t moved = 0;  // m-packets moved to TBUF
    std::uint32_t wired = 0;  // m-packets finished on the wire
  };

  struct Stage {
    std::uint32_t workers = 1;
    std::uint32_t busy_workers = 0;
    std::uint64_t last_completion = 0;
    std::deque<std::pair<std::size_t, std::uint64_t>> held;  // idx, done_at
    StageMetrics metrics;
  };

  void resolve_horizon() {
    if (cfg_.duration_ns != 0) {
      horizon_ = cfg_.duration_ns;
      return;
    }
    if (trace_.empty()) {
      horizon_ = 2000;
      return;
    }
    std::uint64_t last = trace_.back().arrival_ns;
    std::uint64_t mean_gap =
        trace_.size() > 1 ? (last - trace_.front().arrival_ns) /
                                (trace_.size() - 1)
                          : 0;
    horizon_ = last + mean_gap + 2000;
  }

  void schedule(std::uint64_t t, int kind, std::size_t idx,
                std::uint32_t port = 0, std::uint32_t bytes = 0,
                bool last_mpkt = false) {
    events_.push(Event{t, kind, seq_++, idx, port, bytes, last_mpkt});
  }

  void dispatch(const Event& ev) {
    switch (ev.kind) {
      case kArrival: on_arrival(ev); break;
      case kRecvDone: on_recv_done(ev); break;
      case kClsDone: on_cls_done(ev); break;
      case kTxMoveDone: on_tx_move_done(ev); break;
      case kWireDone: on_wire_done(ev); break;
    }
  }

  void on_arrival(const Event& ev) {
    ++received_;
    if (cfg_.input_capacity != 0 && input_q_.size() >= cfg_.input_capacity) {
      ++receive_.metrics.dropped;
      ++dropped_;
    } else {
      input_q_.push_back(ev.idx);
    }
    std::size_t next = ev.idx + 1;
    if (next < trace_.size() && trace_[next].arrival_ns <= horizon_)
      schedule(trace_[next].arrival_ns, kArrival, next);
  }

  void on_recv_done(const Event& ev) {
    receive_.metrics.busy_ns += pkts_[ev.idx].m_count * cfg_.receive_per_mpkt_ns;
    receive_.held.emplace_back(ev.idx, ev.t);  // released by pump
  }

  void on_cls_done(const Event& ev) {
    Packet& p = pkts_[ev.idx];
    classify_.metrics.busy_ns += p.cls_compute;
    classify_.metrics.mem_wait_ns += p.cls_mem;
    if (p.flow == 0) {  // no matching rule: nothing to enqueue
      ++classify_.metrics.dropped;
      ++dropped_;
      --classify_.busy_workers;
      return;
    }
    classify_.held.emplace_back(ev.idx, ev.t);
  }

  void on_tx_move_done(const Event& ev) {
    Packet& p = pkts_[ev.idx];
    transmit_.metrics.busy_ns += cfg_.transmit_per_mpkt_ns;
    --transmit_.busy_workers;
    port_move_busy_[ev.port] = false;
    ++tbuf_[ev.port];
    ++p.moved;
    // m-packet bytes: full 64 except possibly the tail.
    std::uint32_t bytes =
        p.moved == p.m_count ? trace_[ev.idx].size_bytes - 64 * (p.m_count - 1)
                             : 64;
    std::uint64_t start = std::max(ev.t, wire_free_[ev.port]);
    std::uint64_t done = start + wire_time_ns(bytes, cfg_.port_rate_mbps);
    wire_free_[ev.port] = done;
    schedule(done, kWireDone, ev.idx, ev.port, bytes, p.moved == p.m_count);
    if (p.moved == p.m_count) {
      port_q_[ev.port].pop_front();
      ++wired_pending_;
    }
  }

  void on_wire_done(const Event& ev) {
    Packet& p = pkts_[ev.idx];
    --tbuf_[ev.port];
    wire_bytes_ += ev.bytes;
    ++p.wired;
    if (ev.last_mpkt) {
      --wired_pending_;
      ++sent_;
      ++port_sent_[ev.port];
      ++transmit_.metrics.processed;
      FlowStats& fs = flows_[p.flow];
      ++fs.sent;
      --flow_occ_[p.flow];
      if (cfg_.record_sent_order) fs.sent_order.push_back(ev.idx);
    }
  }

  // State transitions that need no clock advance; run to fixpoint,
  // downstream first so freed space propagates upstream within one call.
  void pump(std::uint64_t t) {
    bool moved = true;
    while (moved) {
      moved = false;
      // ring2 -> per-port queues (instant hand-off to local memory).
      while (!ring2_.empty()) {
        std::size_t idx = ring2_.front();
        std::uint32_t port = (pkts_[idx].flow - 1) % cfg_.ports;
        if (port_q_[port].size() >= cfg_.port_queue_capacity) break;
        ring2_.pop();
        port_q_[port].push_back(idx);
        moved = true;
      }
      // transmit movers: round-robin one m-packet per eligible port.
      while (transmit_.busy_workers < transmit_.workers) {
        bool started = false;
        for (std::uint32_t k = 0; k < cfg_.ports; ++k) {
          std::uint32_t port = (rr_next_ + k) % cfg_.ports;
          if (port_move_busy_[port] || port_q_[port].empty()) continue;
          if (tbuf_[port] >= cfg_.tbuf_threshold_mpkts) continue;  // stalled
          std::size_t idx = port_q_[port].front();
          port_move_busy_[port] = true;
          ++transmit_.busy_workers;
          schedule(t + cfg_.transmit_per_mpkt_ns, kTxMoveDone, idx, port);
          rr_next_ = (port + 1) % cfg_.ports;
          started = true;
          moved = true;
          break;
        }
        if (!started) break;
      }
      // classify completions held on a full ring2.
      while (!classify_.held.empty() && !ring2_.full()) {
        auto [idx, done_at] = classify_.held.front();
        classify_.held.pop_front();
        classify_.metrics.blocked_ns += t - done_at;
        ring2_.push(idx);
        FlowId flow = pkts_[idx].flow;
        FlowStats& fs = flows_[flow];
        ++fs.classified;
        std::size_t occ = ++flow_occ_[flow];
        fs.max_queue = std::max(fs.max_queue, occ);
        ++classify_.metrics.processed;
        --classify_.busy_workers;
        moved = true;
      }
      // classify starts: pop ring1, classify, schedule completion.
      while (classify_.busy_workers < classify_.workers && !ring1_.empty()) {
        std::size_t idx = ring1_.pop();
        Packet& p = pkts_[idx];
        SearchCost cost;
        MatchResult r = classifier_.classify(trace_[idx].hdr, &cost);
        p.flow = r.flow.value_or(0);
        p.cls_compute =
            cfg_.cost.base_ns + cfg_.cost.per_node_ns * cost.node_visits;
        p.cls_mem = cfg_.cost.per_probe_ns * cost.probes +
                    cfg_.cost.per_scan_ns * cost.list_scans;
        std::uint64_t comp =
            std::max(t + p.cls_compute + p.cls_mem, classify_.last_completion);
        classify_.last_completion = comp;
        ++classify_.busy_workers;
        schedule(comp, kClsDone, idx);
        moved = true;
      }
      // receive completions held on a full ring1.
      while (!receive_.held.empty() && !ring1_.full()) {
        auto [idx, done_at] = receive_.held.front();
        receive_.held.pop_front();
        receive_.metrics.blocked_ns += t - done_at;
        ring1_.push(idx);
        ++receive_.metrics.processed;
        --receive_.busy_workers;
        moved = true;
      }
      // receive starts.
      while (receive_.busy_workers < receive_.workers && !input_q_.empty()) {
        std::size_t idx = input_q_.front();
        input_q_.pop_front();
        std::uint64_t service = pkts_[idx].m_count * cfg_.receive_per_mpkt_ns;
        std::uint64_t comp = std::max(t + service, receive_.last_completion);
        receive_.last_completion = comp;
        ++receive_.busy_workers;
        schedule(comp, kRecvDone, idx);
        moved = true;
      }
    }
  }

  SimReport finalize() {
    SimReport rep;
    rep.duration_ns = horizon_;
    rep.received = received_;
    rep.sent = sent_;
    rep.dropped = dropped_;
    rep.in_flight = received_ - sent_ - dropped_;

    // Cross-check against what is actually still queued.
    std::size_t queued = input_q_.size() + receive_.busy_workers +
                         ring1_.size() + classify_.busy_workers +
                         ring2_.size() + wired_pending_;
    for (const auto& q : port_q_) queued += q.size();
    if (queued != rep.in_flight)
      throw std::logic_error("sim: packet conservation violated");

    auto close = [&](Stage& s) {
      StageMetrics& m = s.metrics;
      m.service_ns = m.busy_ns + m.mem_wait_ns;
      std::uint64_t wall = s.workers * horizon_;
      m.idle_ns = wall > m.busy_ns ? wall - m.busy_ns : 0;
      return m;
    };
    rep.receive = close(receive_);
    rep.classify = close(classify_);
    rep.transmit = close(transmit_);
    rep.port_sent = port_sent_;
    rep.wire_bytes = wire_bytes_;
    rep.transmit_rate_mbps =
        horizon_ ? static_cast<double>(wire_bytes_) * 8.0 * 1000.0 /
                       static_cast<double>(horizon_)
                 : 0.0;
    rep.sent_over_received =
        received_ ? static_cast<double>(sent_) / static_cast<double>(received_)
                  : 1.0;
    rep.flows = std::move(flows_);
    return rep;
  }

  const std::vector<TraceRecord>& trace_;
  const PacketClassifier& classifier_;
  SimConfig cfg_;

  std::uint64_t horizon_ = 0;
  std::uint64_t seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, EventAfter> events_;
  std::vector<Packet> pkts_;

  std::deque<std::size_t> input_q_;
  Ring ring1_{cfg_.ring1_capacity};
  Ring ring2_{cfg_.ring2_capacity};
  std::vector<std::deque<std::size_t>> port_q_;
  std::vector<bool> port_move_busy_;
  std::vector<std::uint32_t> tbuf_;
  std::vector<std::uint64_t> wire_free_;
  std::vector<std::uint64_t> port_sent_;
  std::uint32_t rr_next_ = 0;
  std::size_t wired_pending_ = 0;

  Stage receive_;
  Stage classify_;
  Stage transmit_;

  std::uint64_t received_ = 0;
  std::uint64_t sent_ = 0;
  std::uint64_t dropped_ = 0;
  std::uint64_t wire_bytes_ = 0;
  std::map<FlowId, FlowStats> flows_;
  std::map<FlowId, std::size_t> flow_occ_;
};

}  // namespace detail

/// Runs the three-stage pipeline over a time-sorted trace with the given
/// classifier plugged into the classify stage. Deterministic: identical
/// inputs produce identical reports on any host.
inline SimReport run_sim(const std::vector<TraceRecord>& trace,
                         const PacketClassifier& classifier,
                         const SimConfig& cfg = {}) {
  detail::Simulation sim(trace, classifier, cfg);
  return sim.run();
}

}  // namespace ttss
