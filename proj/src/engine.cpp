#include "radiogather/engine.hpp"

#include <algorithm>
#include <queue>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace radiogather {

namespace {

NodeSnapshot snapshot_of(const NodeMachine& node) {
  NodeView v = node.view();
  NodeSnapshot s;
  s.mode = v.mode;
  s.stage = v.stage;
  s.alpha = v.alpha;
  if (v.rumors) s.rumors = *v.rumors;
  return s;
}

}  // namespace

DiscoveryResult discover_in_neighbors(const Digraph& g, bool record_trace) {
  const int n = g.n();
  DiscoveryResult res;
  res.in_neighbors.resize(n);
  res.trace.n = n;
  res.trace.target = g.target();
  res.trace.protocol = "neighbor-discovery";
  res.trace.model = NetworkModel{1, true, false};
  for (Step step = 0; step < n; ++step) {
    NodeId u = discovery_transmitter(step, n);
    std::uint32_t payload = 0;
    if (record_trace) {
      payload = static_cast<std::uint32_t>(res.trace.payloads.size());
      res.trace.payloads.push_back(make_label_announce(u, n));
      res.trace.transmits.push_back({step, 0, u, payload});
    }
    for (NodeId v : g.out_neighbors(u)) {
      res.in_neighbors[v].push_back(u);
      if (record_trace) res.trace.deliveries.push_back({step, 0, v, u, payload});
    }
  }
  for (auto& nb : res.in_neighbors) std::sort(nb.begin(), nb.end());
  res.trace.terminal_step = n - 1;
  return res;
}

Trace run(const Digraph& g, ProtocolFactory& factory, const NetworkModel& model,
          const RunOptions& opts) {
  const int n = g.n();
  const NodeId target = g.target();
  if (!validate_target_reachable(g))
    throw ConfigError("run: target is not reachable from every node");
  factory.validate_model(model, n);
  if (opts.max_steps <= 0) throw ConfigError("run: max_steps must be positive");

  Trace trace;
  trace.n = n;
  trace.target = target;
  trace.protocol = factory.name();
  trace.model = model;
  trace.options = opts.trace;
  trace.params_text = factory.params(n).dump();

  // preprocessing
  std::vector<std::vector<NodeId>> in_nbrs(n);
  if (factory.needs_in_neighbors() && opts.discover) {
    auto disc = discover_in_neighbors(g);
    in_nbrs = std::move(disc.in_neighbors);
    trace.preprocess_steps = n;
  }

  std::vector<std::unique_ptr<NodeMachine>> nodes;
  nodes.reserve(n);
  for (NodeId v = 0; v < n; ++v) nodes.push_back(factory.make_node(n, v, in_nbrs[v]));

  const int freqs = model.frequencies;

  // wake scheduling: poll a node when its declared wake step arrives or right
  // after it received any input
  std::vector<Step> next_wake(n, 0);
  using HeapItem = std::pair<Step, NodeId>;
  std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> wake_heap;
  for (NodeId v = 0; v < n; ++v) wake_heap.emplace(0, v);
  std::vector<NodeId> input_flagged;  // nodes that got input last step

  // per-step scratch, reset via touch lists
  struct FreqScratch {
    std::vector<int> count;
    std::vector<NodeId> cand_sender;
    std::vector<MessagePtr> cand_msg;
    std::vector<char> transmitting;
    std::vector<NodeId> touched_rx;
    std::vector<NodeId> touched_tx;
  };
  std::vector<FreqScratch> fs(freqs);
  for (auto& f : fs) {
    f.count.assign(n, 0);
    f.cand_sender.assign(n, -1);
    f.cand_msg.assign(n, nullptr);
    f.transmitting.assign(n, 0);
  }

  std::vector<std::vector<ReceivedMessage>> inbox(n);
  std::vector<NodeId> inbox_touched;
  std::vector<char> delivered_any(n, 0);
  std::vector<TxDecision> decisions;
  std::vector<NodeId> due;
  std::vector<NodeId> transmitters_this_step;

  // payload interning by object identity; the table keeps messages alive
  std::unordered_map<const Message*, std::uint32_t> payload_index;
  auto intern_payload = [&](const MessagePtr& m) -> std::uint32_t {
    auto it = payload_index.find(m.get());
    if (it != payload_index.end()) return it->second;
    auto idx = static_cast<std::uint32_t>(trace.payloads.size());
    trace.payloads.push_back(m);
    payload_index.emplace(m.get(), idx);
    return idx;
  };

  std::vector<std::pair<NodeId, NodeId>> seen_pairs;  // first-delivery dedup
  std::vector<char> pair_seen;
  if (opts.trace.deliveries == DeliveryDetail::first_pair)
    pair_seen.assign(static_cast<std::size_t>(n) * n, 0);

  auto snapshot_steps = opts.trace.snapshot_steps;
  std::sort(snapshot_steps.begin(), snapshot_steps.end());
  std::size_t next_snapshot = 0;

  auto take_snapshot = [&](Step at) {
    TraceSnapshot snap;
    snap.at = at;
    snap.nodes.reserve(n);
    for (NodeId v = 0; v < n; ++v) snap.nodes.push_back(snapshot_of(*nodes[v]));
    trace.snapshots.push_back(std::move(snap));
  };

  bool completed = false;
  bool target_check_due = true;  // n == 1 completes with no traffic at all
  Step step = 0;

  for (step = 0; step < opts.max_steps; ++step) {
    while (next_snapshot < snapshot_steps.size() && snapshot_steps[next_snapshot] == step) {
      take_snapshot(step);
      ++next_snapshot;
    }

    // assemble due set: expired wakes plus last step's input receivers
    due.clear();
    while (!wake_heap.empty() && wake_heap.top().first <= step) {
      auto [s, v] = wake_heap.top();
      wake_heap.pop();
      if (next_wake[v] == s) due.push_back(v);
    }
    for (NodeId v : input_flagged)
      if (next_wake[v] != step) due.push_back(v);  // not already due via heap
    input_flagged.clear();
    std::sort(due.begin(), due.end());
    due.erase(std::unique(due.begin(), due.end()), due.end());

    // phase 1: transmissions
    transmitters_this_step.clear();
    for (NodeId v : due) {
      decisions.clear();
      Step wake = nodes[v]->plan(step, decisions);
      if (wake <= step) wake = step + 1;
      next_wake[v] = wake;
      if (wake != kNeverStep) wake_heap.emplace(wake, v);
      if (decisions.empty()) continue;
      bool any = false;
      for (const auto& d : decisions) {
        if (d.freq < 0 || d.freq >= freqs)
          throw ConfigError("protocol transmitted on frequency " + std::to_string(d.freq) +
                            " outside the model's range");
        auto& f = fs[d.freq];
        if (f.transmitting[v]) continue;  // one message per frequency per step
        f.transmitting[v] = 1;
        f.touched_tx.push_back(v);
        any = true;
        if (opts.trace.record_transmits)
          trace.transmits.push_back({step, d.freq, v, intern_payload(d.msg)});
        for (NodeId w : g.out_neighbors(v)) {
          int c = ++f.count[w];
          if (c == 1) {
            f.cand_sender[w] = v;
            f.cand_msg[w] = d.msg;
            f.touched_rx.push_back(w);
          }
        }
      }
      if (any) transmitters_this_step.push_back(v);
    }

    // phase 2: deliveries per the collision rule
    std::fill(delivered_any.begin(), delivered_any.end(), 0);
    for (Freq f = 0; f < freqs; ++f) {
      auto& sc = fs[f];
      for (NodeId w : sc.touched_rx) {
        if (sc.count[w] == 1) {
          // exactly one in-neighbor transmitted on f; srt=false additionally
          // drops the reception if w itself transmitted on f
          if (model.srt || !sc.transmitting[w]) {
            NodeId u = sc.cand_sender[w];
            const MessagePtr& m = sc.cand_msg[w];
            if (inbox[w].empty()) inbox_touched.push_back(w);
            inbox[w].push_back({f, m});
            delivered_any[u] = 1;
            switch (opts.trace.deliveries) {
              case DeliveryDetail::all:
                trace.deliveries.push_back({step, f, w, u, intern_payload(m)});
                break;
              case DeliveryDetail::first_pair: {
                auto key = static_cast<std::size_t>(u) * n + w;
                if (!pair_seen[key]) {
                  pair_seen[key] = 1;
                  trace.deliveries.push_back({step, f, w, u, intern_payload(m)});
                }
                break;
              }
              case DeliveryDetail::none:
                break;
            }
            if (opts.on_delivery) opts.on_delivery(step, f, w, u, *m);
          }
        }
        sc.count[w] = 0;
        sc.cand_sender[w] = -1;
        sc.cand_msg[w] = nullptr;
      }
      sc.touched_rx.clear();
    }

    // phase 3: hand deliveries and acks to the nodes
    std::sort(inbox_touched.begin(), inbox_touched.end());
    for (NodeId w : inbox_touched) {
      nodes[w]->observe(step, inbox[w]);
      input_flagged.push_back(w);
      if (w == target) target_check_due = true;
    }
    if (model.ack) {
      for (NodeId u : transmitters_this_step) {
        nodes[u]->on_ack(step, delivered_any[u] != 0);
        if (opts.trace.record_acks)
          trace.acks.push_back({step, u, delivered_any[u] != 0});
        input_flagged.push_back(u);
      }
    }
    // end-of-step transitions for every node that saw input this step
    {
      std::vector<NodeId> touched;
      touched.reserve(inbox_touched.size() + transmitters_this_step.size());
      for (NodeId w : inbox_touched) touched.push_back(w);
      if (model.ack)
        for (NodeId u : transmitters_this_step) touched.push_back(u);
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
      for (NodeId v : touched) nodes[v]->end_step(step);
      for (NodeId v : touched) nodes[v]->drain_events(trace.events);
      for (NodeId v : due) nodes[v]->drain_events(trace.events);
    }
    for (NodeId w : inbox_touched) inbox[w].clear();
    inbox_touched.clear();
    for (Freq f = 0; f < freqs; ++f) {
      auto& sc = fs[f];
      for (NodeId v : sc.touched_tx) sc.transmitting[v] = 0;
      sc.touched_tx.clear();
    }

    // termination
    if (!completed && target_check_due) {
      NodeView tv = nodes[target]->view();
      if (tv.rumors && tv.rumors->count() == static_cast<std::size_t>(n)) {
        completed = true;
        trace.completion_step = step;
      }
      target_check_due = false;
    }
    if (completed) {
      if (opts.until == RunUntil::completion) break;
      if (opts.until == RunUntil::completion_and_target_activation &&
          nodes[target]->view().alpha >= 0)
        break;
    }
  }

  trace.terminal_step = std::min(step, opts.max_steps - 1);
  trace.budget_hit = !completed && step >= opts.max_steps;
  // snapshot steps at or past the horizon see the final state; callers size
  // max_steps so the steps they care about land inside the loop
  while (next_snapshot < snapshot_steps.size()) {
    take_snapshot(snapshot_steps[next_snapshot]);
    ++next_snapshot;
  }
  trace.anomalies = 0;
  for (const auto& ev : trace.events)
    if (ev.kind == StateEvent::Kind::anomaly) ++trace.anomalies;
  trace.final_states.reserve(n);
  for (NodeId v = 0; v < n; ++v) trace.final_states.push_back(snapshot_of(*nodes[v]));
  return trace;
}

}  // namespace radiogather
