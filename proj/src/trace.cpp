#include "radiogather/trace.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace radiogather {

namespace {

using nlohmann::json;

json set_bits(const LabelSet& s) {
  std::vector<std::size_t> out;
  for (auto x = s.find_first(); x != LabelSet::npos; x = s.find_next(x)) out.push_back(x);
  return out;
}

LabelSet bits_set(const json& arr, int n) {
  LabelSet s(n);
  for (const auto& v : arr) s.set(v.get<std::size_t>());
  return s;
}

const char* event_kind_name(StateEvent::Kind k) {
  switch (k) {
    case StateEvent::Kind::activated: return "activated";
    case StateEvent::Kind::deactivated: return "deactivated";
    case StateEvent::Kind::scc_pass: return "scc_pass";
    case StateEvent::Kind::anomaly: return "anomaly";
  }
  return "?";
}

StateEvent::Kind event_kind_from(const std::string& s) {
  if (s == "activated") return StateEvent::Kind::activated;
  if (s == "deactivated") return StateEvent::Kind::deactivated;
  if (s == "scc_pass") return StateEvent::Kind::scc_pass;
  return StateEvent::Kind::anomaly;
}

json snapshot_json(const NodeSnapshot& ns) {
  return json{{"mode", ns.mode}, {"stage", ns.stage}, {"alpha", ns.alpha},
              {"rumors", set_bits(ns.rumors)}};
}

NodeSnapshot snapshot_from(const json& j, int n) {
  NodeSnapshot ns;
  ns.mode = j.at("mode").get<int>();
  ns.stage = j.at("stage").get<int>();
  ns.alpha = j.at("alpha").get<Step>();
  ns.rumors = bits_set(j.at("rumors"), n);
  return ns;
}

}  // namespace

std::string Trace::to_jsonl() const {
  std::ostringstream os;
  json header{{"type", "header"},
              {"n", n},
              {"target", target},
              {"protocol", protocol},
              {"model", {{"frequencies", model.frequencies}, {"srt", model.srt}, {"ack", model.ack}}},
              {"seed", seed},
              {"preprocess_steps", preprocess_steps}};
  if (!params_text.empty()) header["params"] = json::parse(params_text);
  os << header.dump() << '\n';

  // step records, merged over the three streams in step order
  std::size_t it = 0, id = 0, ia = 0;
  Step step = 0;
  while (it < transmits.size() || id < deliveries.size() || ia < acks.size()) {
    Step next = kNeverStep;
    if (it < transmits.size()) next = std::min(next, transmits[it].step);
    if (id < deliveries.size()) next = std::min(next, deliveries[id].step);
    if (ia < acks.size()) next = std::min(next, acks[ia].step);
    step = next;
    json rec{{"type", "step"}, {"step", step}};
    json tx = json::array(), rx = json::array(), ak = json::array();
    for (; it < transmits.size() && transmits[it].step == step; ++it)
      tx.push_back({{"f", transmits[it].freq},
                    {"u", transmits[it].sender},
                    {"pl", payloads[transmits[it].payload]->to_json(options.full_payload_json)}});
    for (; id < deliveries.size() && deliveries[id].step == step; ++id)
      rx.push_back({{"f", deliveries[id].freq},
                    {"v", deliveries[id].receiver},
                    {"u", deliveries[id].sender},
                    {"pl", payloads[deliveries[id].payload]->to_json(options.full_payload_json)}});
    for (; ia < acks.size() && acks[ia].step == step; ++ia)
      ak.push_back({{"u", acks[ia].node}, {"ok", acks[ia].delivered}});
    if (!tx.empty()) rec["tx"] = std::move(tx);
    if (!rx.empty()) rec["rx"] = std::move(rx);
    if (!ak.empty()) rec["ack"] = std::move(ak);
    os << rec.dump() << '\n';
  }

  for (const auto& ev : events) {
    json e{{"type", "event"},
           {"step", ev.step},
           {"node", ev.node},
           {"kind", event_kind_name(ev.kind)},
           {"a", ev.a},
           {"b", ev.b}};
    if (!ev.members.empty()) e["members"] = ev.members;
    if (ev.rumor_hash != 0) e["rumor_hash"] = ev.rumor_hash;
    os << e.dump() << '\n';
  }

  for (const auto& snap : snapshots) {
    json s{{"type", "snapshot"}, {"at", snap.at}};
    json nodes = json::array();
    for (const auto& ns : snap.nodes) nodes.push_back(snapshot_json(ns));
    s["nodes"] = std::move(nodes);
    os << s.dump() << '\n';
  }

  json fin = json::array();
  for (const auto& ns : final_states) fin.push_back(snapshot_json(ns));
  json end{{"type", "end"},
           {"terminal", terminal_step},
           {"completion", completion_step},
           {"budget_hit", budget_hit},
           {"anomalies", anomalies},
           {"final", std::move(fin)}};
  os << end.dump() << '\n';
  return os.str();
}

namespace {

MessagePtr message_from_json(const json& pl, int n) {
  auto m = std::make_shared<Message>();
  m->sender = pl.at("sender").get<NodeId>();
  const std::string kind = pl.at("kind").get<std::string>();
  auto parse_set = [&](const json& v) -> std::shared_ptr<const LabelSet> {
    if (!v.is_array())
      throw std::runtime_error("trace: payload stored without full detail; re-run with full payloads");
    return std::make_shared<LabelSet>(bits_set(v, n));
  };
  if (kind == "label") {
    m->kind = Message::Kind::label_announce;
  } else if (kind == "gather") {
    m->kind = Message::Kind::gather;
    m->rumors = parse_set(pl.at("rumors"));
    m->rws = pl.at("rws").get<Step>();
  } else if (kind == "ack_gather") {
    m->kind = Message::Kind::ack_gather;
    m->rumors = parse_set(pl.at("rumors"));
  } else if (kind == "gossip_labels") {
    m->kind = Message::Kind::gossip_labels;
    m->gossip_class = pl.at("j").get<std::int32_t>();
    m->frame = pl.at("frame").get<std::int64_t>();
    m->labels = parse_set(pl.at("labels"));
  } else if (kind == "gossip_vectors") {
    m->kind = Message::Kind::gossip_vectors;
    m->gossip_class = pl.at("j").get<std::int32_t>();
    m->frame = pl.at("frame").get<std::int64_t>();
    auto vecs = std::make_shared<std::vector<SccVectorPtr>>();
    for (const auto& vj : pl.at("vectors")) {
      auto sv = std::make_shared<SccVector>();
      sv->origin = vj.at("origin").get<NodeId>();
      sv->component = bits_set(vj.at("comp"), n);
      sv->in_neighbors = bits_set(vj.at("in"), n);
      sv->acy_heard = bits_set(vj.at("acy"), n);
      sv->rumors = bits_set(vj.at("rumors"), n);
      vecs->push_back(std::move(sv));
    }
    m->vectors = std::move(vecs);
  } else {
    throw std::runtime_error("trace: unknown payload kind " + kind);
  }
  return m;
}

}  // namespace

Trace Trace::from_jsonl(const std::string& text) {
  Trace t;
  std::istringstream is(text);
  std::string line;
  std::map<std::uint64_t, std::uint32_t> payload_index;
  auto intern = [&](const json& pl) -> std::uint32_t {
    MessagePtr m = message_from_json(pl, t.n);
    std::uint64_t fp = m->fingerprint();
    auto it = payload_index.find(fp);
    if (it != payload_index.end()) return it->second;
    auto idx = static_cast<std::uint32_t>(t.payloads.size());
    t.payloads.push_back(std::move(m));
    payload_index.emplace(fp, idx);
    return idx;
  };
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    const std::string type = j.at("type").get<std::string>();
    if (type == "header") {
      t.n = j.at("n").get<int>();
      t.target = j.at("target").get<NodeId>();
      t.protocol = j.at("protocol").get<std::string>();
      t.model.frequencies = j.at("model").at("frequencies").get<int>();
      t.model.srt = j.at("model").at("srt").get<bool>();
      t.model.ack = j.at("model").at("ack").get<bool>();
      t.seed = j.at("seed").get<Seed>();
      t.preprocess_steps = j.at("preprocess_steps").get<Step>();
      if (j.contains("params")) t.params_text = j.at("params").dump();
    } else if (type == "step") {
      Step step = j.at("step").get<Step>();
      if (j.contains("tx"))
        for (const auto& r : j.at("tx"))
          t.transmits.push_back({step, r.at("f").get<Freq>(), r.at("u").get<NodeId>(),
                                 intern(r.at("pl"))});
      if (j.contains("rx"))
        for (const auto& r : j.at("rx"))
          t.deliveries.push_back({step, r.at("f").get<Freq>(), r.at("v").get<NodeId>(),
                                  r.at("u").get<NodeId>(), intern(r.at("pl"))});
      if (j.contains("ack"))
        for (const auto& r : j.at("ack"))
          t.acks.push_back({step, r.at("u").get<NodeId>(), r.at("ok").get<bool>()});
    } else if (type == "event") {
      StateEvent ev;
      ev.step = j.at("step").get<Step>();
      ev.node = j.at("node").get<NodeId>();
      ev.kind = event_kind_from(j.at("kind").get<std::string>());
      ev.a = j.at("a").get<std::int64_t>();
      ev.b = j.at("b").get<std::int64_t>();
      if (j.contains("members")) ev.members = j.at("members").get<std::vector<NodeId>>();
      if (j.contains("rumor_hash")) ev.rumor_hash = j.at("rumor_hash").get<std::uint64_t>();
      t.events.push_back(std::move(ev));
    } else if (type == "snapshot") {
      TraceSnapshot snap;
      snap.at = j.at("at").get<Step>();
      for (const auto& nj : j.at("nodes")) snap.nodes.push_back(snapshot_from(nj, t.n));
      t.snapshots.push_back(std::move(snap));
    } else if (type == "end") {
      t.terminal_step = j.at("terminal").get<Step>();
      t.completion_step = j.at("completion").get<Step>();
      t.budget_hit = j.at("budget_hit").get<bool>();
      t.anomalies = j.at("anomalies").get<long long>();
      for (const auto& nj : j.at("final")) t.final_states.push_back(snapshot_from(nj, t.n));
    }
  }
  return t;
}

void Trace::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << to_jsonl();
}

Trace Trace::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return from_jsonl(ss.str());
}

std::string Trace::csv_header() {
  return "run_id,protocol,model,n,seed,completion_step,terminal_step,budget_hit,anomalies";
}

std::string Trace::csv_row(const std::string& run_id) const {
  std::ostringstream os;
  os << run_id << ',' << protocol << ',' << model.to_string() << ',' << n << ',' << seed
     << ',' << completion_step << ',' << terminal_step << ',' << (budget_hit ? 1 : 0)
     << ',' << anomalies;
  return os.str();
}

StepOutcome step_outcome(const Trace& t, const Digraph& g, Step step, Freq freq,
                         NodeId receiver) {
  StepOutcome out;
  int in_transmitters = 0;
  const Message* only = nullptr;
  NodeId only_sender = -1;
  bool receiver_transmitted = false;
  for (const auto& rec : t.transmits) {
    if (rec.step != step || rec.freq != freq) continue;
    if (rec.sender == receiver) receiver_transmitted = true;
    if (g.has_edge(rec.sender, receiver)) {
      ++in_transmitters;
      only = t.payloads[rec.payload].get();
      only_sender = rec.sender;
    }
  }
  if (in_transmitters == 0) return out;  // silence
  if (in_transmitters >= 2) {
    out.outcome = 2;
    return out;
  }
  if (!t.model.srt && receiver_transmitted) {
    out.outcome = 3;
    return out;
  }
  out.outcome = 1;
  out.sender = only_sender;
  out.msg = only;
  return out;
}

}  // namespace radiogather
