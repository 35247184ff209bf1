#include "radiogather/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace radiogather {

namespace {

using nlohmann::json;

json parsed_params(const Trace& t) {
  if (t.params_text.empty()) return json::object();
  return json::parse(t.params_text);
}

std::vector<Step> beta_from_params(const Trace& t) {
  json p = parsed_params(t);
  if (!p.contains("beta"))
    throw std::invalid_argument("trace params carry no stage schedule");
  return p.at("beta").get<std::vector<Step>>();
}

}  // namespace

std::optional<Step> completion_time(const Trace& t, const Digraph& g) {
  const int n = t.n;
  std::vector<LabelSet> held(n, LabelSet(n));
  for (NodeId v = 0; v < n; ++v) held[v].set(v);
  if (held[g.target()].count() == static_cast<std::size_t>(n)) return 0;
  for (const auto& d : t.deliveries) {
    const Message& m = *t.payloads[d.payload];
    if (!m.rumors) continue;
    held[d.receiver] |= *m.rumors;
    if (d.receiver == g.target() &&
        held[g.target()].count() == static_cast<std::size_t>(n))
      return d.step;
  }
  return std::nullopt;
}

std::vector<Step> activation_steps(const Trace& t) {
  std::vector<Step> alpha(t.n, -1);
  for (const auto& ev : t.events)
    if (ev.kind == StateEvent::Kind::activated && alpha[ev.node] < 0)
      alpha[ev.node] = ev.a;
  return alpha;
}

std::vector<std::map<NodeId, FirstContact>> first_contacts(const Trace& t) {
  std::vector<std::map<NodeId, FirstContact>> fc(t.n);
  for (const auto& d : t.deliveries) {
    const Message& m = *t.payloads[d.payload];
    if (m.kind != Message::Kind::gather) continue;
    auto& slot = fc[d.receiver][d.sender];
    if (d.step < slot.step) {
      slot.step = d.step;
      slot.rws = m.rws;
    }
  }
  return fc;
}

std::vector<NodeId> critical_path(const Trace& t, const Digraph& g) {
  const auto alpha = activation_steps(t);
  const auto fc = first_contacts(t);
  std::vector<NodeId> path{g.target()};
  NodeId v = g.target();
  while (!g.in_neighbors(v).empty()) {
    const auto& contacts = fc[v];
    // the predecessor is the in-neighbor whose first message arrived last
    Step last_step = -1;
    for (NodeId u : g.in_neighbors(v)) {
      auto it = contacts.find(u);
      if (it == contacts.end() || it->second.step == kNeverStep)
        throw std::runtime_error("critical_path: node " + std::to_string(v) +
                                 " activated without first contact from " + std::to_string(u));
      last_step = std::max(last_step, it->second.step);
    }
    NodeId best = -1;
    Step best_rws = -1;
    for (NodeId u : g.in_neighbors(v)) {
      const auto& slot = contacts.at(u);
      if (slot.step != last_step) continue;
      if (slot.rws > best_rws || (slot.rws == best_rws && u > best)) {
        best = u;
        best_rws = slot.rws;
      }
    }
    if (alpha[v] != best_rws)
      throw std::runtime_error("critical_path: alpha(" + std::to_string(v) +
                               ") does not match the last first-arrival recommendation");
    path.push_back(best);
    v = best;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

long long stage_increments(const Trace& t, Step lo, Step hi) {
  const auto beta = beta_from_params(t);
  const auto alpha = activation_steps(t);
  long long count = 0;
  for (NodeId v = 0; v < t.n; ++v) {
    if (alpha[v] < 0) continue;
    for (Step b : beta) {
      const Step at = alpha[v] + b;
      if (at >= lo && at < hi) ++count;
    }
  }
  return count;
}

long long frequency_discipline_violations(const Trace& t) {
  json p = parsed_params(t);
  if (!p.contains("beta")) return 0;
  const auto beta = p.at("beta").get<std::vector<Step>>();
  const int theta = static_cast<int>(beta.size()) - 1;
  const auto alpha = activation_steps(t);
  auto stage_of = [&](Step offset) {
    for (int j = 0; j < theta; ++j)
      if (offset < beta[j + 1]) return j;
    return theta;
  };
  long long violations = 0;
  for (const auto& rec : t.transmits) {
    const Message& m = *t.payloads[rec.payload];
    if (m.kind == Message::Kind::gather) {
      if (alpha[rec.sender] < 0 || rec.step < alpha[rec.sender]) {
        ++violations;  // transmitted while dormant
        continue;
      }
      const int j = stage_of(rec.step - alpha[rec.sender]);
      if (j >= theta || rec.freq != j) ++violations;
    } else if (m.kind == Message::Kind::gossip_labels ||
               m.kind == Message::Kind::gossip_vectors) {
      const int theta_acy = p.value("theta", 0);
      if (rec.freq != theta_acy + m.gossip_class) ++violations;
    }
  }
  return violations;
}

long long activation_order_violations(const Trace& t, const Digraph& g) {
  const auto fc = first_contacts(t);
  long long violations = 0;
  for (const auto& ev : t.events) {
    if (ev.kind != StateEvent::Kind::activated) continue;
    if (ev.b < 0) continue;  // source: activated by construction
    const NodeId v = ev.node;
    for (NodeId u : g.in_neighbors(v)) {
      auto it = fc[v].find(u);
      if (it == fc[v].end() || it->second.step > ev.b) ++violations;
    }
    if (ev.a <= ev.b) ++violations;  // activation must lie strictly ahead
  }
  return violations;
}

long long scc_pass_violations(const Trace& t, const SccPartition& scc) {
  long long violations = 0;
  for (const auto& ev : t.events) {
    if (ev.kind != StateEvent::Kind::scc_pass) continue;
    const auto& truth = scc.components[scc.component_of[ev.node]];
    if (ev.members != truth) ++violations;
  }
  return violations;
}

bool LayerClaimReport::all_pass() const {
  return std::all_of(per_layer.begin(), per_layer.end(),
                     [](const LayerClaimVerdict& v) { return v.dormancy && v.containment; });
}

LayerClaimReport check_layer_claim(const Trace& t, const LayerDecomposition& layers,
                                   int c_half) {
  const int n = t.n;
  const int r = layers.max_delta;
  const int log_n = log2_ceil(n);
  LayerClaimReport report;
  report.per_layer.resize(r + 1);

  // tau_i = 4 * c_half * sum_{p<i} |B_p| * ceil(log2 n)
  std::vector<Step> tau(r + 1, 0);
  Step acc = 0;
  for (int i = 0; i <= r; ++i) {
    tau[i] = 4LL * c_half * acc * log_n;
    if (i < r) acc += static_cast<Step>(layers.layers[i].size());
  }

  auto snapshot_at = [&](Step at) -> const TraceSnapshot* {
    for (const auto& s : t.snapshots)
      if (s.at == at) return &s;
    return nullptr;
  };

  for (int i = 0; i <= r; ++i) {
    auto& verdict = report.per_layer[i];
    verdict.tau = tau[i];
    const TraceSnapshot* snap = snapshot_at(tau[i]);
    if (!snap)
      throw std::invalid_argument("check_layer_claim: trace lacks a snapshot at tau_" +
                                  std::to_string(i));
    // (i) everything strictly above layer i is dormant at tau_i and stays so
    for (int p = 0; p < i; ++p)
      for (NodeId v : layers.layers[p])
        if (snap->nodes[v].mode != 0) verdict.dormancy = false;
    if (verdict.dormancy) {
      for (const auto& ev : t.events) {
        if (ev.kind != StateEvent::Kind::activated || ev.step < tau[i]) continue;
        if (layers.layer_of(ev.node) < i) {
          verdict.dormancy = false;
          break;
        }
      }
    }
    // (ii) every rumor already lives in layer i or deeper
    for (NodeId x = 0; x < n && verdict.containment; ++x) {
      bool found = false;
      for (int p = i; p <= r && !found; ++p)
        for (NodeId v : layers.layers[p])
          if (snap->nodes[v].rumors.test(x)) {
            found = true;
            break;
          }
      if (!found) verdict.containment = false;
    }
  }
  return report;
}

double loglog_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : points) {
    const double lx = std::log2(x);
    const double ly = std::log2(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = static_cast<double>(points.size());
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

bool RunReport::all_verdicts_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(),
                     [](const auto& kv) { return kv.second; });
}

std::string RunReport::to_json_string() const {
  json j{{"run_id", run_id},
         {"protocol", protocol},
         {"model", model},
         {"n", n},
         {"seed", seed},
         {"completion_step", completion_step},
         {"terminal_step", terminal_step},
         {"budget", budget},
         {"bound_value", bound_value},
         {"margin", margin},
         {"budget_hit", budget_hit},
         {"anomalies", anomalies},
         {"stage_increment_total", stage_increment_total},
         {"critical_path", critical_path},
         {"verdicts", verdicts}};
  return j.dump();
}

std::string RunReport::csv_header() {
  return "run_id,protocol,model,n,seed,completion_step,budget,bound_value,margin,verdicts";
}

std::string RunReport::csv_row() const {
  std::ostringstream os;
  os << run_id << ',' << protocol << ',' << model << ',' << n << ',' << seed << ','
     << completion_step << ',' << budget << ',' << bound_value << ',';
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", margin);
  os << buf << ',';
  bool first = true;
  for (const auto& [key, ok] : verdicts) {
    if (!first) os << ';';
    os << key << '=' << (ok ? "pass" : "fail");
    first = false;
  }
  return os.str();
}

}  // namespace radiogather
