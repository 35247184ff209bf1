#include "radiogather/experiment.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "radiogather/ack_gather.hpp"
#include "radiogather/roundrobin.hpp"

namespace radiogather {

namespace {

NetworkModel apply_overrides(NetworkModel m, const ModelOverrides& o) {
  if (o.frequencies > 0) m.frequencies = o.frequencies;
  if (o.srt >= 0) m.srt = o.srt != 0;
  if (o.ack >= 0) m.ack = o.ack != 0;
  return m;
}

}  // namespace

std::vector<std::string> protocol_names() {
  return {"roundrobin", "acyclic-gather", "arb-gather", "ack-gather"};
}

ProtocolSetup build_protocol_setup(const std::string& protocol, int n,
                                   const GatherConfig& cfg, const std::string& gossip_name,
                                   const ModelOverrides& overrides) {
  ProtocolSetup setup;
  setup.to_inner = identity_time_map();

  std::shared_ptr<ProtocolFactory> factory;
  if (protocol == "roundrobin") {
    factory = make_roundrobin();
    setup.budget = roundrobin_budget(n);
  } else if (protocol == "acyclic-gather") {
    factory = make_acyclic_gather(n, cfg);
    setup.budget = acyclic_gather_budget(n, cfg);
  } else if (protocol == "arb-gather") {
    auto gossip = std::shared_ptr<const GossipSubprotocol>(
        make_gossip(gossip_name, derive_seed(cfg.seed, 0xb40c)));
    factory = make_arb_gather(n, cfg, gossip);
    // graph-independent fallback; callers with the graph use arb_gather_budget
    setup.budget = acyclic_gather_budget(n, cfg) +
                   2LL * scc_frequency_count(n) * (static_cast<Step>(1) << scc_frequency_count(n)) * n;
  } else if (protocol == "ack-gather") {
    factory = make_ack_gather(n, cfg);
    setup.budget = ack_gather_bound(n, cfg);
  } else {
    throw ConfigError("unknown protocol '" + protocol + "'");
  }

  NetworkModel inner_model = factory->natural_model(n);
  const int inner_freqs = inner_model.frequencies;
  setup.model = apply_overrides(inner_model, overrides);
  setup.factory = std::move(factory);

  const bool strip = overrides.no_srt;
  const bool mux = overrides.single_freq || strip;
  if (mux && inner_freqs >= 1) {
    setup.factory = std::shared_ptr<ProtocolFactory>(
        multiplex_to_single_frequency(setup.factory, inner_freqs));
    setup.model.frequencies = 1;
    setup.to_inner = multiplex_time_map(inner_freqs);
    setup.scale *= inner_freqs;
    setup.budget *= inner_freqs;
  }
  if (strip) {
    SelectorFamily wrap = build_checked_selector(
        SelectorKind::strong, n, std::min(2, n),
        static_cast<std::size_t>(cfg.c_strong) * 4 * log2_ceil(n),
        derive_seed(cfg.seed, 0x57417), cfg.build);
    auto wrap_ptr = std::make_shared<const SelectorFamily>(std::move(wrap));
    const std::size_t seg = wrap_ptr->length();
    setup.factory = std::shared_ptr<ProtocolFactory>(strip_srt(setup.factory, wrap_ptr));
    setup.model.frequencies = 1;
    setup.model.srt = false;
    setup.to_inner = compose(strip_time_map(seg), setup.to_inner);
    setup.scale *= static_cast<Step>(seg);
    setup.budget *= static_cast<Step>(seg);
  }
  return setup;
}

RunOutcome run_one(const Digraph& g, const std::string& protocol, const GatherConfig& cfg,
                   const std::string& gossip_name, const ModelOverrides& overrides,
                   const TraceOptions& trace_options, double budget_multiplier,
                   Seed graph_seed, bool full_checks) {
  const int n = g.n();
  ProtocolSetup setup = build_protocol_setup(protocol, n, cfg, gossip_name, overrides);

  RunOptions opts;
  opts.trace = trace_options;
  opts.until = RunUntil::completion;

  Step bound_value = setup.budget;
  std::optional<LayerDecomposition> layers;
  std::vector<Step> tau;

  if (protocol == "arb-gather") {
    const SccPartition scc = compute_scc(g);
    bound_value = arb_gather_budget(n, cfg, *make_gossip(gossip_name, 0), scc) * setup.scale;
    opts.max_steps = bound_value;
  } else if (protocol == "ack-gather" && setup.scale == 1) {
    bound_value = ack_gather_bound(n, cfg);
    opts.max_steps = bound_value;
    if (full_checks && is_acyclic(g)) {
      layers = layer_decomposition(g);
      std::vector<std::size_t> sizes;
      for (const auto& layer : layers->layers) sizes.push_back(layer.size());
      tau = ack_layer_deadlines(sizes, n, cfg);
      tau.pop_back();  // the full-sum sentinel exceeds the claim range
      opts.trace.snapshot_steps = tau;
      opts.until = RunUntil::budget;  // observe the whole claim horizon
    }
  } else if (protocol == "acyclic-gather") {
    opts.max_steps = setup.budget;
    if (full_checks) opts.until = RunUntil::completion_and_target_activation;
  } else {
    opts.max_steps = setup.budget;
  }
  opts.max_steps = static_cast<Step>(static_cast<double>(opts.max_steps) * budget_multiplier);
  if (opts.max_steps < 1) opts.max_steps = 1;

  RunOutcome out{run(g, *setup.factory, setup.model, opts), {}};
  const Trace& trace = out.trace;
  RunReport& rep = out.report;

  std::ostringstream rid;
  rid << protocol << "-n" << n << "-s" << graph_seed;
  rep.run_id = rid.str();
  rep.protocol = trace.protocol;
  rep.model = trace.model.to_string();
  rep.n = n;
  rep.seed = graph_seed;
  rep.completion_step = trace.completion_step;
  rep.terminal_step = trace.terminal_step;
  rep.budget = opts.max_steps;
  rep.bound_value = bound_value;
  rep.budget_hit = trace.budget_hit;
  rep.anomalies = trace.anomalies;
  rep.verdicts["completed"] = trace.complete();
  if (trace.complete() && bound_value > 0)
    rep.margin = static_cast<double>(bound_value - trace.completion_step) /
                 static_cast<double>(bound_value);

  if (!full_checks) return out;

  if (protocol == "acyclic-gather" && setup.scale == 1 && trace.complete()) {
    const BetaSchedule beta = acyclic_beta_schedule(n, cfg);
    rep.critical_path = critical_path(trace, g);
    const Step hops = static_cast<Step>(rep.critical_path.size()) - 1;
    rep.bound_value = beta.activity_length() * (hops + 1);
    rep.verdicts["completion_bound"] = trace.completion_step <= rep.bound_value;
    rep.stage_increment_total = stage_increments(trace, 0, trace.terminal_step + 1);
    rep.verdicts["stage_budget"] =
        rep.stage_increment_total <= static_cast<long long>(beta.theta + 1) * n;
    rep.verdicts["frequency_discipline"] = frequency_discipline_violations(trace) == 0;
    rep.verdicts["activation_order"] = activation_order_violations(trace, g) == 0;
    if (rep.bound_value > 0)
      rep.margin = static_cast<double>(rep.bound_value - trace.completion_step) /
                   static_cast<double>(rep.bound_value);
  }
  if (protocol == "arb-gather") {
    const SccPartition scc = compute_scc(g);
    rep.verdicts["scc_safety"] = scc_pass_violations(trace, scc) == 0;
    if (trace.complete())
      rep.verdicts["completion_bound"] = trace.completion_step <= rep.bound_value;
  }
  if (protocol == "ack-gather" && layers) {
    rep.verdicts["completion_bound"] =
        trace.complete() && trace.completion_step < ack_gather_bound(n, cfg);
    const LayerClaimReport claim = check_layer_claim(trace, *layers, cfg.c_half);
    rep.verdicts["layer_claim"] = claim.all_pass();
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  ExperimentResult result;
  std::ostringstream csv;
  csv << RunReport::csv_header() << '\n';

  std::vector<std::pair<double, double>> medians;
  for (int n : spec.ns) {
    GatherConfig cfg = spec.cfg;
    cfg.seed = derive_seed(spec.base_seed, 0xc0de, static_cast<std::uint64_t>(n));
    std::vector<double> completions;
    for (int s = 0; s < spec.seeds_per_n; ++s) {
      const Seed graph_seed = derive_seed(spec.base_seed, static_cast<std::uint64_t>(n), s);
      const Digraph g = generate(spec.gen_kind, n, spec.gen_params, graph_seed);
      TraceOptions topt;
      if (!spec.full_checks) {
        topt.record_transmits = false;
        topt.deliveries = DeliveryDetail::first_pair;
        topt.record_acks = false;
      }
      RunOutcome out = run_one(g, spec.protocol, cfg, spec.gossip, spec.overrides, topt,
                               spec.budget_multiplier, graph_seed, spec.full_checks);
      if (out.report.completion_step >= 0)
        completions.push_back(static_cast<double>(out.report.completion_step));
      result.all_pass = result.all_pass && out.report.all_verdicts_pass();
      csv << out.report.csv_row() << '\n';
      result.rows.push_back(std::move(out.report));
    }
    if (!completions.empty()) {
      std::sort(completions.begin(), completions.end());
      const double median = completions[completions.size() / 2];
      medians.emplace_back(static_cast<double>(n), std::max(median, 1.0));
    }
  }
  result.slope = loglog_slope(medians);
  char buf[48];
  std::snprintf(buf, sizeof buf, "# slope=%.4f", result.slope);
  csv << buf << '\n';
  result.csv = csv.str();
  return result;
}

}  // namespace radiogather
