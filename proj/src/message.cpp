#include "radiogather/message.hpp"

#include <nlohmann/json.hpp>

namespace radiogather {

namespace {

std::uint64_t hash_opt_set(const std::shared_ptr<const LabelSet>& s, std::uint64_t h) {
  if (!s) return fnv1a("-", 1, h);
  return hash_label_set(*s, h);
}

nlohmann::json set_to_json(const LabelSet& s, bool full) {
  if (full) {
    std::vector<std::size_t> bits;
    for (auto x = s.find_first(); x != LabelSet::npos; x = s.find_next(x)) bits.push_back(x);
    return bits;
  }
  return nlohmann::json{{"count", s.count()}, {"hash", hash_label_set(s)}};
}

}  // namespace

std::uint64_t Message::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto k = static_cast<std::uint8_t>(kind);
  h = fnv1a(&k, sizeof k, h);
  h = fnv1a(&sender, sizeof sender, h);
  h = fnv1a(&rws, sizeof rws, h);
  h = fnv1a(&gossip_class, sizeof gossip_class, h);
  h = fnv1a(&frame, sizeof frame, h);
  h = hash_opt_set(rumors, h);
  h = hash_opt_set(labels, h);
  if (vectors) {
    for (const auto& v : *vectors) {
      h = fnv1a(&v->origin, sizeof v->origin, h);
      h = hash_label_set(v->component, h);
      h = hash_label_set(v->in_neighbors, h);
      h = hash_label_set(v->acy_heard, h);
      h = hash_label_set(v->rumors, h);
    }
  }
  return h;
}

bool Message::content_equal(const Message& o) const {
  if (kind != o.kind || sender != o.sender || rws != o.rws ||
      gossip_class != o.gossip_class || frame != o.frame)
    return false;
  auto eq_set = [](const std::shared_ptr<const LabelSet>& a,
                   const std::shared_ptr<const LabelSet>& b) {
    if (!a || !b) return !a && !b;
    return *a == *b;
  };
  if (!eq_set(rumors, o.rumors) || !eq_set(labels, o.labels)) return false;
  if (!vectors || !o.vectors) return !vectors && !o.vectors;
  if (vectors->size() != o.vectors->size()) return false;
  for (std::size_t i = 0; i < vectors->size(); ++i)
    if (!(*(*vectors)[i] == *(*o.vectors)[i])) return false;
  return true;
}

nlohmann::json Message::to_json(bool full) const {
  nlohmann::json j;
  switch (kind) {
    case Kind::label_announce:
      j["kind"] = "label";
      break;
    case Kind::gather:
      j["kind"] = "gather";
      j["rumors"] = set_to_json(*rumors, full);
      j["rws"] = rws;
      break;
    case Kind::ack_gather:
      j["kind"] = "ack_gather";
      j["rumors"] = set_to_json(*rumors, full);
      break;
    case Kind::gossip_labels:
      j["kind"] = "gossip_labels";
      j["j"] = gossip_class;
      j["frame"] = frame;
      j["labels"] = set_to_json(*labels, full);
      break;
    case Kind::gossip_vectors: {
      j["kind"] = "gossip_vectors";
      j["j"] = gossip_class;
      j["frame"] = frame;
      nlohmann::json vecs = nlohmann::json::array();
      for (const auto& v : *vectors) {
        vecs.push_back({{"origin", v->origin},
                        {"comp", set_to_json(v->component, full)},
                        {"in", set_to_json(v->in_neighbors, full)},
                        {"acy", set_to_json(v->acy_heard, full)},
                        {"rumors", set_to_json(v->rumors, full)}});
      }
      j["vectors"] = std::move(vecs);
      break;
    }
  }
  j["sender"] = sender;
  return j;
}

MessagePtr make_label_announce(NodeId sender, int) {
  auto m = std::make_shared<Message>();
  m->kind = Message::Kind::label_announce;
  m->sender = sender;
  return m;
}

MessagePtr make_gather(NodeId sender, std::shared_ptr<const LabelSet> rumors, Step rws) {
  auto m = std::make_shared<Message>();
  m->kind = Message::Kind::gather;
  m->sender = sender;
  m->rumors = std::move(rumors);
  m->rws = rws;
  return m;
}

MessagePtr make_ack_gather(NodeId sender, std::shared_ptr<const LabelSet> rumors) {
  auto m = std::make_shared<Message>();
  m->kind = Message::Kind::ack_gather;
  m->sender = sender;
  m->rumors = std::move(rumors);
  return m;
}

MessagePtr make_gossip_labels(NodeId sender, int j, std::int64_t frame,
                              std::shared_ptr<const LabelSet> labels) {
  auto m = std::make_shared<Message>();
  m->kind = Message::Kind::gossip_labels;
  m->sender = sender;
  m->gossip_class = j;
  m->frame = frame;
  m->labels = std::move(labels);
  return m;
}

MessagePtr make_gossip_vectors(NodeId sender, int j, std::int64_t frame,
                               std::shared_ptr<const std::vector<SccVectorPtr>> vectors) {
  auto m = std::make_shared<Message>();
  m->kind = Message::Kind::gossip_vectors;
  m->sender = sender;
  m->gossip_class = j;
  m->frame = frame;
  m->vectors = std::move(vectors);
  return m;
}

}  // namespace radiogather
