#pragma once

#include <memory>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "radiogather/common.hpp"

namespace radiogather {

/// Odd-frame gossip record: one node's view of its component plus its
/// in-neighborhood bookkeeping and rumor snapshot.
struct SccVector {
  NodeId origin = -1;
  LabelSet component;     // labels this node collected in the even frame
  LabelSet in_neighbors;  // true in-neighbor set (from preprocessing)
  LabelSet acy_heard;     // in-neighbors heard on an ACY frequency before the frame
  LabelSet rumors;        // rumors held before the frame, own included

  bool operator==(const SccVector& o) const = default;
};
using SccVectorPtr = std::shared_ptr<const SccVector>;

/// A transmitted message. Payload size is never budgeted; rumor sets and
/// gossip vectors are aggregated wholesale and shared immutably.
struct Message {
  enum class Kind : std::uint8_t {
    label_announce,  // preprocessing: sender label only
    gather,          // rumor set + recommended wake-up step
    gossip_labels,   // even gossip frame: aggregated label set
    gossip_vectors,  // odd gossip frame: aggregated SccVector records
    ack_gather,      // rumor set only
  };

  Kind kind = Kind::label_announce;
  NodeId sender = -1;
  std::shared_ptr<const LabelSet> rumors;  // gather / ack_gather
  Step rws = -1;                           // gather
  std::int32_t gossip_class = -1;          // gossip_*: size class j
  std::int64_t frame = -1;                 // gossip_*: global frame index
  std::shared_ptr<const LabelSet> labels;  // gossip_labels
  std::shared_ptr<const std::vector<SccVectorPtr>> vectors;  // gossip_vectors, sorted by origin

  std::uint64_t fingerprint() const;
  bool content_equal(const Message& o) const;
  /// Canonical serialization; full=false compresses label sets to count+hash.
  nlohmann::json to_json(bool full) const;
};
using MessagePtr = std::shared_ptr<const Message>;

MessagePtr make_label_announce(NodeId sender, int n);
MessagePtr make_gather(NodeId sender, std::shared_ptr<const LabelSet> rumors, Step rws);
MessagePtr make_ack_gather(NodeId sender, std::shared_ptr<const LabelSet> rumors);
MessagePtr make_gossip_labels(NodeId sender, int j, std::int64_t frame,
                              std::shared_ptr<const LabelSet> labels);
MessagePtr make_gossip_vectors(NodeId sender, int j, std::int64_t frame,
                               std::shared_ptr<const std::vector<SccVectorPtr>> vectors);

}  // namespace radiogather
