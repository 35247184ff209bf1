#pragma once

#include <functional>
#include <memory>
#include <set>

#include "radiogather/selectors.hpp"
#include "radiogather/trace.hpp"

namespace radiogather {

/// Time multiplexing: round r of the wrapped protocol simulates step r of the
/// inner protocol; the inner frequency-f message goes out at outer step
/// r * kappa + f on the single frequency. Inner deliveries are assembled at
/// the end of the round. kappa == 1 is the identity on timing.
std::unique_ptr<ProtocolFactory> multiplex_to_single_frequency(
    std::shared_ptr<ProtocolFactory> inner, int kappa);

/// Simultaneous receive/transmit removal: each inner step becomes a segment
/// of |wrap| sub-steps; at sub-step i, a node transmits its inner message iff
/// it is in wrap set i, and listens otherwise. The wrapped run may deliver
/// strictly more than the inner one (serialized transmissions no longer
/// collide), never less. Requires a single-frequency inner protocol and a
/// verified strong (n,2)-selector.
std::unique_ptr<ProtocolFactory> strip_srt(std::shared_ptr<ProtocolFactory> inner,
                                           SelectorFamilyPtr wrap);

/// Maps a wrapped run's (step, freq) back to the inner run's coordinates.
using TimeMap = std::function<std::pair<Step, Freq>(Step, Freq)>;

TimeMap identity_time_map();
TimeMap multiplex_time_map(int kappa);
TimeMap strip_time_map(std::size_t segment_length);
TimeMap compose(TimeMap outer_to_mid, TimeMap mid_to_inner);

/// Deliveries of a trace pulled back through a time map, deduplicated.
std::set<DeliveryKey> delivery_set(const Trace& t, const TimeMap& map);

struct EquivalenceVerdict {
  bool pass = false;
  bool equal = false;          // sets identical, not just superset
  std::size_t missing = 0;     // t1 deliveries absent from t2 (pulled back)
  std::size_t extra = 0;       // t2 deliveries absent from t1
  DeliveryKey first_missing{};
};

/// Checks that t2's delivery set, pulled back through `map`, covers t1's
/// (the wrappers may deliver strictly more, never less).
EquivalenceVerdict delivery_equivalence(const Trace& t1, const Trace& t2,
                                        const TimeMap& map);

}  // namespace radiogather
