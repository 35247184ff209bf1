#pragma once

#include <string>

#include "radiogather/common.hpp"

namespace radiogather {

/// Channel semantics in force for a run.
///
/// frequencies: number of parallel channels (MFC relaxation when > 1).
/// srt: a node may receive on a frequency it is transmitting on in the same
/// step; when false that reception is dropped, per frequency.
/// ack: after transmitting, a node receives one bit telling whether at least
/// one out-neighbor received its message this step.
struct NetworkModel {
  int frequencies = 1;
  bool srt = true;
  bool ack = false;

  std::string to_string() const {
    std::string s = "f=" + std::to_string(frequencies);
    s += srt ? ",srt" : ",nosrt";
    s += ack ? ",ack" : ",noack";
    return s;
  }
};

}  // namespace radiogather
