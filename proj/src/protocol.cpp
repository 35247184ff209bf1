#include "radiogather/protocol.hpp"

#include <nlohmann/json.hpp>

namespace radiogather {

nlohmann::json ProtocolFactory::params(int n) const {
  return nlohmann::json{{"protocol", name()}, {"n", n}};
}

}  // namespace radiogather
