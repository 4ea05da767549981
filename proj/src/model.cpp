#include "gnwave/model.hpp"

#include <stdexcept>

namespace gnwave {

std::string model_name(Model m) { return m == Model::sgn ? "sgn" : "wgn"; }

Model parse_model(const std::string& s) {
  if (s == "sgn")
    return Model::sgn;
  if (s == "wgn")
    return Model::wgn;
  throw std::invalid_argument("unknown model '" + s + "' (expected sgn or wgn)");
}

} // namespace gnwave
