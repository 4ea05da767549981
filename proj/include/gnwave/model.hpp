#ifndef GNWAVE_MODEL_HPP
#define GNWAVE_MODEL_HPP

#include <string>

namespace gnwave {

// Which dispersive shallow-water system the operators act in. The two
// systems share the same nonlinear structure; they differ only in the
// Fourier multiplier attached to spatial derivatives inside the dispersive
// terms (identity for sgn, the full-dispersion factor for wgn).
enum class Model { sgn, wgn };

std::string model_name(Model m);
Model parse_model(const std::string& s);

} // namespace gnwave

#endif
