#pragma once

#include <string>

namespace dvcm {

// Length that is either absolute or a fraction of the shape diameter,
// written with a trailing 'D' ("0.04D"). Figure-style parameters are
// diameter-relative; file-derived ones are usually absolute.
struct DiamScalar {
  double value = 0.0;
  bool relative = false;

  double resolve(double diameter) const { return relative ? value * diameter : value; }
  static DiamScalar absolute(double v) { return {v, false}; }
  static DiamScalar fraction(double v) { return {v, true}; }
};

DiamScalar parse_diam_scalar(const std::string& text);
std::string to_string(const DiamScalar& s);

}  // namespace dvcm
