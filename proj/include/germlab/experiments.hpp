#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "germlab/rational.hpp"

namespace germlab {

/// One expression evaluated over Q_p and F_p((t)).
struct AkEntry {
  std::string name;
  std::vector<Rational> mixed, equal;
  bool stable = false;
  bool agree = false;
};

struct AkReport {
  int p = 0;
  int depth = 0;
  std::vector<AkEntry> entries;
  bool agree = false;
  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// Ten expressions: two measures and a shell integral (at depth <= 2), a
/// split orbital integral, the whole Theta matrix and five germ values at a
/// fixed elliptic X. Throws for p = 2.
AkReport ak_regression_family(int p, int depth);

}  // namespace germlab
