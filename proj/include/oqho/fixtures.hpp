#pragma once

#include <cstdint>
#include <string>

#include "oqho/model.hpp"

namespace oqho {

struct Fixture {
  std::string name;
  Mat theta, R, M, Pi;
};

// The four-mode regression example (n = m = 4).
Fixture four_mode_example();

// n = m = 2, Theta = J/2, R = 0, M = I, Pi = I: A = -I, B = J.
Fixture tiny_example();

// FNV-1a over the raw bytes of theta, R, M and Pi.
std::uint64_t fixture_hash(const Fixture& f);

// Pinned hash of four_mode_example(); a mismatch means the embedded data drifted.
extern const std::uint64_t kFourModeExampleHash;

}  // namespace oqho
