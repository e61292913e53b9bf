#include "oqho/fixtures.hpp"

#include <cstring>

namespace oqho {

Fixture four_mode_example() {
  Fixture f;
  f.name = "paper-example";
  f.theta = 0.5 * block_J(4);
  f.R.resize(4, 4);
  f.R << -0.1027, 1.3449, -0.2403, -1.3994,
          1.3449, 1.5008, -0.1856, 0.9212,
         -0.2403, -0.1856, -0.5704, -0.4146,
         -1.3994, 0.9212, -0.4146, -0.3233;
  f.M.resize(4, 4);
  f.M << 0.8726, 0.1632, 2.1844, -1.9270,
         0.1179, -0.8147, -0.0938, 0.5214,
        -1.5031, 0.4037, -0.2942, -2.0544,
         0.9218, 0.7562, -0.5048, -0.2698;
  f.Pi.resize(4, 4);
  f.Pi << 3.5050, -0.5447, 0.0672, -2.3918,
         -0.5447, 4.0758, -1.1876, 0.0215,
          0.0672, -1.1876, 5.1422, -1.4628,
         -2.3918, 0.0215, -1.4628, 4.5416;
  return f;
}

Fixture tiny_example() {
  Fixture f;
  f.name = "tiny";
  f.theta = 0.5 * block_J(2);
  f.R = Mat::Zero(2, 2);
  f.M = Mat::Identity(2, 2);
  f.Pi = Mat::Identity(2, 2);
  return f;
}

namespace {

void fnv(std::uint64_t& h, const Mat& m) {
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    unsigned char bytes[sizeof(double)];
    const double v = m.data()[k];
    std::memcpy(bytes, &v, sizeof v);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ull;
    }
  }
}

}  // namespace

std::uint64_t fixture_hash(const Fixture& f) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  fnv(h, f.theta);
  fnv(h, f.R);
  fnv(h, f.M);
  fnv(h, f.Pi);
  return h;
}

const std::uint64_t kFourModeExampleHash = 0xfdcea4267e226074ull;

}  // namespace oqho
