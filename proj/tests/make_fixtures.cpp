// Writes a folder of synthetic chest-like 16-bit PNGs: make_fixtures <dir> <count> [size] [seed]

#include <cstdio>
#include <cstdlib>
#include <string>

#include "support/fixtures.hpp"

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: %s <dir> <count> [size] [seed]\n", argv[0]);
    return 2;
  }
  const std::size_t count = std::stoul(argv[2]);
  const std::size_t size = argc > 3 ? std::stoul(argv[3]) : 128;
  const std::uint64_t seed = argc > 4 ? std::stoull(argv[4]) : 1;
  fixtures::write_folder(argv[1], count, size, size, seed);
  return 0;
}
