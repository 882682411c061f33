#ifndef BGT_CLI_HPP
#define BGT_CLI_HPP

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace bgt {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCertification = 1;
inline constexpr int kExitMalformed = 2;

struct BenchConfig {
  std::string family;  // main | two | rf | eightfifths | continuous | spiral
  std::uint64_t count = 30;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::size_t max_n = 200;
  std::vector<std::uint64_t> sizes;  // spiral sizes
  std::size_t oracle_limit = 6;
  std::size_t oracle_budget = 0;  // 0 = default
};

/// Deterministic CSV; rows ordered by instance id.
std::string bench_suite(const BenchConfig& config);

/// args excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bgt

#endif  // BGT_CLI_HPP
