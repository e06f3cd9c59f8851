#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "unitroot/family.hpp"
#include "unitroot/rational.hpp"

namespace ur {

struct InstanceConfig {
  std::uint64_t p = 0;
  int a = 1;
  int n = 1;
  int s = 1;
  std::vector<LaurentFamily::FTerm> f_support;
  std::vector<LaurentFamily::PTerm> P_support;
  std::vector<std::uint64_t> t_bar;
  int t_degree = 1;
  std::vector<std::uint64_t> kappa_digits;  // base p, little-endian; empty: kappa = 1
  bool kappa_ones = false;
  int N = 4;
  std::optional<int> M;  // kappa known mod p^M; unset: kappa_digits is an exact integer
  std::optional<Rational> W_x, W_gamma, W_sym;
  std::optional<int> L_max, d_T, d_Lambda, max_fiber_degree;
  std::optional<std::string> command;

  bool operator==(const InstanceConfig&) const = default;
};

// Throws ConfigError with line and column.
InstanceConfig parse_config(const std::string& text);
std::string emit_config(const InstanceConfig& cfg);

extern const std::vector<std::string> kCommands;

struct RunReport {
  std::vector<std::pair<std::string, std::string>> records;
  std::vector<std::pair<std::string, double>> timings;  // seconds
  int status = 0;  // 0 pass, 1 check failure, 2 config error, 3 precision exhausted

  void add(const std::string& key, const std::string& value) { records.emplace_back(key, value); }
  std::string str() const;
};

RunReport run(const InstanceConfig& cfg, const std::string& command);

}  // namespace ur
