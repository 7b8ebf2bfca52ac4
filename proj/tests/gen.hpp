#pragma once

// Random term generators for property tests.

#include <random>
#include <string>
#include <vector>

#include "pdlkit/syntax.hpp"

namespace pdltest {

struct Gen {
  std::mt19937_64 rng;
  std::vector<std::string> props{"p", "q"};
  std::vector<std::string> programs{"a", "b"};
  bool allow_union = true;

  explicit Gen(std::uint64_t seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

  pdl::Formula formula(int depth) {
    using pdl::Formula;
    if (depth <= 0 || coin(0.2)) {
      int k = pick(static_cast<int>(props.size()) + 1);
      if (k == static_cast<int>(props.size())) return coin() ? Formula::falsum() : pdl::verum();
      return Formula::prop(props[k]);
    }
    switch (pick(4)) {
      case 0:
        return Formula::negation(formula(depth - 1));
      case 1:
        return Formula::disjunction(formula(depth - 1), formula(depth - 1));
      case 2:
        return pdl::conj(formula(depth - 1), formula(depth - 1));
      default:
        return Formula::diamond(program(depth - 1), formula(depth - 1));
    }
  }

  pdl::Program program(int depth) {
    using pdl::Program;
    if (depth <= 0 || coin(0.25)) {
      if (coin(0.8)) return Program::atomic(programs[pick(static_cast<int>(programs.size()))]);
      return Program::test(formula(0));
    }
    int k = pick(allow_union ? 5 : 4);
    switch (k) {
      case 0:
        return Program::seq(program(depth - 1), program(depth - 1));
      case 1:
        return Program::inter(program(depth - 1), program(depth - 1));
      case 2:
        return Program::test(formula(depth - 1));
      case 3:
        return pdl::loop(program(depth - 1));
      default:
        return Program::choice(program(depth - 1), program(depth - 1));
    }
  }
};

}  // namespace pdltest
