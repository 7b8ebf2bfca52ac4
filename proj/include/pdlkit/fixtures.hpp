#pragma once

// Fixtures shipped with the repository, run by `pdlkit fixtures`.

#include <string>
#include <vector>

#include "json.hpp"
#include "pdlkit/soundness.hpp"

namespace pdl {

struct FixtureOptions {
  std::string dir = PDLKIT_FIXTURE_DIR;
  /// Used by the axiom-harness fixture.
  SoundnessConfig harness;
  unsigned jobs = 1;
};

struct FixtureResult {
  std::string name;
  bool ok = false;
  std::string detail;
  nlohmann::json data;
};

struct FixtureReport {
  std::vector<FixtureResult> results;
  bool ok() const;
};

/// split, split-no-successor, cyclic-test, test-elimination, axiom-harness.
FixtureReport run_fixture_suite(const FixtureOptions& options = {});

nlohmann::json to_json(const FixtureReport& r);

}  // namespace pdl
