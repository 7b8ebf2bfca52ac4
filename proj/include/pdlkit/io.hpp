#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"
#include "pdlkit/semantics.hpp"
#include "pdlkit/syntax.hpp"

namespace pdl {

using Json = nlohmann::json;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// {"props":[...],"programs":[...]}
Vocabulary vocabulary_from_json(const Json& j);
Json to_json(const Vocabulary& v);

/// {"worlds":["w0"],"props":{"p":["w0"]},"programs":{"a":[["w0","w0"]]}}
KripkeStructure kripke_from_json(const Json& j);
Json to_json(const KripkeStructure& k);

Json to_json(const WitnessGraph& g, const KripkeStructure& k);
WitnessGraph witness_from_json(const Json& j, const KripkeStructure& k);

Json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);

}  // namespace pdl
