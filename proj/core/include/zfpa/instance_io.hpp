// SPDX-License-Identifier: Apache-2.0
//
// JSON interchange for problem instances:
//   {"K","N","M","P","c","beta","d","rt"}
// "beta" is row-major N x K (an array of N rows); "rt" holds 0-based user
// indices. Readers also accept a flat length N*K "beta" array.

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "zfpa/model.hpp"

namespace zfpa {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string instance_to_json(const ProblemInstance& instance, int indent = -1);

/// Throws ParseError on malformed documents or shape mismatches. Does not
/// run validate(); callers decide what to do with invariant violations.
ProblemInstance instance_from_json(std::string_view text);

ProblemInstance load_instance(const std::filesystem::path& path);
void save_instance(const std::filesystem::path& path, const ProblemInstance& instance);

}  // namespace zfpa
