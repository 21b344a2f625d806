#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "epidyn/knowledge.hpp"

namespace epidyn {

/// The process state k^t: one knowledge function per agent, all sharing one setting.
struct PopulationState {
  std::vector<KnowledgeFunction> functions;
  std::uint64_t t = 0;

  std::size_t agents() const { return functions.size(); }

  void validate() const {
    if (functions.empty()) throw std::invalid_argument("population must contain at least one agent");
    const auto& s = functions.front().setting();
    for (const auto& f : functions) {
      if (!(&f.setting() == &s || f.setting() == s)) {
        throw std::invalid_argument("population functions do not share one knowledge setting");
      }
    }
  }
};

}  // namespace epidyn
