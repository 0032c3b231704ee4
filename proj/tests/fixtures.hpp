#pragma once

#include <string>
#include <vector>

#include "sadic/substitution.hpp"
#include "sadic/substitution_io.hpp"

namespace sadic::testing {

inline BlockSubstitution shipped(const std::string& name) {
    return load_substitution(std::string(SADIC_DATA_DIR) + "/" + name + ".json");
}

inline BlockSubstitution thue_morse() { return shipped("thue_morse"); }
inline BlockSubstitution period_doubling() { return shipped("period_doubling"); }
inline BlockSubstitution block_4x3() { return shipped("block_4x3"); }

inline BlockSubstitution make_1d(std::string name, std::vector<std::vector<int>> blocks) {
    BlockSubstitution s;
    s.name = std::move(name);
    s.dim = 1;
    s.alphabet_size = blocks.size();
    s.expansion = {static_cast<std::int64_t>(blocks.front().size())};
    s.blocks = std::move(blocks);
    return s;
}

/// Both letters map to an all-1 block of length 2.
inline BlockSubstitution constant_block() { return make_1d("constant", {{1, 1}, {1, 1}}); }

}  // namespace sadic::testing
