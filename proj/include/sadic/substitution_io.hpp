#pragma once

#include <filesystem>
#include <string>

#include "sadic/substitution.hpp"

namespace sadic {

/// Reads a substitution definition:
///
///   { "name": "thue_morse", "dim": 1, "alphabet": ["a", "b"],
///     "expansion": [2],
///     "rules": { "a": ["a", "b"], "b": ["b", "a"] } }
///
/// Rule keys and cell entries may be alphabet names or 1-based integers.
/// Rules are nested arrays, outermost index along axis 0. The result is
/// not validated; unknown letters are stored as 0 so that validate()
/// reports them with their cell.
BlockSubstitution substitution_from_json(const std::string& text);
BlockSubstitution load_substitution(const std::filesystem::path& path);

std::string substitution_to_json(const BlockSubstitution& sub);

}  // namespace sadic
