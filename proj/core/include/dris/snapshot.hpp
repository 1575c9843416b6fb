#pragma once

#include <string>
#include <string_view>

#include "dris/federation.hpp"

namespace dris {

// One canonical JSON object holding the entire federation state: topology,
// per-org documents and change logs, per-hub union records and cursors, and
// each root's registry in registration order. load(save(f)) reproduces
// byte-identical state.
std::string save_snapshot(const Federation& f);
Federation load_snapshot(std::string_view text);

}  // namespace dris
