#pragma once

#include <json.hpp>

#include "core/ensemble.hpp"
#include "core/gnb.hpp"

namespace rpnb {

// Model snapshots. Floating-point fields round-trip exactly: the writer
// emits shortest-representation decimal text and the reader parses it back
// to the identical bits.

nlohmann::json gnb_to_json(const GnbModel& model);
GnbModel gnb_from_json(const nlohmann::json& j);

// Envelope with config, dimensions, counters, and per-base GNB snapshots.
// Projection matrices are not serialized; they are regenerated from the
// seed on load.
nlohmann::json rpnb_to_json(const RpnbModel& model);
RpnbModel rpnb_from_json(const nlohmann::json& j);

}  // namespace rpnb
