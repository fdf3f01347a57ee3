#pragma once

// Umbrella header. lagdex/remote.hpp is not included here because it pulls
// in cpp-httplib.

#include "lagdex/error.hpp"
#include "lagdex/ingest.hpp"
#include "lagdex/lsq.hpp"
#include "lagdex/registry.hpp"
#include "lagdex/regress.hpp"
#include "lagdex/report.hpp"
#include "lagdex/search.hpp"
#include "lagdex/serialize.hpp"
#include "lagdex/series.hpp"
#include "lagdex/signal.hpp"
#include "lagdex/trend.hpp"

namespace lagdex {

inline constexpr const char* version = "0.1.0";

} // namespace lagdex
