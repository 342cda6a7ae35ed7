#pragma once

// Umbrella header for the driftwidth streaming drift-detection toolkit.

#include "driftwidth/common.hpp"
#include "driftwidth/config.hpp"
#include "driftwidth/detect.hpp"
#include "driftwidth/errors.hpp"
#include "driftwidth/evaluate.hpp"
#include "driftwidth/model.hpp"
#include "driftwidth/rng.hpp"
#include "driftwidth/serialize.hpp"
#include "driftwidth/stream.hpp"
