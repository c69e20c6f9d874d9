#pragma once

// Umbrella header for the latency-failure-model library.

#include "lfm/analysis.hpp"
#include "lfm/csv.hpp"
#include "lfm/error.hpp"
#include "lfm/evaluation.hpp"
#include "lfm/ingest.hpp"
#include "lfm/model.hpp"
#include "lfm/netsim.hpp"
#include "lfm/record.hpp"
#include "lfm/rng.hpp"
#include "lfm/store.hpp"
#include "lfm/timestamp.hpp"
