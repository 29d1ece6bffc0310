#pragma once

// Umbrella header: the whole fairness-evaluation harness.

#include "pedfair/errors.hpp"
#include "pedfair/geometry.hpp"
#include "pedfair/ingestion.hpp"
#include "pedfair/matching.hpp"
#include "pedfair/metrics.hpp"
#include "pedfair/pose_attributes.hpp"
#include "pedfair/report_io.hpp"
#include "pedfair/sweep.hpp"
#include "pedfair/synthgen.hpp"
#include "pedfair/types.hpp"
