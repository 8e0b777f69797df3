#pragma once

#include "lanetrack/commands.hpp"
#include "lanetrack/config.hpp"
#include "lanetrack/detector.hpp"
#include "lanetrack/errors.hpp"
#include "lanetrack/evaluator.hpp"
#include "lanetrack/geometry.hpp"
#include "lanetrack/lane_fit.hpp"
#include "lanetrack/lane_io.hpp"
#include "lanetrack/point_extractor.hpp"
#include "lanetrack/probmap.hpp"
#include "lanetrack/scenario_io.hpp"
#include "lanetrack/synth.hpp"
#include "lanetrack/tracker.hpp"
#include "lanetrack/tracker_io.hpp"
#include "lanetrack/types.hpp"
#include "lanetrack/variance.hpp"
