#pragma once

#include "mbs/config.hpp"
#include "mbs/error.hpp"
#include "mbs/evaluation.hpp"
#include "mbs/feature_classifier.hpp"
#include "mbs/kinematics.hpp"
#include "mbs/motion_detectors.hpp"
#include "mbs/position_classifier.hpp"
#include "mbs/shortcut_engine.hpp"
#include "mbs/signal_core.hpp"
#include "mbs/synth_oracle.hpp"
#include "mbs/text.hpp"
#include "mbs/trace_io.hpp"
#include "mbs/vec3.hpp"
